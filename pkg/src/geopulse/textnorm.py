"""Text normalization for raw post bodies.

Rules applied, in order, until the text is stable:
  1. HTML entities decoded to their character representation.
  2. URLs (``http://``, ``https://`` or ``www.``-prefixed maximal
     non-whitespace runs) replaced by the literal token ``<HTTPURL>``.
  3. Emoji sequences replaced by the literal token ``<EMOJI>``. A sequence
     is one pictographic codepoint plus its variation selectors / skin-tone
     modifiers, joined to further pictographs with zero-width joiners;
     regional-indicator pairs and keycap sequences count as one.
  4. Runs of whitespace collapsed to single spaces, result trimmed.

Running the pass to a fixpoint makes the function idempotent even for
inputs like doubly-escaped entities.
"""

import html
import re

URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)

# Conservative pictographic codepoint ranges. Symbols that legitimately occur
# in running text ((c), (r), (tm), arrows in the BMP letter blocks) are left
# alone on purpose.
_EMOJI_RANGES = [
    (0x1F000, 0x1F02F),  # mahjong tiles
    (0x1F0A0, 0x1F0FF),  # playing cards
    (0x1F300, 0x1F5FF),  # misc symbols and pictographs
    (0x1F600, 0x1F64F),  # emoticons
    (0x1F680, 0x1F6FF),  # transport and map
    (0x1F700, 0x1F77F),
    (0x1F780, 0x1F7FF),
    (0x1F800, 0x1F8FF),
    (0x1F900, 0x1F9FF),  # supplemental symbols
    (0x1FA00, 0x1FA6F),
    (0x1FA70, 0x1FAFF),
    (0x2600, 0x26FF),    # misc symbols
    (0x2700, 0x27BF),    # dingbats
]
_EMOJI_SINGLES = [0x203C, 0x2049, 0x2B05, 0x2B06, 0x2B07, 0x2B1B, 0x2B1C, 0x2B50, 0x2B55]

_EMOJI_CLASS = "[" + "".join(
    f"{chr(lo)}-{chr(hi)}" for lo, hi in _EMOJI_RANGES
) + "".join(chr(c) for c in _EMOJI_SINGLES) + "]"
_MODIFIER_CLASS = "[\U0001F3FB-\U0001F3FF︎️]"
_FLAG = "[\U0001F1E6-\U0001F1FF]{2}"
_KEYCAP = "[0-9#*]️?⃣"
_PICTO = f"{_EMOJI_CLASS}{_MODIFIER_CLASS}*"

EMOJI_RE = re.compile(f"(?:{_KEYCAP})|(?:{_FLAG})|(?:{_PICTO}(?:‍{_PICTO})*)")

_WS_RE = re.compile(r"\s+")

URL_TOKEN = "<HTTPURL>"
EMOJI_TOKEN = "<EMOJI>"

_MAX_PASSES = 5


def _pass(text: str) -> str:
    text = html.unescape(text)
    text = URL_RE.sub(URL_TOKEN, text)
    text = EMOJI_RE.sub(EMOJI_TOKEN, text)
    return _WS_RE.sub(" ", text).strip()


def preprocess(text: str) -> str:
    """Normalize one post body; idempotent."""
    for _ in range(_MAX_PASSES):
        out = _pass(text)
        if out == text:
            return out
        text = out
    return text
