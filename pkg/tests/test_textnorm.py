import random
import string

from geopulse.textnorm import EMOJI_RE, URL_RE, preprocess


def test_url_entity_emoji_example():
    assert preprocess("Check https://t.co/x &amp; stay safe \U0001f637") == "Check <HTTPURL> & stay safe <EMOJI>"


def test_empty_is_identity():
    assert preprocess("") == ""


def test_whitespace_collapse():
    assert preprocess("a\n\n\t b") == "a b"


def test_www_urls_replaced():
    assert preprocess("see www.example.com/page now") == "see <HTTPURL> now"


def test_entity_decoded_before_url_detection():
    # an entity-encoded colon must not smuggle a URL past the replacement
    assert preprocess("https&colon;//foo.com rest") == "<HTTPURL> rest"


def test_double_escaped_entity_idempotent():
    out = preprocess("&amp;amp; x")
    assert preprocess(out) == out


def test_zwj_sequence_collapses_to_one_token():
    family = "\U0001F468‍\U0001F469‍\U0001F467"
    assert preprocess(f"hi {family} there") == "hi <EMOJI> there"


def test_flag_pair_is_one_token():
    flag = "\U0001F1E6\U0001F1FA"
    assert preprocess(f"go {flag}!") == "go <EMOJI>!"


def test_keycap_sequence():
    assert preprocess("press 1️⃣ now") == "press <EMOJI> now"


def test_skin_tone_modifier_absorbed():
    assert preprocess("wave \U0001F44B\U0001F3FD!") == "wave <EMOJI>!"


def _random_noise(rng):
    pool = (
        string.ascii_letters
        + string.digits
        + " \t\n\r"
        + "#@&;:/.<>-"
        + "\U0001F600\U0001F637❤️"
    )
    n = rng.randrange(0, 120)
    return "".join(rng.choice(pool) for _ in range(n)) + rng.choice(
        ["", " https://x.io/a?b=1 ", " &amp; ", " &amp;amp; ", " www.z.org"]
    )


def test_idempotent_and_clean_on_random_inputs():
    rng = random.Random(20240811)
    for _ in range(1500):
        text = _random_noise(rng)
        out = preprocess(text)
        assert preprocess(out) == out
        assert "  " not in out
        assert not URL_RE.search(out)
        assert not EMOJI_RE.search(out)
        assert out == out.strip()
