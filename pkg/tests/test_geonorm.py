import pytest

from geopulse.geonorm import REGIONS, UNKNOWN, Gazetteer, normalize_place

# the bundled fixture of real place strings and their states
PLACE_FIXTURE = [
    ("Melbourne, Victoria", "VIC"),
    ("Sydney, New South Wales", "NSW"),
    ("Brisbane, Queensland", "QLD"),
    ("Perth, Western Australia", "WA"),
    ("Adelaide, South Australia", "SA"),
    ("Canberra, Australian Capital Territory", "ACT"),
    ("Gold Coast, Queensland", "QLD"),
    ("Victoria, Australia", "VIC"),
    ("New South Wales, Australia", "NSW"),
    ("Newcastle, New South Wales", "NSW"),
    ("Sunshine Coast, Queensland", "QLD"),
    ("Central Coast, New South Wales", "NSW"),
    ("Tasmania, Australia", "TAS"),
    ("Hobart, Tasmania", "TAS"),
]


@pytest.fixture(scope="module")
def gaz():
    return Gazetteer.default()


def test_place_fixture_resolves_all_states(gaz):
    for place, code in PLACE_FIXTURE:
        assert normalize_place(place, gaz) == code, place


def test_suffix_rules_without_exact_entry(gaz):
    # not in the exact table; resolved via the state-name segments
    assert normalize_place("Wagga Wagga, New South Wales", gaz) == "NSW"
    assert normalize_place("Broome, WA", gaz) == "WA"
    assert normalize_place("Queensland, Australia", gaz) == "QLD"


def test_unknown_fallbacks(gaz):
    assert normalize_place("Springfield", gaz) == UNKNOWN
    assert normalize_place("Australia", gaz) == UNKNOWN
    assert normalize_place("", gaz) == UNKNOWN
    assert normalize_place("  ,  ", gaz) == UNKNOWN
    assert normalize_place("Auckland, New Zealand", gaz) == UNKNOWN


def test_case_and_whitespace_insensitive(gaz):
    for place, _ in PLACE_FIXTURE:
        assert normalize_place(place.upper(), gaz) == normalize_place(place, gaz)
        assert normalize_place("  " + place.replace(", ", " ,   ") + " ", gaz) == normalize_place(place, gaz)


def test_lookup_is_total_on_noise(gaz):
    for junk in ("🦘", "123", ",,,", "somewhere, else, entirely"):
        assert normalize_place(junk, gaz) in set(REGIONS) | {UNKNOWN}


def test_custom_gazetteer_file(tmp_path):
    path = tmp_path / "gaz.tsv"
    path.write_text("my town, somewhere\tNT\n\nother place\tVIC\n", encoding="utf-8")
    g = Gazetteer.from_file(path)
    assert normalize_place("My Town, Somewhere", g) == "NT"
    assert normalize_place("OTHER PLACE", g) == "VIC"
    # suffix fallback still active
    assert normalize_place("Anywhere, Tasmania", g) == "TAS"


def test_gazetteer_file_errors(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("no tab here\n", encoding="utf-8")
    with pytest.raises(ValueError):
        Gazetteer.from_file(bad)
    bad.write_text("place\tZZZ\n", encoding="utf-8")
    with pytest.raises(ValueError):
        Gazetteer.from_file(bad)
