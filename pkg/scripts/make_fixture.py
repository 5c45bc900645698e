#!/usr/bin/env python3
"""Generate the bundled 500-record fixture dump plus target series.

Deterministic (fixed seed). Regenerate with:
    python3 scripts/make_fixture.py
"""

import json
import math
import random
import re
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"

SEED = 20210101
WINDOW_START = date(2021, 1, 1)
WINDOW_END = date(2021, 4, 30)
N_DAYS = (WINDOW_END - WINDOW_START).days + 1

FAMILIES = {
    "lockdown": {
        "anchors": ["lockdown", "restrictions"],
        "pool": [
            "curfew", "stage", "borders", "closed", "stayhome", "rules", "premier",
            "extended", "roadmap", "easing", "businesses", "police", "fines",
            "compliance", "streets",
        ],
        "hashtags": ["lockdown", "stayhome", "covid19vic", "springst"],
        "mentions": ["danielandrewsmp", "vicgovdh", "abcmelbourne"],
        "sentiment": ("terrible", "grim", "frustrated", "angry", "hopeless"),
        "sentiment_pos": ("relief", "hope", "support"),
        "neg_rate": 0.55,
        "pos_rate": 0.15,
    },
    "vaccine": {
        "anchors": ["vaccine", "rollout"],
        "pool": [
            "pfizer", "astrazeneca", "doses", "jab", "appointment", "gp", "hub",
            "supply", "booked", "eligible", "clinic", "program", "batch", "arrived",
            "second",
        ],
        "hashtags": ["vaccine", "covidvaccine", "rollout"],
        "mentions": ["greghuntmp", "healthgovau", "scottmorrisonmp"],
        "sentiment": ("worried", "slow", "failure", "shame"),
        "sentiment_pos": ("grateful", "relieved", "thankful", "good"),
        "neg_rate": 0.30,
        "pos_rate": 0.40,
    },
    "testing": {
        "anchors": ["testing", "cases"],
        "pool": [
            "clinic", "queue", "results", "swab", "exposure", "sites", "contact",
            "tracing", "outbreak", "cluster", "numbers", "record", "local", "zero",
            "hotel",
        ],
        "hashtags": ["covid19nsw", "covidtest", "outbreak"],
        "mentions": ["nswhealth", "gladysb", "9newsaus"],
        "sentiment": ("anxious", "scared", "concerned", "stressed"),
        "sentiment_pos": ("calm", "safe", "good"),
        "neg_rate": 0.45,
        "pos_rate": 0.20,
    },
    "sports": {
        "anchors": ["footy", "crowd"],
        "pool": [
            "afl", "cricket", "tennis", "season", "players", "stadium", "tickets",
            "match", "quarantine", "open", "finals", "bubble", "fixtures", "fans",
            "grandstand",
        ],
        "hashtags": ["afl", "ausopen", "cricket"],
        "mentions": ["afl", "cricketaus", "7news"],
        "sentiment": ("cancelled", "disappointed", "worst"),
        "sentiment_pos": ("love", "great", "winning", "enjoy"),
        "neg_rate": 0.25,
        "pos_rate": 0.45,
    },
    "school": {
        "anchors": ["school", "students"],
        "pool": [
            "remote", "learning", "teachers", "classroom", "homeschool", "kids",
            "term", "parents", "laptops", "curriculum", "year12", "exams",
            "attendance", "principals", "uniforms",
        ],
        "hashtags": ["homeschooling", "education", "remotelearning"],
        "mentions": ["det_vic", "educationgovau"],
        "sentiment": ("exhausted", "struggling", "stress", "overwhelmed"),
        "sentiment_pos": ("proud", "kind", "support"),
        "neg_rate": 0.40,
        "pos_rate": 0.25,
    },
    "panicbuying": {
        "anchors": ["supermarket", "shelves"],
        "pool": [
            "toilet", "paper", "hoarding", "panic", "buying", "stock", "limits",
            "groceries", "queue", "woolworths", "coles", "empty", "sanitizer",
            "pasta", "rice",
        ],
        "hashtags": ["toiletpaper", "panicbuying", "shopping"],
        "mentions": ["woolworths", "coles"],
        "sentiment": ("ridiculous", "chaos", "stupid", "mess"),
        "sentiment_pos": ("kindness", "calm", "helpful"),
        "neg_rate": 0.50,
        "pos_rate": 0.15,
    },
}

FILTER_GUARANTEE = ["covid19", "covid", "coronavirus", "pandemic", "virus", "quarantine"]

PLACES = [
    ("Melbourne, Victoria", 24),
    ("Sydney, New South Wales", 18),
    ("Brisbane, Queensland", 8),
    ("Perth, Western Australia", 6),
    ("Adelaide, South Australia", 5),
    ("Canberra, Australian Capital Territory", 3),
    ("Gold Coast, Queensland", 3),
    ("Hobart, Tasmania", 2),
    ("Darwin, Northern Territory", 2),
    ("Victoria, Australia", 3),
    ("New South Wales, Australia", 2),
    ("Newcastle, New South Wales", 2),
    ("Sunshine Coast, Queensland", 1),
    ("Central Coast, New South Wales", 1),
    ("Tasmania, Australia", 1),
    ("Bondi Beach, New South Wales", 2),
    ("Fitzroy, Victoria", 2),
    ("Australia", 6),
    ("Somewhere remote", 1),
]

SOURCES = ["Twitter for iPhone", "Twitter for Android", "Twitter Web App", "Instagram", "Tweetbot for iOS"]

URLS = ["https://t.co/a1B2c3", "https://t.co/Zz9yX8", "www.health.gov.au/alerts", "https://bit.ly/3covid"]
EMOJI = ["😷", "🙏", "😡", "🦠", "💉", "🏠", "👏👏", "❤️", "🤦‍♀️"]


def family_day_weight(family_idx: int, day: int) -> float:
    """Two waves across the window, phase-shifted per family."""
    phase = family_idx * 9.0
    wave = math.exp(-((day - 25 - phase) ** 2) / 300.0) + 0.8 * math.exp(
        -((day - 85 - phase * 0.5) ** 2) / 260.0
    )
    return 0.15 + wave


def make_text(rng: random.Random, family: dict, day: int) -> str:
    words = list(family["anchors"])
    words += rng.sample(family["pool"], 8)
    words.append(rng.choice(FILTER_GUARANTEE))
    if rng.random() < family["neg_rate"] + 0.15 * math.sin(day / 12.0):
        pool = list(family["sentiment"])
        words += rng.sample(pool, min(3, len(pool)))
    elif rng.random() < family["pos_rate"]:
        pool = list(family["sentiment_pos"])
        words += rng.sample(pool, min(3, len(pool)))
    rng.shuffle(words)
    text = " ".join(words)
    if rng.random() < 0.25:
        text += " " + rng.choice(URLS)
    if rng.random() < 0.20:
        text += " " + rng.choice(EMOJI)
    if rng.random() < 0.10:
        text = text.replace(" ", " &amp; ", 1)
    for tag in rng.sample(family["hashtags"], rng.randrange(0, 3)):
        text += f" #{tag}"
    if rng.random() < 0.5:
        text += f" #{rng.choice(['covid19', 'covid19aus', 'auspol'])}"
    if rng.random() < 0.6:
        text += f" @{rng.choice(family['mentions'])}"
    if rng.random() < 0.2:
        text += f" @{rng.choice(['abcnews', 'scottmorrisonmp', 'who'])}"
    return text


def weighted_place(rng: random.Random) -> str:
    total = sum(w for _, w in PLACES)
    pick = rng.uniform(0, total)
    acc = 0.0
    for place, weight in PLACES:
        acc += weight
        if pick <= acc:
            return place
    return PLACES[0][0]


def make_record(rng: random.Random, rec_id: int, family_name: str, family: dict, day: int) -> dict:
    created = datetime(
        WINDOW_START.year, WINDOW_START.month, WINDOW_START.day, tzinfo=timezone.utc
    ) + timedelta(days=day, hours=rng.randrange(24), minutes=rng.randrange(60), seconds=rng.randrange(60))
    obj = {
        "id": rec_id,
        "created_at": created.strftime("%Y-%m-%dT%H:%M:%S.000Z"),
        "text": make_text(rng, family, day),
        "author_id": rng.randrange(10_000, 999_999),
        "source": rng.choice(SOURCES),
        "geo": {"full_name": weighted_place(rng), "country": "Australia"},
    }
    if rng.random() < 0.3:
        # entity-style hashtag/mention fields instead of regex extraction
        tags = re.findall(r"#(\w+)", obj["text"])
        users = re.findall(r"@(\w+)", obj["text"])
        obj["entities"] = {
            "hashtags": [{"tag": t} for t in tags],
            "mentions": [{"username": u} for u in users],
        }
    return obj


def main() -> None:
    rng = random.Random(SEED)
    OUT.mkdir(exist_ok=True)

    family_names = list(FAMILIES)
    day_weights = {
        name: [family_day_weight(i, d) for d in range(N_DAYS)]
        for i, name in enumerate(family_names)
    }

    lines = []
    next_id = 1_400_000_000_000
    family_volume = {name: [0] * N_DAYS for name in family_names}
    good_ids = []

    for _ in range(470):
        name = rng.choice(family_names)
        weights = day_weights[name]
        day = rng.choices(range(N_DAYS), weights=weights)[0]
        rec_id = next_id
        next_id += rng.randrange(1, 9000)
        obj = make_record(rng, rec_id, name, FAMILIES[name], day)
        lines.append(json.dumps(obj, ensure_ascii=False))
        family_volume[name][day] += 1
        good_ids.append(rec_id)

    # 6 duplicates of earlier ids
    for _ in range(6):
        dup_id = rng.choice(good_ids[:300])
        name = rng.choice(family_names)
        day = rng.randrange(N_DAYS)
        obj = make_record(rng, dup_id, name, FAMILIES[name], day)
        lines.append(json.dumps(obj, ensure_ascii=False))

    # 8 out-of-window records
    for i in range(8):
        name = rng.choice(family_names)
        obj = make_record(rng, next_id, name, FAMILIES[name], 0)
        next_id += 17
        shift = -rng.randrange(5, 40) if i % 2 else rng.randrange(N_DAYS + 4, N_DAYS + 40)
        created = datetime(2021, 1, 1, 12, 0, 0, tzinfo=timezone.utc) + timedelta(days=shift)
        obj["created_at"] = created.strftime("%Y-%m-%dT%H:%M:%S.000Z")
        lines.append(json.dumps(obj, ensure_ascii=False))

    # 8 wrong-country records
    for _ in range(8):
        name = rng.choice(family_names)
        obj = make_record(rng, next_id, name, FAMILIES[name], rng.randrange(N_DAYS))
        next_id += 23
        obj["geo"] = {"full_name": "Auckland, New Zealand", "country": "New Zealand"}
        lines.append(json.dumps(obj, ensure_ascii=False))

    # 8 malformed lines
    malformed = [
        '{"id": 1, "created_at": "2021-02-01T00:00:00Z", "text": "broken',
        '{"created_at": "2021-02-01T00:00:00Z", "text": "covid no id"}',
        '{"id": 12345, "text": "covid no timestamp"}',
        '{"id": "abc-def", "created_at": "2021-02-01T00:00:00Z", "text": "covid bad id"}',
        "plain text, not json at all",
        '["covid", "array", "not", "object"]',
        '{"id": 99, "created_at": "soon", "text": "covid bad date"}',
        '{"id": 98, "created_at": "2021-02-01T00:00:00Z", "text": 42}',
    ]
    lines.extend(malformed)

    # deterministic interleave
    rng.shuffle(lines)
    (OUT / "dump.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # target series: cases follow the testing-family volume with a 5-day lag,
    # deaths follow cases with a 7-day lag; two negative corrections appear
    testing = family_volume["testing"]
    cases = []
    for d in range(N_DAYS):
        base = 8.0 + 6.0 * math.sin(d / 11.0) + 4.5 * math.cos(d / 23.0)
        lagged = 3.0 * testing[d - 5] if d >= 5 else 0.0
        noise = rng.gauss(0.0, 1.0)
        cases.append(max(0.0, base + lagged + noise))
    cases[40] = -3.0  # adjusted correction
    cases[77] = -1.0
    deaths = []
    for d in range(N_DAYS):
        lagged = 0.3 * cases[d - 7] if d >= 7 else 0.4
        deaths.append(max(0.0, lagged + rng.gauss(0.0, 0.4)))

    def write_series(path: Path, values: list) -> None:
        rows = ["date,value"]
        for i, value in enumerate(values):
            day = WINDOW_START + timedelta(days=i)
            rows.append(f"{day.isoformat()},{value:.2f}")
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")

    write_series(OUT / "cases.csv", cases)
    write_series(OUT / "deaths.csv", deaths)

    (OUT / "config.ini").write_text(
        "\n".join(
            [
                "[input]",
                "dump = dump.jsonl",
                "",
                "[filter]",
                "country = Australia",
                "date_start = 2021-01-01",
                "date_end = 2021-04-30",
                "",
                "[topics]",
                "embedding = default",
                "dim = 1024",
                "reduce_dim = 8",
                "min_cluster_size = 10",
                "top_k = 10",
                "",
                "[sentiment]",
                "sentiment_mode = lexicon",
                "",
                "[causality]",
                "cases_file = cases.csv",
                "deaths_file = deaths.csv",
                "max_lag = 10",
                "alpha = 0.05",
                "",
                "[output]",
                "output_dir = out",
                "",
                "[run]",
                "workers = 1",
                "",
            ]
        ),
        encoding="utf-8",
    )
    print(f"wrote {len(lines)} dump lines, {N_DAYS}-day targets, config.ini")


if __name__ == "__main__":
    main()
