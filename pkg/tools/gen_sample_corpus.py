"""Regenerate sample_corpus/ (trusted corpus + bundles under analysis).

The trusted corpus has three clearly separated description vocabularies
(travel, messaging, finance) so that a K=3 topic model groups them
cleanly, and the travel group's flow matrix is pinned to:

    (GPS, Internet) 10   (GPS, SMS) 8   (GPS, Bluetooth) 3
    (Contacts, SMS) 7    (Contacts, Bluetooth) 8

which yields tau = 11/2 over {3, 7, 8, 8, 10}.  trip_organizer.app then
carries one common flow (Contacts -> SMS), one rare flow
(GPS -> Bluetooth) and one absent flow (Contacts -> Internet via an
internal ICC hop), so it must classify as anomalous; city_explorer.app
only has the common GPS -> Internet flow and must classify as normal.

Usage: python tools/gen_sample_corpus.py [ROOT]
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

TRAVEL_WORDS = """travel trip journey hotel flight map route destination tour
guide city beach vacation holiday luggage explore adventure navigate""".split()

MESSAGING_WORDS = """message chat friend contact text conversation group emoji
sticker call voice video reply inbox notification share send receive""".split()

FINANCE_WORDS = """money bank account budget expense payment invest saving loan
currency exchange wallet credit finance stock market price interest""".split()

GLUE = ["the", "and", "for", "your", "with", "a", "to", "of", "on", "is"]

# (source api, sink api) per flow kind
FLOWS = {
    ("GPS", "Internet"): ("read_gps", "openConnection"),
    ("GPS", "SMS"): ("read_gps", "send_sms"),
    ("GPS", "Bluetooth"): ("read_gps", "bt_send"),
    ("Contacts", "SMS"): ("read_contacts", "send_sms"),
    ("Contacts", "Bluetooth"): ("read_contacts", "bt_send"),
    ("Contacts", "Internet"): ("read_contacts", "http_post"),
    ("Accounts", "Internet"): ("get_accounts", "connect"),
    ("NFC", "Internet"): ("nfc_read_tag", "getContent"),
}

# exact travel-group matrix (criterion: five cells, nothing else)
TRAVEL_PLAN = (
    [("GPS", "Internet")] * 10
    + [("GPS", "SMS")] * 8
    + [("GPS", "Bluetooth")] * 3
    + [("Contacts", "SMS")] * 7
    + [("Contacts", "Bluetooth")] * 8
)
MESSAGING_PLAN = [("Contacts", "Internet")] * 9 + [("Contacts", "SMS")] * 3
FINANCE_PLAN = [("Accounts", "Internet")] * 10 + [("NFC", "Internet")] * 2


def make_description(rng: random.Random, vocab: list[str]) -> str:
    words = []
    for i in range(14):
        words.append(rng.choice(vocab))
        if i % 3 == 2:
            words.append(rng.choice(GLUE))
    return " ".join(words)


def make_program(rng: random.Random, flow: tuple[str, str]) -> str:
    source_api, sink_api = FLOWS[flow]
    style = rng.randrange(3)
    if style == 0:
        body = [f"x = source {source_api}", f"sink {sink_api}(x)"]
    elif style == 1:
        body = [
            f"x = source {source_api}",
            "y = assign(x)",
            f"sink {sink_api}(y)",
        ]
    else:
        body = [
            f"x = source {source_api}",
            "y = assign(x, x)",
            "z = assign(y)",
            f"sink {sink_api}(z)",
        ]
    lines = ["component Main public {"]
    lines += [f"    {stmt}" for stmt in body]
    lines.append("}")
    return "\n".join(lines)


def write_bundle(path: Path, app_id: str, category: str, description: str, program: str) -> None:
    text = (
        f"@id {app_id}\n"
        f"@category {category}\n"
        "@description\n"
        f"{description}\n"
        "@program\n"
        f"{program}\n"
    )
    path.write_text(text, encoding="utf-8")


def main() -> None:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent
    corpus_dir = root / "sample_corpus"
    trusted = corpus_dir / "trusted"
    aua = corpus_dir / "aua"
    trusted.mkdir(parents=True, exist_ok=True)
    aua.mkdir(parents=True, exist_ok=True)

    rng = random.Random(2024)
    plans = [
        ("travel", "Travel", TRAVEL_WORDS, TRAVEL_PLAN),
        ("messaging", "Communication", MESSAGING_WORDS, MESSAGING_PLAN),
        ("finance", "Finance", FINANCE_WORDS, FINANCE_PLAN),
    ]
    for prefix, category, vocab, plan in plans:
        for i, flow in enumerate(plan, 1):
            app_id = f"com.example.{prefix}{i:02d}"
            write_bundle(
                trusted / f"{prefix}{i:02d}.app",
                app_id,
                category,
                make_description(rng, vocab),
                make_program(rng, flow),
            )

    trip_desc = make_description(rng, TRAVEL_WORDS)
    trip_program = "\n".join(
        [
            "component Main public {",
            "    c = source read_contacts",
            "    sink send_sms(c)",
            "    send Uploader(c)",
            "    g = source read_gps",
            "    sink bt_send(g)",
            "}",
            "component Uploader private {",
            "    d = recv",
            "    sink openConnection(d)",
            "}",
        ]
    )
    write_bundle(aua / "trip_organizer.app", "com.example.triporganizer",
                 "Travel", trip_desc, trip_program)

    city_desc = make_description(rng, TRAVEL_WORDS)
    city_program = "\n".join(
        [
            "component Main public {",
            "    loc = source read_gps",
            "    sink openConnection(loc)",
            "}",
        ]
    )
    write_bundle(aua / "city_explorer.app", "com.example.cityexplorer",
                 "Travel", city_desc, city_program)

    n = len(list(trusted.glob("*.app"))) + len(list(aua.glob("*.app")))
    print(f"wrote {n} bundles under {corpus_dir}")


if __name__ == "__main__":
    main()
