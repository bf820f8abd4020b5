#!/usr/bin/env python3
"""Convert the japanese-personal-name-dataset CSVs into the raw name lists.

Usage:
    pip download japanese-personal-name-dataset==0.2.1 --no-deps -d /tmp/jpnd
    python3 -m zipfile -e /tmp/jpnd/*.whl /tmp/jpnd/pkg
    python3 tools/import_raw_names.py /tmp/jpnd/pkg/japanese_personal_name_dataset/dataset data/raw

Given-name files list one reading per line followed by every kanji spelling;
each spelling becomes its own row. Family names carry no gender.
"""

import argparse
import csv
import re
import sys
from pathlib import Path

ROMAJI = re.compile(r"^[a-z]+$")
HEADER = ["romaji", "hiragana", "kanji", "gender", "role"]


def given_rows(path, gender, skipped):
    with open(path, encoding="utf-8", newline="") as f:
        for fields in csv.reader(f):
            if len(fields) < 3 or not ROMAJI.match(fields[1]):
                skipped[path.name] = skipped.get(path.name, 0) + 1
                continue
            hiragana, romaji = fields[0], fields[1].capitalize()
            for kanji in fields[2:]:
                if kanji:
                    yield [romaji, hiragana, kanji, gender, "given"]


def family_rows(path, skipped):
    with open(path, encoding="utf-8", newline="") as f:
        for fields in csv.reader(f):
            if len(fields) != 4 or not ROMAJI.match(fields[3]) or not fields[0]:
                skipped[path.name] = skipped.get(path.name, 0) + 1
                continue
            kanji, _population, hiragana, romaji = fields
            yield [romaji.capitalize(), hiragana, kanji, "any", "family"]


def write(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HEADER)
        count = 0
        for row in rows:
            writer.writerow(row)
            count += 1
    return count


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("source", type=Path, help="dataset directory of the pip package")
    parser.add_argument("out", type=Path, help="output directory")
    args = parser.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    skipped = {}

    def givens():
        yield from given_rows(args.source / "first_name_woman_org.csv", "female", skipped)
        yield from given_rows(args.source / "first_name_man_org.csv", "male", skipped)

    n_given = write(args.out / "given_names.csv", givens())
    n_family = write(args.out / "family_names.csv", family_rows(args.source / "last_name_org.csv", skipped))
    print(f"given_names.csv: {n_given} rows")
    print(f"family_names.csv: {n_family} rows")
    for name, count in sorted(skipped.items()):
        print(f"skipped {count} malformed lines in {name}", file=sys.stderr)


if __name__ == "__main__":
    main()
