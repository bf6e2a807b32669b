#!/usr/bin/env python3
"""Download the Swiss banknote dataset (Flury & Riedwyl 1988) into data/.

The 200 x 6 table (length, left, right, bottom, top, diagonal; 100 genuine
and 100 counterfeit notes) is fetched from the Rdatasets mirror of the
mclust R package and written as data/banknote.csv plus
data/banknote_labels.csv (0 = counterfeit, 1 = genuine). Needs network
access; the acceptance suite skips the banknote workflow until these files
exist.
"""

import csv
import io
import sys
import urllib.request
from pathlib import Path

URL = "https://vincentarelbundock.github.io/Rdatasets/csv/mclust/banknote.csv"
FEATURES = ["Length", "Left", "Right", "Bottom", "Top", "Diagonal"]


def main() -> int:
    out_dir = Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(exist_ok=True)
    raw = urllib.request.urlopen(URL, timeout=60).read().decode("utf-8")
    reader = csv.DictReader(io.StringIO(raw))

    rows = []
    for record in reader:
        status = record["Status"].strip().lower()
        rows.append(([record[f] for f in FEATURES], 1 if status == "genuine" else 0))
    if len(rows) != 200:
        print(f"unexpected row count: {len(rows)}", file=sys.stderr)
        return 1

    with open(out_dir / "banknote.csv", "w", newline="") as f:
        f.write(",".join(f.lower() for f in FEATURES) + "\n")
        for values, _ in rows:
            f.write(",".join(values) + "\n")
    with open(out_dir / "banknote_labels.csv", "w", newline="") as f:
        f.write("row_index,label\n")
        for i, (_, label) in enumerate(rows):
            f.write(f"{i},{label}\n")
    print(f"wrote {out_dir / 'banknote.csv'} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
