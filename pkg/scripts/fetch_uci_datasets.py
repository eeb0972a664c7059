#!/usr/bin/env python3
"""Download and prepare the benchmark datasets the acceptance suite can use.

Four of the six benchmark tables are not bundled with any common Python
package, so they have to be fetched from the UCI repository on a
networked machine. This script normalizes each file to the layout the
test suite and CLI expect: comma-separated, feature columns first,
class label last, '?' marking missing cells, no header row.

Usage:
    python3 scripts/fetch_uci_datasets.py [--dest DIR]

The test suite looks for the files in <repo>/data by default; set
FLOCKCN_DATA_DIR to point somewhere else.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import urllib.request
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

# name -> (url, id columns to drop, label column index in the raw file)
SOURCES = {
    "soybean": (f"{BASE}/soybean/soybean-small.data", (), -1),
    "glass": (f"{BASE}/glass/glass.data", (0,), -1),
    "ionosphere": (f"{BASE}/ionosphere/ionosphere.data", (), -1),
    "breast": (f"{BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data", (0,), -1),
}


def fetch(url: str) -> list[list[str]]:
    print(f"  downloading {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        text = resp.read().decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    return [row for row in reader if row]


def prepare(name: str, dest: Path) -> Path:
    url, drop, label_idx = SOURCES[name]
    rows = fetch(url)
    out_rows = []
    for row in rows:
        label = row[label_idx].strip()
        keep = [
            cell.strip()
            for j, cell in enumerate(row)
            if j not in drop and j != label_idx % len(row)
        ]
        out_rows.append(keep + [label])
    path = dest / f"{name}.csv"
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(out_rows)
    print(f"  wrote {path} ({len(out_rows)} rows, {len(out_rows[0]) - 1} features + label)")
    return path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--dest",
        default=Path(__file__).resolve().parent.parent / "data",
        type=Path,
        help="output directory (default: <repo>/data)",
    )
    parser.add_argument(
        "--only", nargs="*", choices=sorted(SOURCES), default=None,
        help="fetch just these datasets",
    )
    args = parser.parse_args(argv)
    args.dest.mkdir(parents=True, exist_ok=True)

    names = args.only if args.only else sorted(SOURCES)
    failures = []
    for name in names:
        print(f"{name}:")
        try:
            prepare(name, args.dest)
        except OSError as exc:
            print(f"  failed: {exc}", file=sys.stderr)
            failures.append(name)
    if failures:
        print(f"could not fetch: {', '.join(failures)}", file=sys.stderr)
        return 1
    print("done")
    return 0


if __name__ == "__main__":
    sys.exit(main())
