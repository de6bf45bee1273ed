"""Readers for the files the plotting side consumes.

Figures themselves are not rendered here; these functions return plain
Python data that any plotting library can take.
"""

import csv
import json
from pathlib import Path


def read_series_csv(path):
    """series/*.csv -> (meta dict, [(parameter, value), ...])."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError(f"{path}: missing '# {{json}}' header")
    meta = json.loads(lines[0][2:])
    rows = list(csv.reader(lines[1:]))
    if not rows or len(rows[0]) != 2 or rows[0][1] != "value":
        raise ValueError(f"{path}: expected '<parameter>,value' header")
    meta.setdefault("parameter", rows[0][0])
    return meta, [(float(a), float(b)) for a, b in rows[1:]]


def read_report(run_dir):
    """report.json of a diagnosed run, or sweep_report.json of a sweep."""
    d = Path(run_dir)
    for name in ("report.json", "sweep_report.json"):
        if (d / name).exists():
            return json.loads((d / name).read_text())
    raise FileNotFoundError(f"no report in {d}")


def read_record_csv(path):
    """record.csv -> (meta dict, columns dict of float lists)."""
    with open(path) as f:
        first = f.readline()
        if not first.startswith("# "):
            raise ValueError(f"{path}: missing '# {{json}}' header")
        meta = json.loads(first[2:])
        reader = csv.DictReader(f)
        cols = {k: [] for k in reader.fieldnames}
        for row in reader:
            for k, v in row.items():
                cols[k].append(float(v))
    return meta, cols


def decay_slope(report, item="decay"):
    """Fitted exponent of a report item, what a decay figure would annotate."""
    for it in report["items"]:
        if it["name"] == item:
            return it["metrics"]["exponent"]
    raise KeyError(item)
