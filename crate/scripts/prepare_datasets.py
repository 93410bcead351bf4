"""Convert the R `survival` package exports (pbc, colon, lung) into the
time/event/features CSV layout read by `smooth-rank`.

Usage: python3 scripts/prepare_datasets.py <dir with pbc.csv colon.csv lung.csv> <out dir>
"""
import csv
import sys
from pathlib import Path


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def cell(v):
    return "" if v in ("", "NA") else v


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def pbc(src, out):
    feats = ["trt", "age", "sex", "ascites", "hepato", "spiders", "edema", "bili",
             "chol", "albumin", "copper", "alk.phos", "ast", "trig", "platelet",
             "protime", "stage"]
    rows = []
    for r in read(src / "pbc.csv"):
        # status: 0 censored, 1 transplant (censored), 2 dead
        event = "1" if r["status"] == "2" else "0"
        vals = []
        for f in feats:
            v = cell(r[f])
            if f == "sex" and v:
                v = "1" if v == "f" else "0"
            vals.append(v)
        rows.append([r["time"], event] + vals)
    write(out / "pbc.csv", ["time", "event"] + feats, rows)


def colon(src, out):
    feats = ["rx", "sex", "age", "obstruct", "perfor", "adhere", "nodes", "differ",
             "extent", "surg", "node4"]
    rx_code = {"Obs": "0", "Lev": "1", "Lev+5FU": "2"}
    rows = []
    for r in read(src / "colon.csv"):
        if r["etype"] != "2":  # etype 2 = death, 1 = recurrence
            continue
        vals = []
        for f in feats:
            v = cell(r[f])
            if f == "rx":
                v = rx_code[v]
            vals.append(v)
        rows.append([r["time"], r["status"]] + vals)
    write(out / "colon.csv", ["time", "event"] + feats, rows)


def lung(src, out):
    feats = ["age", "sex", "ph.ecog", "ph.karno", "pat.karno", "meal.cal", "wt.loss"]
    rows = []
    for r in read(src / "lung.csv"):
        event = "1" if r["status"] == "2" else "0"
        rows.append([r["time"], event] + [cell(r[f]) for f in feats])
    write(out / "lung.csv", ["time", "event"] + feats, rows)


if __name__ == "__main__":
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    pbc(src, out)
    colon(src, out)
    lung(src, out)
