#!/usr/bin/env python3
"""Fetch the UCI one-class benchmark datasets and write them as CSV.

Every output file has a header row, one numeric column per attribute and a
final ``label`` column holding ``target`` or ``outlier``.  The benchmark
harness reads these files with ``--target-label target``.

Sources are tried in order:

1. ``--raw-dir``: a directory holding the original UCI files (as downloaded
   by hand from the URLs below).
2. The UCI repository itself (needs network access).
3. Python wheels on PyPI that vendor copies of some of the same files
   (``common_datasets``, ``keel-ds``).  These are used only when the UCI
   download is unavailable.

Target-class choices (which class is "target") are documented per dataset in
``DATASETS``.  Where the original class counts allow it, the class whose size
matches the published one-class benchmark table is used as target; otherwise
the natural "positive/anomalous" class is chosen.

Usage:
    python3 scripts/fetch_uci.py --out data/uci [--only glass,breast_cancer]
"""

import argparse
import csv
import hashlib
import io
import re
import os
import sys
import urllib.parse
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

# (project, version, sha256 of the wheel)
PYPI_WHEELS = {
    "common_datasets": ("common_datasets", "0.3.10",
                        "6e2a68ee16b29ea071c3c7a14c1ae36509c14adcdac342ea6af82859c82d6bc4"),
    "keel_ds": ("keel-ds", "0.2.5",
                "79faf1bd2f3ac2082d16eb9c8c49b2b1a60a5182e94464c5d32c7c642ea9650e"),
}


def _mean_impute(rows):
    """Replace '?' cells with the column mean of the observed values."""
    ncol = len(rows[0])
    means = []
    for j in range(ncol):
        vals = [float(r[j]) for r in rows if r[j] != "?"]
        means.append(sum(vals) / len(vals) if vals else 0.0)
    return [[means[j] if r[j] == "?" else float(r[j]) for j in range(ncol)] for r in rows]


def _split_lines(text, sep=","):
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@") or line.startswith("#"):
            continue
        out.append([c.strip() for c in line.split(sep)])
    return out


# --- per-dataset parsers: raw text -> (feature_names, features, is_target) ---


def parse_glass(text):
    # 214 rows: Id, RI, Na, Mg, Al, Si, K, Ca, Ba, Fe, Type.
    # Target: Type 1 (building windows, float processed; 70 samples).
    # All ten non-class attributes are kept, including the Id column, which
    # is the attribute count listed for Glass in the published table.
    rows = _split_lines(text)
    names = ["id", "ri", "na", "mg", "al", "si", "k", "ca", "ba", "fe"]
    feats = [[float(v) for v in r[:10]] for r in rows]
    target = [r[10] == "1" for r in rows]
    return names, feats, target


def parse_breast_wisconsin(text, has_id=True):
    # Breast Cancer Wisconsin (Original): 9 integer attributes, class 2
    # (benign) or 4 (malignant).  Rows with missing values are dropped.
    # Target: malignant (the minority class, as in the published table where
    # N_target < N_outliers).
    rows = [r for r in _split_lines(text) if "?" not in r]
    if has_id:
        rows = [r[1:] for r in rows]
    names = [
        "clump_thickness", "cell_size", "cell_shape", "marginal_adhesion",
        "epithelial_size", "bare_nuclei", "bland_chromatin",
        "normal_nucleoli", "mitoses",
    ]
    feats = [[float(v) for v in r[:9]] for r in rows]
    target = [r[9] == "4" for r in rows]
    return names, feats, target


def parse_parkinsons(text):
    # name, 22 voice measures, status (1 = Parkinson's).  Target: status 1.
    lines = [l for l in text.splitlines() if l.strip()]
    header = lines[0].split(",")
    idx_status = header.index("status")
    names = [h for i, h in enumerate(header) if i not in (0, idx_status)]
    feats, target = [], []
    for line in lines[1:]:
        cells = line.split(",")
        feats.append([float(c) for i, c in enumerate(cells) if i not in (0, idx_status)])
        target.append(cells[idx_status].strip() == "1")
    return names, feats, target


def parse_sonar(text):
    # 60 energy bands, class M (mine, 111) or R (rock, 97).  Target: M.
    rows = _split_lines(text)
    names = [f"band_{i}" for i in range(60)]
    feats = [[float(v) for v in r[:60]] for r in rows]
    target = [r[60] == "M" for r in rows]
    return names, feats, target


def parse_heart(text, sep=" "):
    # Statlog heart: 13 attributes, class 1 (absent) or 2 (present).
    # Target: presence (120 samples).
    rows = _split_lines(text, sep) if sep != "," else _split_lines(text)
    rows = [[c for c in r if c] for r in rows]
    names = [f"a{i}" for i in range(13)]
    feats = [[float(v) for v in r[:13]] for r in rows]
    target = [r[13] == "2" for r in rows]
    return names, feats, target


def parse_hepatitis(text):
    # Class first (1 = DIE, 2 = LIVE), 19 attributes with '?' for missing
    # values, which are mean-imputed here.  Target: LIVE (123 samples).
    rows = _split_lines(text)
    cls = [r[0] for r in rows]
    feats = _mean_impute([r[1:] for r in rows])
    names = [f"a{i}" for i in range(19)]
    return names, feats, [c == "2" for c in cls]


def parse_blood(text):
    # Recency, Frequency, Monetary, Time, donated-in-March (1 = yes, 178).
    # Target: donated.
    lines = [l for l in text.splitlines() if l.strip()][1:]
    rows = [l.split(",") for l in lines]
    names = ["recency", "frequency", "monetary", "time"]
    feats = [[float(v) for v in r[:4]] for r in rows]
    target = [r[4].strip() == "1" for r in rows]
    return names, feats, target


def parse_wholesale(text):
    # Channel (1 = Horeca 298, 2 = Retail 142), Region, six spending columns.
    # Target: Channel 1; the Region column is kept as an attribute (7 total).
    lines = [l for l in text.splitlines() if l.strip()]
    rows = [l.split(",") for l in lines[1:]]
    names = [h.strip().lower() for h in lines[0].split(",")[1:]]
    feats = [[float(v) for v in r[1:]] for r in rows]
    target = [r[0].strip() == "1" for r in rows]
    return names, feats, target


def parse_climate(text):
    # Climate model simulation crashes: Study, Run, 18 parameters, outcome
    # (0 = failure, 46 samples).  Target: success (outcome 1).
    lines = [l for l in text.splitlines() if l.strip()]
    rows = [l.split() for l in lines[1:]]
    names = lines[0].split()[2:-1]
    feats = [[float(v) for v in r[2:-1]] for r in rows]
    target = [r[-1] == "1" for r in rows]
    return names, feats, target


def parse_qsar(text):
    # 41 molecular descriptors; class RB (ready biodegradable, 356) or NRB.
    # Target: RB.
    rows = _split_lines(text, ";")
    names = [f"d{i}" for i in range(41)]
    feats = [[float(v) for v in r[:41]] for r in rows]
    target = [r[41] == "RB" for r in rows]
    return names, feats, target


DATASETS = {
    "glass": {
        "uci": f"{UCI}/glass/glass.data",
        "raw": "glass.data",
        "parse": parse_glass,
        "mirror": ("common_datasets", "common_datasets/data/classification/glass/glass.data.txt", parse_glass),
    },
    "breast_cancer": {
        "uci": f"{UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
        "raw": "breast-cancer-wisconsin.data",
        "parse": parse_breast_wisconsin,
        "mirror": ("keel_ds", "keel_ds/data/balanced/raw/wisconsin.dat",
                   lambda t: parse_breast_wisconsin(t, has_id=False)),
    },
    "parkinsons": {
        "uci": f"{UCI}/parkinsons/parkinsons.data",
        "raw": "parkinsons.data",
        "parse": parse_parkinsons,
        "mirror": None,
    },
    "sonar": {
        "uci": f"{UCI}/undocumented/connectionist-bench/sonar/sonar.all-data",
        "raw": "sonar.all-data",
        "parse": parse_sonar,
        "mirror": ("keel_ds", "keel_ds/data/balanced/raw/sonar.dat", parse_sonar),
    },
    "heart": {
        "uci": f"{UCI}/statlog/heart/heart.dat",
        "raw": "heart.dat",
        "parse": parse_heart,
        "mirror": ("keel_ds", "keel_ds/data/balanced/raw/heart.dat",
                   lambda t: parse_heart(t, sep=",")),
    },
    "hepatitis": {
        "uci": f"{UCI}/hepatitis/hepatitis.data",
        "raw": "hepatitis.data",
        "parse": parse_hepatitis,
        "mirror": ("common_datasets", "common_datasets/data/classification/hepatitis/hepatitis.data.txt",
                   parse_hepatitis),
    },
    "blood_transfusion": {
        "uci": f"{UCI}/blood-transfusion/transfusion.data",
        "raw": "transfusion.data",
        "parse": parse_blood,
        "mirror": None,
    },
    "wholesale": {
        "uci": f"{UCI}/00292/Wholesale%20customers%20data.csv",
        "raw": "Wholesale customers data.csv",
        "parse": parse_wholesale,
        "mirror": None,
    },
    "climate": {
        "uci": f"{UCI}/00252/pop_failures.dat",
        "raw": "pop_failures.dat",
        "parse": parse_climate,
        "mirror": None,
    },
    "qsar_biodeg": {
        "uci": f"{UCI}/00254/biodeg.csv",
        "raw": "biodeg.csv",
        "parse": parse_qsar,
        "mirror": None,
    },
}


def _download(url, timeout=30):
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


_wheel_cache = {}


def _wheel_url(project, version, sha256):
    index = f"https://pypi.org/simple/{project}/"
    page = _download(index).decode("utf-8")
    for href in re.findall(r'href="([^"]+)"', page):
        path, _, digest = href.partition("#sha256=")
        if path.endswith(".whl") and digest == sha256:
            return urllib.parse.urljoin(index, path)
    raise RuntimeError(f"no wheel with sha256 {sha256} for {project} {version}")


def _from_wheel(pkg, member):
    if pkg not in _wheel_cache:
        project, version, sha256 = PYPI_WHEELS[pkg]
        blob = _download(_wheel_url(project, version, sha256), timeout=120)
        if hashlib.sha256(blob).hexdigest() != sha256:
            raise RuntimeError(f"checksum mismatch for {project} {version}")
        _wheel_cache[pkg] = zipfile.ZipFile(io.BytesIO(blob))
    return _wheel_cache[pkg].read(member).decode("utf-8")


def fetch(name, spec, raw_dir):
    if raw_dir:
        path = os.path.join(raw_dir, spec["raw"])
        if os.path.exists(path):
            with open(path, encoding="utf-8") as f:
                return spec["parse"](f.read()), f"local file {path}"
    try:
        text = _download(spec["uci"]).decode("utf-8")
        return spec["parse"](text), spec["uci"]
    except Exception as err:  # noqa: BLE001
        uci_err = err
    if spec["mirror"] is not None:
        pkg, member, parse = spec["mirror"]
        try:
            return parse(_from_wheel(pkg, member)), f"PyPI wheel {pkg}:{member}"
        except Exception as err:  # noqa: BLE001
            raise RuntimeError(f"{name}: UCI failed ({uci_err}); mirror failed ({err})")
    raise RuntimeError(f"{name}: UCI download failed ({uci_err}) and no mirror is known")


def write_csv(path, names, feats, target):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(names + ["label"])
        for row, t in zip(feats, target):
            w.writerow([repr(float(v)) if not float(v).is_integer() else str(int(v)) for v in row]
                       + ["target" if t else "outlier"])


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="data/uci")
    ap.add_argument("--raw-dir", default=None)
    ap.add_argument("--only", default=None, help="comma-separated dataset names")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    names = args.only.split(",") if args.only else list(DATASETS)
    failed = []
    for name in names:
        spec = DATASETS[name]
        try:
            (cols, feats, target), source = fetch(name, spec, args.raw_dir)
        except RuntimeError as err:
            print(f"skip {err}", file=sys.stderr)
            failed.append(name)
            continue
        path = os.path.join(args.out, f"{name}.csv")
        write_csv(path, cols, feats, target)
        n_t = sum(target)
        print(f"{name}: {len(feats)} rows ({n_t} target, {len(feats) - n_t} outlier), "
              f"{len(cols)} attributes <- {source}")
    if failed:
        print("missing: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
