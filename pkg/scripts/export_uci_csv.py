"""Write the UCI classification datasets bundled with scikit-learn as plain CSV.

Run once from the repo root: ``python scripts/export_uci_csv.py``. The files are
checked in under ``data/`` so the package itself never needs scikit-learn.
"""
import csv
import re
from pathlib import Path

from sklearn import datasets

LOADERS = {
    "iris": datasets.load_iris,
    "wine": datasets.load_wine,
    "breast_cancer": datasets.load_breast_cancer,
}


def _column(name):
    return re.sub(r"[^0-9a-z]+", "_", name.lower()).strip("_")


def main(out_dir="data"):
    out = Path(out_dir)
    out.mkdir(exist_ok=True)
    for name, loader in LOADERS.items():
        bunch = loader()
        header = [_column(f) for f in bunch.feature_names] + ["label"]
        with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row, label in zip(bunch.data, bunch.target):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])
        print(f"wrote {name}: {bunch.data.shape}")


if __name__ == "__main__":
    main()
