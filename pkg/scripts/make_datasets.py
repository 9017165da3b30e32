#!/usr/bin/env python3
"""Regenerate the CSV files under data/.

Iris comes from scikit-learn's bundled copy, patched back to the exact
variant hosted in the UCI repository (rows 35 and 38 of the UCI file
differ from Fisher's original publication; the UCI variant is the one
whose per-feature means round to 5.84 / 3.05 / 3.76 / 1.20).

The outlier coordinate files are fixed inputs, written verbatim.

The glass identification dataset (UCI id 42) cannot be bundled here
because this build environment has no access to it; place it at
data/glass.csv with header RI,Na,Mg,Al,Si,K,Ca,Ba,Fe,type to enable the
glass-based tests.
"""

import csv
import pathlib

import numpy as np
from sklearn.datasets import load_iris

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"

IRIS_UCI_PATCHES = {34: (4.9, 3.1, 1.5, 0.1), 37: (4.9, 3.1, 1.5, 0.1)}

IRIS_OUTLIERS = [
    (9.6, 6.0, 5.0, 4.0),
    (2.0, 0.1, 0.1, 2.5),
    (6.0, 7.0, 0.1, 4.0),
    (1.0, 4.0, 8.0, 0.5),
]

GLASS_OUTLIERS = [
    (1.3, 5.0, 7.0, 6.0, 60.0, 9.0, 2.0, 5.0, 3.0),
    (1.7, 23.0, 7.0, 7.0, 90.0, 9.0, 21.0, 5.0, 4.0),
    (1.8, 4.0, 8.0, 7.0, 85.0, 9.0, 1.0, 5.0, 4.0),
]


def write_iris():
    iris = load_iris()
    x = iris.data.copy()
    for row, values in IRIS_UCI_PATCHES.items():
        x[row] = values
    names = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
    species = np.array(iris.target_names)[iris.target]
    with open(DATA / "iris.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["species"])
        for row, label in zip(x, species):
            w.writerow([f"{v:.1f}" for v in row] + [label])


def write_outliers(name, rows):
    with open(DATA / name, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in rows:
            w.writerow([f"{v:.1f}" for v in row])


if __name__ == "__main__":
    write_iris()
    write_outliers("iris_outliers.csv", IRIS_OUTLIERS)
    write_outliers("glass_outliers.csv", GLASS_OUTLIERS)
    print("wrote", sorted(p.name for p in DATA.glob("*.csv")))
