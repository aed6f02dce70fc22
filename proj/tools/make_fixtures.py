#!/usr/bin/env python3
"""Regenerates the synthetic datasets under data/.

The files are committed; rerunning this script reproduces them exactly.
"""
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"


def write_svmlight(path, X, y):
    with open(path, "w") as f:
        for row, label in zip(X, y):
            feats = " ".join(f"{j + 1}:{v:.17g}" for j, v in enumerate(row) if v != 0.0)
            f.write(f"{int(label)} {feats}\n")


def write_csv(path, X, y, names):
    with open(path, "w") as f:
        f.write(",".join(names + ["label"]) + "\n")
        for row, label in zip(X, y):
            f.write(",".join(f"{v:.17g}" for v in row) + f",{int(label)}\n")


def blob_separable(rng):
    # Tight positive blob (sigma = 0.1) and negatives at 10 sigma from its centre.
    d, sigma = 2, 0.1
    pos = rng.normal(0.0, sigma, size=(800, d))
    dirs = rng.normal(size=(400, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    neg = 10.0 * sigma * dirs + rng.normal(0.0, sigma, size=(400, d))
    X = np.vstack([pos, neg])
    y = np.array([1] * len(pos) + [0] * len(neg))
    perm = rng.permutation(len(y))
    return X[perm], y[perm]


def mixture(rng, n_pos, n_neg, d):
    centres = rng.uniform(-1.0, 1.0, size=(3, d))
    which = rng.integers(0, 3, size=n_pos)
    pos = centres[which] + rng.normal(0.0, 0.25, size=(n_pos, d))
    neg = rng.uniform(-3.0, 3.0, size=(n_neg, d))
    X = np.vstack([pos, neg])
    y = np.array([1] * n_pos + [-1] * n_neg)
    perm = rng.permutation(len(y))
    return X[perm], y[perm]


def main():
    rng = np.random.default_rng(20240611)
    OUT.mkdir(exist_ok=True)

    X, y = blob_separable(rng)
    write_svmlight(OUT / "blob_separable.svm", X, y)

    X, y = mixture(rng, 500, 150, 4)
    write_svmlight(OUT / "mixture500.svm", X, y)

    X, y = mixture(rng, 240, 80, 6)
    write_svmlight(OUT / "mixture240.svm", X, y)

    X, y = mixture(rng, 60, 20, 2)
    write_csv(OUT / "small.csv", X, y, ["x1", "x2"])


if __name__ == "__main__":
    main()
