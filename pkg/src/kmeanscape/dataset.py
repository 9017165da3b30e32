"""Dataset loading, outlier appending and feature statistics.

A dataset is an immutable matrix of points plus optional ground-truth
labels (integer-coded) and a boolean flag per row marking appended
outliers. Outlier rows carry the ground-truth sentinel ``-1`` so that
accuracy metrics can exclude them.
"""

import csv
import hashlib
from dataclasses import dataclass, field

import numpy as np

OUTLIER_SENTINEL = -1


@dataclass(frozen=True)
class FeatureStats:
    mean: np.ndarray
    minimum: np.ndarray
    maximum: np.ndarray


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    feature_names: tuple
    ground_truth: np.ndarray | None = None
    label_names: tuple | None = None
    outlier_flags: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        points = np.ascontiguousarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ValueError("points must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        if len(self.feature_names) != points.shape[1]:
            raise ValueError("feature_names length mismatch")
        flags = self.outlier_flags
        if flags is None:
            flags = np.zeros(points.shape[0], dtype=bool)
        flags = np.asarray(flags, dtype=bool)
        if flags.shape != (points.shape[0],):
            raise ValueError("outlier_flags length mismatch")
        gt = self.ground_truth
        if gt is not None:
            gt = np.asarray(gt, dtype=np.int64)
            if gt.shape != (points.shape[0],):
                raise ValueError("ground_truth length mismatch")
            if np.any(gt[flags] != OUTLIER_SENTINEL):
                raise ValueError("outlier rows must carry the label sentinel")
        for arr in (points, flags) + ((gt,) if gt is not None else ()):
            arr.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "outlier_flags", flags)
        object.__setattr__(self, "ground_truth", gt)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if self.label_names is not None:
            object.__setattr__(self, "label_names", tuple(self.label_names))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def n_features(self):
        return self.points.shape[1]

    @property
    def n_outliers(self):
        return int(self.outlier_flags.sum())

    @property
    def original_mask(self):
        return ~self.outlier_flags

    def hash(self) -> str:
        h = hashlib.sha256()
        h.update(repr(self.points.shape).encode())
        h.update(self.points.tobytes())
        h.update(self.outlier_flags.tobytes())
        if self.ground_truth is not None:
            h.update(self.ground_truth.tobytes())
        h.update("|".join(self.feature_names).encode())
        return h.hexdigest()


def load_csv(path, label_column=None) -> Dataset:
    """Read a headered CSV of numeric features, optionally one label column.

    Raises ``FileNotFoundError`` for a missing file and ``ValueError`` for
    ragged rows, non-numeric feature cells or an unknown label column.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows = [r for r in reader if r]

    header = [h.strip() for h in header]
    if label_column is not None and label_column not in header:
        raise ValueError(f"{path}: unknown label column {label_column!r}")
    label_idx = header.index(label_column) if label_column is not None else None
    feature_names = [h for i, h in enumerate(header) if i != label_idx]

    points = []
    raw_labels = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
        feats = []
        for i, cell in enumerate(row):
            if i == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                feats.append(float(cell))
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: non-numeric value {cell!r} in column {header[i]!r}"
                ) from None
        points.append(feats)
    if not points:
        raise ValueError(f"{path}: no data rows")

    ground_truth = None
    label_names = None
    if label_idx is not None:
        names = []
        codes = []
        index = {}
        for lab in raw_labels:
            if lab not in index:
                index[lab] = len(names)
                names.append(lab)
            codes.append(index[lab])
        ground_truth = np.array(codes, dtype=np.int64)
        label_names = tuple(names)

    return Dataset(
        points=np.array(points, dtype=np.float64),
        feature_names=tuple(feature_names),
        ground_truth=ground_truth,
        label_names=label_names,
    )


def load_outlier_csv(path, n_features) -> np.ndarray:
    """Read a headerless CSV of outlier feature rows."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    out = []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != n_features:
            raise ValueError(f"{path}:{lineno}: expected {n_features} features, got {len(row)}")
        out.append([float(c) for c in row])
    return np.array(out, dtype=np.float64).reshape(len(out), n_features)


def append_outliers(d: Dataset, rows) -> Dataset:
    """Return a new dataset with outlier rows appended and flagged."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.size == 0:
        return d
    rows = np.atleast_2d(rows)
    if rows.shape[1] != d.n_features:
        raise ValueError(f"outlier rows have {rows.shape[1]} features, expected {d.n_features}")
    gt = None
    if d.ground_truth is not None:
        gt = np.concatenate([d.ground_truth, np.full(len(rows), OUTLIER_SENTINEL, dtype=np.int64)])
    return Dataset(
        points=np.vstack([d.points, rows]),
        feature_names=d.feature_names,
        ground_truth=gt,
        label_names=d.label_names,
        outlier_flags=np.concatenate([d.outlier_flags, np.ones(len(rows), dtype=bool)]),
    )


def feature_stats(d: Dataset, original_only=False) -> FeatureStats:
    pts = d.points[d.original_mask] if original_only else d.points
    if pts.shape[0] == 0:
        raise ValueError("no original rows to summarise")
    return FeatureStats(mean=pts.mean(axis=0), minimum=pts.min(axis=0), maximum=pts.max(axis=0))
