"""Derived analyses over datasets, minima and networks.

Includes pair-counting clustering comparison (Rand index and its
chance-adjusted form), ground-truth accuracy, the outlier structure-type
classification, per-class partition counts, superbasin decomposition and
the Shannon-entropy frustration profile.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dataset import Dataset


def _check_pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("label vectors must be 1-D and of equal length")
    if len(a) < 2:
        raise ValueError("need at least two points to compare clusterings")
    return a, b


def _contingency(a, b):
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    return table


def rand_index(a, b) -> float:
    """Fraction of point pairs on which two clusterings agree."""
    a, b = _check_pair(a, b)
    table = _contingency(a, b)
    n = len(a)
    total = n * (n - 1) // 2
    same_both = int((table * (table - 1) // 2).sum())
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    same_a = int((rows * (rows - 1) // 2).sum())
    same_b = int((cols * (cols - 1) // 2).sum())
    # pairs split in both clusterings = total - (same in a) - (same in b) + (same in both)
    diff_both = total - same_a - same_b + same_both
    return (same_both + diff_both) / total


def adjusted_rand_index(a, b) -> float:
    """Rand index adjusted so random labelings score approximately zero.

    The degenerate case where both partitions are trivial (index equals
    its expectation equals its maximum) returns 1: the partitions are
    identical.
    """
    a, b = _check_pair(a, b)
    table = _contingency(a, b)
    n = len(a)
    sum_cells = (table * (table - 1) // 2).sum()
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    sum_rows = (rows * (rows - 1) // 2).sum()
    sum_cols = (cols * (cols - 1) // 2).sum()
    total = n * (n - 1) // 2
    expected = sum_rows * sum_cols / total
    maximum = 0.5 * (sum_rows + sum_cols)
    if maximum == expected:
        return 1.0
    return float((sum_cells - expected) / (maximum - expected))


def accuracy(record, d: Dataset) -> float:
    """Chance-adjusted agreement with ground truth over original rows only."""
    if d.ground_truth is None:
        raise ValueError("dataset has no ground-truth labels")
    mask = d.original_mask
    return adjusted_rand_index(np.asarray(record.labels)[mask], d.ground_truth[mask])


@dataclass(frozen=True)
class StructureType:
    absorbed_count: int
    group_sizes: tuple
    canonical_id: int

    @property
    def total_outliers(self):
        return self.absorbed_count + sum(self.group_sizes)


def _partitions(m):
    """Integer partitions of m as ascending tuples."""
    if m == 0:
        return [()]
    out = []

    def rec(remaining, minimum, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for part in range(minimum, remaining + 1):
            rec(remaining - part, part, acc + [part])

    rec(m, 1, [])
    return out


@lru_cache(maxsize=None)
def enumerate_structure_types(n_outliers):
    """All structure types for a given outlier count, in canonical order.

    Ordered by the number of grouped outliers ascending (id 0 has every
    outlier absorbed into mixed clusters), then by group sizes in
    colexicographic order.
    """
    types = []
    for grouped in range(n_outliers + 1):
        parts = sorted(_partitions(grouped), key=lambda p: tuple(sorted(p, reverse=True)))
        for part in parts:
            types.append(
                StructureType(
                    absorbed_count=n_outliers - grouped,
                    group_sizes=part,
                    canonical_id=len(types),
                )
            )
    return tuple(types)


def structure_type(record, d: Dataset) -> StructureType:
    """Classify how a clustering accommodates the dataset's outliers.

    Clusters containing only outliers contribute their sizes as a group
    multiset; outliers sharing a cluster with any original point count as
    absorbed. The identity of individual outliers is ignored.
    """
    labels = np.asarray(record.labels)
    flags = d.outlier_flags
    outlier_clusters = set(np.unique(labels[flags])) if flags.any() else set()
    original_clusters = set(np.unique(labels[~flags]))
    pure = outlier_clusters - original_clusters
    group_sizes = tuple(sorted(int((labels[flags] == c).sum()) for c in pure))
    absorbed = int(flags.sum()) - sum(group_sizes)
    for st in enumerate_structure_types(int(flags.sum())):
        if st.absorbed_count == absorbed and st.group_sizes == group_sizes:
            return st
    raise AssertionError("unreachable: classification not in enumeration")


def partition_signature(record, d: Dataset, class_label) -> int:
    """Number of clusters holding at least one point of a ground-truth class."""
    if d.ground_truth is None:
        raise ValueError("dataset has no ground-truth labels")
    if d.label_names is not None and class_label in d.label_names:
        code = d.label_names.index(class_label)
    else:
        code = int(class_label)
        if code not in d.ground_truth:
            raise ValueError(f"unknown class {class_label!r}")
    mask = d.ground_truth == code
    return int(len(np.unique(np.asarray(record.labels)[mask])))


def superbasins(net, threshold) -> list:
    """Disjoint sets of minima mutually connected below a cost threshold.

    Union-find over transition states with cost strictly below the
    threshold; every minimum appears in exactly one set.
    """
    parent = {m: m for m in net.minima}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ts in net.transition_states.values():
        if ts.cost < threshold:
            a, b = ts.connected
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    groups = {}
    for m in net.minima:
        groups.setdefault(find(m), set()).add(m)
    return sorted(groups.values(), key=min)


@dataclass
class FrustrationProfile:
    temperatures: np.ndarray
    entropy: np.ndarray


def frustration_profile(net, t_grid) -> FrustrationProfile:
    """Shannon entropy of minima occupation across a temperature grid.

    Occupations are Boltzmann weights over minima costs with unit density
    of states. The entropy lies in [0, ln M] for M minima; at vanishing
    temperature it tends to the log-degeneracy of the lowest cost.
    """
    costs = np.array([rec.cost for rec in net.minima.values()], dtype=np.float64)
    if costs.size == 0:
        raise ValueError("network has no minima")
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if np.any(t_grid <= 0):
        raise ValueError("temperatures must be positive")
    delta = costs - costs.min()
    entropy = np.empty(len(t_grid))
    for i, t in enumerate(t_grid):
        logw = -delta / t
        z = np.exp(logw).sum()
        p = np.exp(logw) / z
        nz = p > 0
        entropy[i] = float(-(p[nz] * np.log(p[nz])).sum())
    return FrustrationProfile(temperatures=t_grid, entropy=entropy)


def minimum_cost_degeneracy(net, rel_tol=1e-12) -> int:
    costs = np.array([rec.cost for rec in net.minima.values()])
    lowest = costs.min()
    return int((costs <= lowest + rel_tol * (1.0 + abs(lowest))).sum())
