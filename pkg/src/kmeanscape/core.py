"""Cost function, nearest-centre assignment and local minimisation.

The cost of a clustering is the sum of squared Euclidean distances from
each point to the centre of its assigned cluster. A valid local minimum
is a fixed point of the alternating scheme: every centre sits at the mean
of its members and every point is assigned to its nearest centre (ties
broken towards the lowest cluster index), with no cluster empty.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError

TOL_FP = 1e-8
MAX_ITER = 10_000


def assign(points, centres):
    """Nearest-centre labels; equidistant points go to the lowest index."""
    return kernels.assign(points, centres)


def cost(points, centres, labels) -> float:
    """Sum of squared distances to the assigned centres."""
    return kernels.cost(points, centres, labels)


def cost_gradient(points, centres, labels):
    """Gradient of the cost in the centres at a frozen assignment.

    Row k is ``2 * sum_{i in k} (centre_k - x_i)``; clusters without
    members get zero rows.
    """
    return kernels.cost_and_grad(points, centres, labels)[1]


def sample_uniform_start(d, k, rng_seed):
    """Draw centres uniformly inside the per-feature range of the dataset.

    ``rng_seed`` may be an int or a sequence of ints; the stream is the
    named, portable NumPy default (PCG64).
    """
    points = d.points if hasattr(d, "points") else np.asarray(d, dtype=np.float64)
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    rng = np.random.default_rng(rng_seed)
    return rng.uniform(lo, hi, size=(int(k), points.shape[1]))


def canonical_key(labels) -> tuple:
    """Relabel clusters by first occurrence; permutation-invariant key."""
    labels = np.asarray(labels)
    mapping = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        lab = int(lab)
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return tuple(out.tolist())


@dataclass
class MinimumCandidate:
    """Outcome of one local minimisation; may be invalid (empty cluster)."""

    centres: np.ndarray
    labels: np.ndarray
    cost: float
    converged: bool
    empty_cluster: bool

    @property
    def valid(self):
        return self.converged and not self.empty_cluster


def local_minimize(points, start, max_iter=MAX_ITER, tol_fp=TOL_FP) -> MinimumCandidate:
    """Descend to a fixed point of the alternating minimisation.

    Alternates nearest-centre assignment with exact minimisation of the
    cost at the frozen assignment (each populated centre moves to its
    member mean, which is the converged quasi-Newton step for this
    quadratic; empty clusters keep their position). Stops when the
    assignment repeats. The cost is checked to be non-increasing across
    every step; a rise beyond rounding noise raises ``ConvergenceError``.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    mu = np.array(start, dtype=np.float64, copy=True)
    if mu.ndim != 2 or mu.shape[1] != points.shape[1]:
        raise ValueError("start centres have wrong shape")
    if not np.all(np.isfinite(mu)):
        raise ValueError("start centres must be finite")
    k = mu.shape[0]

    labels = kernels.assign(points, mu)
    j = kernels.cost(points, mu, labels)
    slack = 1e-12
    for _ in range(max_iter):
        sums, counts = kernels.cluster_sums(points, labels, k)
        populated = counts > 0
        mu[populated] = sums[populated] / counts[populated, None]
        j_mean = kernels.cost(points, mu, labels)
        if j_mean > j + slack * (1.0 + j):
            raise ConvergenceError("cost rose across a mean update")

        new_labels = kernels.assign(points, mu)
        j_new = kernels.cost(points, mu, new_labels)
        if j_new > j_mean + slack * (1.0 + j_mean):
            raise ConvergenceError("cost rose across an assignment update")
        if np.array_equal(new_labels, labels):
            j = j_new
            break
        labels, j = new_labels, j_new
    else:
        return MinimumCandidate(mu, labels, j, converged=False, empty_cluster=False)

    counts = np.bincount(labels, minlength=k)
    empty = bool((counts == 0).any())
    if not empty:
        grad = cost_gradient(points, mu, labels)
        if np.linalg.norm(grad) >= tol_fp * (1.0 + j):
            return MinimumCandidate(mu, labels, j, converged=False, empty_cluster=False)
    return MinimumCandidate(mu, labels, j, converged=True, empty_cluster=empty)


def canonicalize(centres, labels):
    """Return (centres, labels) with clusters renumbered by first occurrence.

    Only valid when every cluster has members, so the permutation is total.
    """
    labels = np.asarray(labels, dtype=np.int64)
    key = canonical_key(labels)
    order = {}
    for old, new in zip(labels.tolist(), key):
        order[new] = old
    perm = [order[new] for new in range(len(order))]
    return np.asarray(centres)[perm], np.array(key, dtype=np.int64)
