"""Transition states between clusterings via penalty-surrogate searches.

A transition state here is the minimum of the intersection seam between
the two quadratic cost surfaces defined by assignments differing in a
single point. It is found by minimising a surrogate that adds a penalty
growing with the cost difference of the two assignments; the downhill
direction is read off the subtracted-penalty surface, whose curvature is
negative across the seam.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .errors import (
    ConvergenceError,
    NoNegativeCurvatureError,
    RefinementBudgetError,
    SelfConnectionError,
)
from .core import assign, local_minimize
from .optim import minimize_lbfgs

log = logging.getLogger(__name__)

TOL_SEAM = 1e-3
HESSIAN_STEP = 1e-4
MAX_IMAGES = 2**14 + 1  # refinement cap: at most 2**14 segments
MIN_SEGMENT_WIDTH = 2.0**-40  # below this, crossings are treated as simultaneous


@dataclass(frozen=True)
class SurrogateParams:
    sigma: float = 30.0
    alpha: float = 0.02

    def __post_init__(self):
        if self.sigma <= 0 or self.alpha <= 0:
            raise ValueError("sigma and alpha must be positive")


@dataclass
class MecpResult:
    centres: np.ndarray
    cost: float  # mean of the two fixed-assignment costs
    j1: float
    j2: float
    seam_gap: float
    sigma_used: float
    n_iter: int


class _AssignmentPair:
    """Cost/gradient evaluation for two assignments sharing most labels.

    The second cost is obtained from the first by correcting only the
    points whose label differs, which keeps surrogate evaluations at the
    cost of a single fixed-assignment sweep.
    """

    def __init__(self, points, labels_a, labels_b):
        self.points = np.ascontiguousarray(points, dtype=np.float64)
        self.labels_a = np.ascontiguousarray(labels_a, dtype=np.int64)
        self.labels_b = np.ascontiguousarray(labels_b, dtype=np.int64)
        self.diff = np.flatnonzero(self.labels_a != self.labels_b)
        if len(self.diff) == 0:
            raise ValueError("assignments are identical")

    def costs(self, centres):
        j1 = kernels.cost(self.points, centres, self.labels_a)
        j2 = j1
        for i in self.diff:
            xa = self.points[i] - centres[self.labels_a[i]]
            xb = self.points[i] - centres[self.labels_b[i]]
            j2 += xb.dot(xb) - xa.dot(xa)
        return j1, j2

    def costs_and_grads(self, centres):
        j1, g1 = kernels.cost_and_grad(self.points, centres, self.labels_a)
        j2 = j1
        g2 = g1.copy()
        for i in self.diff:
            la, lb = self.labels_a[i], self.labels_b[i]
            da = centres[la] - self.points[i]
            db = centres[lb] - self.points[i]
            j2 += db.dot(db) - da.dot(da)
            g2[la] -= 2.0 * da
            g2[lb] += 2.0 * db
        return j1, j2, g1, g2


def _penalty(d, params):
    s = abs(d)
    return params.sigma * d * d / (s + params.alpha)


def _penalty_deriv(d, params):
    s = abs(d)
    return params.sigma * d * (s + 2.0 * params.alpha) / (s + params.alpha) ** 2


def f_plus(points, centres, labels_a, labels_b, params) -> float:
    """Surrogate whose minimum approximates the seam minimum."""
    pair = _AssignmentPair(points, labels_a, labels_b)
    j1, j2 = pair.costs(np.asarray(centres, dtype=np.float64))
    return 0.5 * (j1 + j2) + _penalty(j1 - j2, params)


def f_minus(points, centres, labels_a, labels_b, params) -> float:
    """Surrogate with the penalty subtracted; negative curvature across the seam."""
    pair = _AssignmentPair(points, labels_a, labels_b)
    j1, j2 = pair.costs(np.asarray(centres, dtype=np.float64))
    return 0.5 * (j1 + j2) - _penalty(j1 - j2, params)


def f_plus_grad(points, centres, labels_a, labels_b, params):
    """Analytic gradient of the added-penalty surrogate in the centres."""
    pair = _AssignmentPair(points, labels_a, labels_b)
    j1, j2, g1, g2 = pair.costs_and_grads(np.asarray(centres, dtype=np.float64))
    return 0.5 * (g1 + g2) + _penalty_deriv(j1 - j2, params) * (g1 - g2)


def locate_mecp(
    points,
    labels_a,
    labels_b,
    start,
    params=SurrogateParams(),
    tol_seam=TOL_SEAM,
    gtol_rel=1e-8,
    max_iter=3000,
    sigma_retries=3,
):
    """Minimise the surrogate from ``start``; None when no seam minimum is found.

    Success requires both optimiser convergence and a cost difference
    between the two assignments below ``tol_seam``. On failure the search
    resumes from the current point with the penalty strength doubled, up
    to ``sigma_retries`` times.
    """
    labels_a = np.asarray(labels_a, dtype=np.int64)
    labels_b = np.asarray(labels_b, dtype=np.int64)
    if not effective_single_change(points, labels_a, labels_b):
        n_diff = int((labels_a != labels_b).sum())
        raise ValueError(f"assignments must differ in exactly one data location, got {n_diff}")
    pair = _AssignmentPair(points, labels_a, labels_b)
    shape = np.asarray(start).shape
    x = np.asarray(start, dtype=np.float64).ravel().copy()

    sigma = params.sigma
    total_iter = 0
    for attempt in range(sigma_retries + 1):
        p = SurrogateParams(sigma=sigma, alpha=params.alpha)

        def fun(flat, _p=p):
            mu = flat.reshape(shape)
            j1, j2, g1, g2 = pair.costs_and_grads(mu)
            d = j1 - j2
            f = 0.5 * (j1 + j2) + _penalty(d, _p)
            g = 0.5 * (g1 + g2) + _penalty_deriv(d, _p) * (g1 - g2)
            return f, g.ravel()

        res = minimize_lbfgs(fun, x, gtol_rel=gtol_rel, max_iter=max_iter)
        total_iter += res.n_iter
        x = res.x
        mu = x.reshape(shape)
        j1, j2 = pair.costs(mu)
        gap = abs(j1 - j2)
        if res.converged and gap <= tol_seam:
            return MecpResult(
                centres=mu.copy(),
                cost=0.5 * (j1 + j2),
                j1=j1,
                j2=j2,
                seam_gap=gap,
                sigma_used=sigma,
                n_iter=total_iter,
            )
        sigma *= 2.0
    return None


def _fd_hessian(fun, x, rel_step=HESSIAN_STEP):
    """Central-difference Hessian with per-coordinate steps."""
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    h = rel_step * (1.0 + np.abs(x))
    hess = np.empty((d, d))
    f0 = fun(x)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        fp = fun(x + ei)
        fm = fun(x - ei)
        hess[i, i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i])
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = h[j]
            fpp = fun(x + ei + ej)
            fpm = fun(x + ei - ej)
            fmp = fun(x - ei + ej)
            fmm = fun(x - ei - ej)
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j])
    return hess


def downhill_eigenvector(points, mecp_centres, labels_a, labels_b, params=SurrogateParams()):
    """Unit direction of most negative curvature of the subtracted surrogate.

    Raises ``NoNegativeCurvatureError`` when the Hessian has no negative
    eigenvalue, which marks the crossing point as invalid.
    """
    pair = _AssignmentPair(points, labels_a, labels_b)
    mu0 = np.asarray(mecp_centres, dtype=np.float64)
    shape = mu0.shape

    def fun(flat):
        j1, j2 = pair.costs(flat.reshape(shape))
        return 0.5 * (j1 + j2) - _penalty(j1 - j2, params)

    hess = _fd_hessian(fun, mu0.ravel())
    eigvals, eigvecs = np.linalg.eigh(hess)
    if eigvals[0] >= 0.0:
        raise NoNegativeCurvatureError(f"lowest eigenvalue {eigvals[0]:.3e} is not negative")
    v = eigvecs[:, 0].reshape(shape)
    return v / np.linalg.norm(v)


def connect_ts(points, mecp_centres, v, delta, minima_store):
    """Descend from both sides of a crossing point and register the minima.

    Returns the two minimum ids. Raises ``SelfConnectionError`` when both
    descents reach the same minimum and ``ConvergenceError`` when either
    side fails to produce a valid minimum.
    """
    ids = []
    for sign in (+1.0, -1.0):
        cand = local_minimize(points, np.asarray(mecp_centres) + sign * delta * np.asarray(v))
        status, min_id = minima_store.dedup_insert(cand)
        if status == "rejected":
            raise ConvergenceError("descent from crossing point gave no valid minimum")
        ids.append(min_id)
    if ids[0] == ids[1]:
        raise SelfConnectionError(f"both descents reached minimum {ids[0]}")
    return ids[0], ids[1]


def align_clusters(mu_a, mu_b):
    """Reorder the rows of ``mu_b`` to best match ``mu_a``.

    Solves the assignment problem on squared centre distances; exact for
    any cluster count we use.
    """
    mu_a = np.asarray(mu_a, dtype=np.float64)
    mu_b = np.asarray(mu_b, dtype=np.float64)
    d = mu_a[:, None, :] - mu_b[None, :, :]
    cost_matrix = np.einsum("klf,klf->kl", d, d)
    _, cols = linear_sum_assignment(cost_matrix)
    return mu_b[cols], cols


def aligned_distance(mu_a, mu_b) -> float:
    """Euclidean distance between centre sets after optimal row matching."""
    mu_b_aligned, _ = align_clusters(mu_a, mu_b)
    return float(np.linalg.norm(np.asarray(mu_a) - mu_b_aligned))


@dataclass
class Image:
    t: float
    centres: np.ndarray
    labels: np.ndarray


def matched_hamming(labels_a, labels_b, k) -> int:
    """Points whose cluster co-membership changes, after best relabelling.

    Zero for assignments equal up to a cluster permutation. This is the
    partition-aware distance; raw label differences overcount when centre
    rows swap roles along an interpolation path.
    """
    labels_a = np.asarray(labels_a, dtype=np.int64)
    labels_b = np.asarray(labels_b, dtype=np.int64)
    overlap = np.zeros((k, k), dtype=np.int64)
    np.add.at(overlap, (labels_a, labels_b), 1)
    rows, cols = linear_sum_assignment(-overlap)
    return int(len(labels_a) - overlap[rows, cols].sum())


def effective_single_change(points, labels_a, labels_b) -> bool:
    """True when the assignments differ in one data location.

    Duplicate rows cross an assignment seam together; a group of
    coordinate-identical points making the same label change counts as a
    single change, since the seam geometry is that of one weighted point.
    """
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    diff = np.flatnonzero(labels_a != labels_b)
    if len(diff) == 0:
        return False
    if len(diff) == 1:
        return True
    pts = np.asarray(points)[diff]
    if not np.all(pts == pts[0]):
        return False
    return (
        len(set(labels_a[diff].tolist())) == 1
        and len(set(labels_b[diff].tolist())) == 1
    )


def interpolate_adaptive(points, mu_a, mu_b, n_init=10):
    """Linear interpolation images refined until adjacent assignments
    differ in at most one point.

    Endpoints must already be cluster-aligned. Segments are bisected until
    adjacent images differ in at most one point's assignment or are equal
    up to a cluster relabelling (centre rows passing through each other).
    If simultaneous genuine changes persist below the minimum segment
    width, or the image budget is exhausted, the offending segment is
    reported via ``RefinementBudgetError``.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    mu_a = np.asarray(mu_a, dtype=np.float64)
    mu_b = np.asarray(mu_b, dtype=np.float64)
    if np.allclose(mu_a, mu_b):
        return [Image(0.0, mu_a.copy(), assign(points, mu_a))]
    k = mu_a.shape[0]

    def make(t):
        mu = (1.0 - t) * mu_a + t * mu_b
        return Image(t, mu, assign(points, mu))

    def needs_split(lo, hi):
        raw = int((lo.labels != hi.labels).sum())
        if raw <= 1:
            return False
        if matched_hamming(lo.labels, hi.labels, k) == 0:
            return False  # pure relabelling: centre rows passed through each other
        return not effective_single_change(points, lo.labels, hi.labels)

    images = [make(t) for t in np.linspace(0.0, 1.0, n_init)]
    while True:
        inserts = []
        for i in range(len(images) - 1):
            lo, hi = images[i], images[i + 1]
            if not needs_split(lo, hi):
                continue
            changed = int((lo.labels != hi.labels).sum())
            if hi.t - lo.t <= MIN_SEGMENT_WIDTH:
                raise RefinementBudgetError(lo.t, hi.t, changed)
            if len(images) + len(inserts) >= MAX_IMAGES:
                raise RefinementBudgetError(lo.t, hi.t, changed)
            inserts.append((i, make(0.5 * (lo.t + hi.t))))
        if not inserts:
            return images
        for offset, (i, img) in enumerate(inserts):
            images.insert(i + 1 + offset, img)


def default_displacement(points) -> float:
    """Descent kick-off distance: 1% of the mean per-feature range."""
    points = np.asarray(points)
    return 0.01 * float(np.mean(points.max(axis=0) - points.min(axis=0)))


def attempt_connection(points, min_a, min_b, db, params=SurrogateParams(), tol_seam=TOL_SEAM):
    """Try to connect two stored minima through transition states.

    Aligns the second minimum's clusters to the first, walks an adaptive
    linear path, and runs a crossing-point search wherever the assignment
    changes between adjacent images, starting each search from the first
    image of the pair. Valid crossing points are descended on both sides,
    their endpoint minima registered, and new transition states returned.
    Individual search failures are logged and skipped.
    """
    if min_a.id == min_b.id:
        raise ValueError("cannot connect a minimum to itself")
    mu_b_aligned, _ = align_clusters(min_a.centres, min_b.centres)
    try:
        images = interpolate_adaptive(points, min_a.centres, mu_b_aligned)
    except RefinementBudgetError as exc:
        log.info("connection %d-%d abandoned: %s", min_a.id, min_b.id, exc)
        return []

    delta = default_displacement(points)
    new_records = []
    for lo, hi in zip(images, images[1:]):
        raw = int((lo.labels != hi.labels).sum())
        if raw == 0:
            continue
        if not effective_single_change(points, lo.labels, hi.labels):
            # equal up to relabelling (centre rows swapped): not a clustering change
            continue
        mecp = locate_mecp(points, lo.labels, hi.labels, lo.centres, params, tol_seam=tol_seam)
        if mecp is None:
            log.info("connection %d-%d: seam search failed", min_a.id, min_b.id)
            continue
        try:
            v = downhill_eigenvector(points, mecp.centres, lo.labels, hi.labels, params)
            id_a, id_b = connect_ts(points, mecp.centres, v, delta, db.minima)
        except (NoNegativeCurvatureError, SelfConnectionError, ConvergenceError) as exc:
            log.info("connection %d-%d: %s", min_a.id, min_b.id, exc)
            continue
        endpoint_top = max(db.minima.get(id_a).cost, db.minima.get(id_b).cost)
        if mecp.cost < endpoint_top - tol_seam:
            log.info("connection %d-%d: crossing point below an endpoint", min_a.id, min_b.id)
            continue
        status, ts_id = db.transition_states.insert(
            mecp.centres, mecp.cost, lo.labels, hi.labels, (id_a, id_b), mecp.seam_gap,
        )
        if status == "inserted":
            new_records.append(db.transition_states.get(ts_id))
    return new_records
