"""Limited-memory BFGS with a strong-Wolfe line search.

Minimises a smooth function given as ``fun(x) -> (f, grad)`` over a flat
vector. History length defaults to 10; the first inverse-Hessian guess is
rescaled each iteration from the latest curvature pair. Used for the
penalty-surrogate minimisations, where the surface is smooth but stiff in
the direction normal to an assignment seam.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    n_iter: int
    converged: bool
    message: str


def _cubic_min(a, fa, dfa, b, fb, dfb):
    # minimiser of the cubic interpolant on [a, b]; None if ill-conditioned
    d1 = dfa + dfb - 3.0 * (fa - fb) / (a - b)
    disc = d1 * d1 - dfa * dfb
    if disc < 0.0:
        return None
    d2 = np.sqrt(disc) * np.sign(b - a)
    denom = dfb - dfa + 2.0 * d2
    if denom == 0.0:
        return None
    t = b - (b - a) * (dfb + d2 - d1) / denom
    if not np.isfinite(t):
        return None
    return t


def _zoom(phi, a_lo, a_hi, f_lo, df_lo, f_hi, df_hi, f0, df0, c1, c2, max_iter=30):
    """Narrow a bracketing interval to a strong-Wolfe point.

    Returns the best sufficiently-decreasing evaluated step when the
    curvature condition cannot be met, or None with no usable step.
    """
    best = None  # best evaluated point with sufficient decrease
    for _ in range(max_iter):
        a = _cubic_min(a_lo, f_lo, df_lo, a_hi, f_hi, df_hi)
        width = abs(a_hi - a_lo)
        lo, hi = min(a_lo, a_hi), max(a_lo, a_hi)
        if a is None or not (lo + 0.1 * width < a < hi - 0.1 * width):
            a = 0.5 * (a_lo + a_hi)
        fa, dfa = phi(a)
        if fa <= f0 + c1 * a * df0 and (best is None or fa < best[1]):
            best = (a, fa, dfa)
        if fa > f0 + c1 * a * df0 or fa >= f_lo:
            a_hi, f_hi, df_hi = a, fa, dfa
        else:
            if abs(dfa) <= -c2 * df0:
                return a, fa, dfa
            if dfa * (a_hi - a_lo) >= 0.0:
                a_hi, f_hi, df_hi = a_lo, f_lo, df_lo
            a_lo, f_lo, df_lo = a, fa, dfa
        if abs(a_hi - a_lo) < 1e-16 * max(1.0, abs(a_lo)):
            break
    if best is not None:
        return best
    if a_lo > 0.0 and f_lo <= f0 + c1 * a_lo * df0:
        return a_lo, f_lo, df_lo
    return None


def _wolfe_line_search(phi, f0, df0, a_init, c1=1e-4, c2=0.9, max_iter=25):
    """Return (alpha, f, df) satisfying the strong Wolfe conditions.

    ``phi(a)`` evaluates the 1-D restriction and returns (value, slope).
    Returns None when no acceptable step is found.
    """
    a_prev, f_prev, df_prev = 0.0, f0, df0
    a = a_init
    for i in range(max_iter):
        fa, dfa = phi(a)
        if fa > f0 + c1 * a * df0 or (i > 0 and fa >= f_prev):
            return _zoom(phi, a_prev, a, f_prev, df_prev, fa, dfa, f0, df0, c1, c2)
        if abs(dfa) <= -c2 * df0:
            return a, fa, dfa
        if dfa >= 0.0:
            return _zoom(phi, a, a_prev, fa, dfa, f_prev, df_prev, f0, df0, c1, c2)
        a_prev, f_prev, df_prev = a, fa, dfa
        a = 2.0 * a
    return None


def _backtracking(phi, f0, df0, a_init, c1=1e-4, max_iter=30):
    a = a_init
    for _ in range(max_iter):
        fa, dfa = phi(a)
        if fa <= f0 + c1 * a * df0:
            return a, fa, dfa
        a *= 0.5
    return None


def minimize_lbfgs(fun, x0, gtol_rel=1e-8, max_iter=1000, history=10):
    """Minimise ``fun`` from ``x0``; converged when ||g|| < gtol_rel*(1+|f|)."""
    x = np.asarray(x0, dtype=np.float64).ravel().copy()
    f, g = fun(x)
    g = np.asarray(g, dtype=np.float64).ravel().copy()
    s_hist, y_hist, rho_hist = [], [], []

    n_iter = 0
    while n_iter < max_iter:
        gnorm = np.linalg.norm(g)
        if gnorm < gtol_rel * (1.0 + abs(f)):
            return MinimizeResult(x, f, g, n_iter, True, "gradient tolerance reached")

        # two-loop recursion
        q = g.copy()
        alphas = []
        for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
            a = rho * s.dot(q)
            alphas.append(a)
            q -= a * y
        if y_hist:
            gamma = s_hist[-1].dot(y_hist[-1]) / y_hist[-1].dot(y_hist[-1])
            q *= gamma
        for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
            b = rho * y.dot(q)
            q += (a - b) * s
        p = -q

        df0 = g.dot(p)
        if df0 >= 0.0:
            # defective curvature history; restart from steepest descent
            s_hist, y_hist, rho_hist = [], [], []
            p = -g
            df0 = -g.dot(g)

        state = {}

        def phi(a, _state=state, _p=p):
            xa = x + a * _p
            fa, ga = fun(xa)
            ga = np.asarray(ga, dtype=np.float64).ravel()
            _state[a] = (xa, fa, ga)
            return fa, ga.dot(_p)

        a_init = 1.0 if y_hist else min(1.0, 1.0 / max(1.0, gnorm))
        ls = _wolfe_line_search(phi, f, df0, a_init)
        if ls is None or ls[0] not in state:
            ls = _backtracking(phi, f, df0, a_init)
        if ls is None:
            return MinimizeResult(x, f, g, n_iter, False, "line search failed")
        a, fa, _ = ls
        x_new, f_new, g_new = state[a]

        s = x_new - x
        y = g_new - g
        sy = s.dot(y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > history:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)
        x, f, g = x_new, f_new, g_new
        n_iter += 1

    gnorm = np.linalg.norm(g)
    converged = gnorm < gtol_rel * (1.0 + abs(f))
    return MinimizeResult(x, f, g, n_iter, converged, "iteration limit")
