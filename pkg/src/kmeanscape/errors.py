"""Exception types shared across the package."""


class KmeanscapeError(Exception):
    """Base class for package errors."""


class ConvergenceError(KmeanscapeError):
    """An iterative minimisation failed to converge within its budget."""


class SelfConnectionError(KmeanscapeError):
    """Both descent directions from a crossing point reached the same minimum."""


class NoNegativeCurvatureError(KmeanscapeError):
    """The downhill-direction Hessian had no negative eigenvalue."""


class RefinementBudgetError(KmeanscapeError):
    """Adaptive path refinement hit its resolution limit.

    Carries the offending segment: interpolation parameters and the number
    of points whose assignment still changes across it.
    """

    def __init__(self, t_lo, t_hi, n_changed):
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.n_changed = n_changed
        super().__init__(
            f"segment [{t_lo:.8f}, {t_hi:.8f}] still changes {n_changed} "
            "assignments at minimum width"
        )


class DatabaseError(KmeanscapeError):
    """Landscape database missing, unreadable or inconsistent."""


class ConfigError(KmeanscapeError):
    """Invalid run configuration."""
