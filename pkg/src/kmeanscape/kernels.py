"""Kernel backend selection.

Prefers the compiled extension; falls back to the NumPy implementations
when the extension is missing or ``KMEANSCAPE_PURE=1`` is set. Both
backends share signatures: inputs are C-contiguous float64 arrays and
int64 label vectors.
"""

import os

import numpy as np

if os.environ.get("KMEANSCAPE_PURE") == "1":
    from . import _kernels_py as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "numpy"


def _points(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def _labels(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def assign(points, centres):
    return _impl.assign(_points(points), _points(centres))


def cost(points, centres, labels):
    return _impl.cost(_points(points), _points(centres), _labels(labels))


def cost_and_grad(points, centres, labels):
    return _impl.cost_and_grad(_points(points), _points(centres), _labels(labels))


def cluster_sums(points, labels, k):
    return _impl.cluster_sums(_points(points), _labels(labels), int(k))
