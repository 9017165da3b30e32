"""Pure-NumPy implementations of the hot kernels.

Same call signatures and semantics as the compiled module ``_kernels``;
used as a fallback when the extension is not built.
"""

import numpy as np


def assign(points, centres):
    # squared Euclidean distances; argmin keeps the lowest index on ties
    d = points[:, None, :] - centres[None, :, :]
    return np.einsum("nkf,nkf->nk", d, d).argmin(axis=1)


def cost(points, centres, labels):
    d = points - centres[labels]
    return float(np.einsum("nf,nf->", d, d))


def cost_and_grad(points, centres, labels):
    k = centres.shape[0]
    d = centres[labels] - points
    j = float(np.einsum("nf,nf->", d, d))
    grad = np.zeros_like(centres)
    np.add.at(grad, labels, 2.0 * d)
    return j, grad


def cluster_sums(points, labels, k):
    n_f = points.shape[1]
    counts = np.bincount(labels, minlength=k)
    sums = np.empty((k, n_f))
    for f in range(n_f):
        sums[:, f] = np.bincount(labels, weights=points[:, f], minlength=k)
    return sums, counts
