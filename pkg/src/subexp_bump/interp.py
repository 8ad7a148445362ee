"""Local Lagrange interpolation on ordered, possibly nonuniform nodes."""

import numpy as np


def window_starts(nodes, x, npts):
    """Index of the first node of the ``npts``-node window centred on each ``x``."""
    n = len(nodes)
    npts = min(npts, n)
    i = np.searchsorted(nodes, x, side="right") - 1
    start = i - (npts // 2 - 1)
    return np.clip(start, 0, n - npts)


def lagrange_weights(xw, x):
    """Lagrange basis values. ``xw`` is (..., p) window nodes, ``x`` is (...)."""
    p = xw.shape[-1]
    diff = x[..., None] - xw
    w = np.ones_like(diff)
    for j in range(p):
        for m in range(p):
            if m != j:
                w[..., j] *= diff[..., m] / (xw[..., j] - xw[..., m])
    return w


def local_interp(nodes, values, x, degree=3):
    """Evaluate the degree-``degree`` local interpolant of ``values`` at ``x``."""
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    x = np.asarray(x, dtype=float)
    npts = min(degree + 1, len(nodes))
    start = window_starts(nodes, x, npts)
    idx = start[..., None] + np.arange(npts)
    w = lagrange_weights(nodes[idx], x)
    return np.sum(w * values[idx], axis=-1)
