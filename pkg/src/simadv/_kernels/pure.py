"""Pure-numpy accumulator kernels.

These are the hot O(m*n) inner loops behind every built-in landscape
evaluation. The compiled twin in _core.pyx implements the same three
functions; both accumulate in ascending dimension order so the two backends
(and scalar re-computations in tests) are bit-identical. Keep any change in
lockstep with _core.pyx.
"""
import numpy as np

BACKEND = "pure"


def sq_dist(points, center):
    """Row-wise squared euclidean distance to ``center``.

    points: (m, n) float64, center: (n,) float64 -> (m,) float64.
    """
    d = points[:, 0] - center[0]
    acc = d * d
    for i in range(1, points.shape[1]):
        d = points[:, i] - center[i]
        acc += d * d
    return acc


def dot(points, direction):
    """Row-wise dot product with ``direction`` (ascending-order accumulation)."""
    acc = points[:, 0] * direction[0]
    for i in range(1, points.shape[1]):
        acc = acc + points[:, i] * direction[i]
    return acc


def scaled_absmax(points, half_widths):
    """Row-wise max_i |p_i| / half_widths[i]."""
    acc = np.abs(points[:, 0]) / half_widths[0]
    for i in range(1, points.shape[1]):
        acc = np.maximum(acc, np.abs(points[:, i]) / half_widths[i])
    return acc
