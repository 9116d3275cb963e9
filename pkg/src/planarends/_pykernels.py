"""Reference numpy implementation of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Points of a windowed configuration are passed flat: ``points`` holds all
p_{k,i} level after level and ``level_ptr`` (length L+1) delimits levels, so
level ``k`` (window-relative) is ``points[level_ptr[k]:level_ptr[k+1]]``.
"""

import numpy as np

BACKEND = "python"


def _level(points, level_ptr, k):
    return points[level_ptr[k]:level_ptr[k + 1]]


def force_sums(points, level_ptr):
    """Return (F, G): the force on every point and G_k per level.

    G[0] is zero since the first level of the window has no lower neighbour.
    """
    points = np.asarray(points, dtype=complex)
    level_ptr = np.asarray(level_ptr, dtype=np.int64)
    nlev = len(level_ptr) - 1
    c = 1.0 / np.diff(level_ptr)
    F = np.zeros(len(points), dtype=complex)
    G = np.zeros(nlev, dtype=complex)
    for k in range(nlev):
        pk = _level(points, level_ptr, k)
        d = pk[:, None] - pk[None, :]
        np.fill_diagonal(d, np.inf)
        fk = 2.0 * c[k] ** 2 * (1.0 / d).sum(axis=1)
        if k + 1 < nlev:
            q = _level(points, level_ptr, k + 1)
            fk -= c[k] * c[k + 1] * (1.0 / (pk[:, None] - q[None, :])).sum(axis=1)
        if k > 0:
            q = _level(points, level_ptr, k - 1)
            inv = 1.0 / (pk[:, None] - q[None, :])
            fk -= c[k] * c[k - 1] * inv.sum(axis=1)
            G[k] = c[k] * c[k - 1] * inv.sum()
        F[level_ptr[k]:level_ptr[k + 1]] = fk
    return F, G


def force_jacobian(points, level_ptr):
    """Complex derivative of every F_{k,i} with respect to the points.

    Returned in CSR form ``(indptr, indices, data)``; row r is the point r,
    its columns are the points of levels k-1, k, k+1 in flat order.
    """
    points = np.asarray(points, dtype=complex)
    level_ptr = np.asarray(level_ptr, dtype=np.int64)
    nlev = len(level_ptr) - 1
    npts = len(points)
    c = 1.0 / np.diff(level_ptr)
    indptr = np.zeros(npts + 1, dtype=np.int64)
    for k in range(nlev):
        lo = level_ptr[max(k - 1, 0)]
        hi = level_ptr[min(k + 2, nlev)]
        for r in range(level_ptr[k], level_ptr[k + 1]):
            indptr[r + 1] = hi - lo
    indptr = np.cumsum(indptr)
    indices = np.empty(indptr[-1], dtype=np.int64)
    data = np.zeros(indptr[-1], dtype=complex)
    for k in range(nlev):
        a, b = level_ptr[k], level_ptr[k + 1]
        lo = level_ptr[max(k - 1, 0)]
        hi = level_ptr[min(k + 2, nlev)]
        pk = points[a:b]
        for r in range(a, b):
            row = np.zeros(hi - lo, dtype=complex)
            others = np.arange(a, b) != r
            w = np.zeros(b - a, dtype=complex)
            w[others] = 2.0 * c[k] ** 2 / (pk[r - a] - pk[others]) ** 2
            row[a - lo:b - lo] = w
            diag = -w.sum()
            if k + 1 < nlev:
                u0, u1 = level_ptr[k + 1], level_ptr[k + 2]
                w = c[k] * c[k + 1] / (pk[r - a] - points[u0:u1]) ** 2
                row[u0 - lo:u1 - lo] = -w
                diag += w.sum()
            if k > 0:
                l0, l1 = level_ptr[k - 1], level_ptr[k]
                w = c[k] * c[k - 1] / (pk[r - a] - points[l0:l1]) ** 2
                row[l0 - lo:l1 - lo] = -w
                diag += w.sum()
            row[r - lo] = diag
            indices[indptr[r]:indptr[r + 1]] = np.arange(lo, hi)
            data[indptr[r]:indptr[r + 1]] = row
    return indptr, indices, data


def gvalue_jacobian(points, level_ptr):
    """Complex derivative of every G_k with respect to the points (CSR).

    Row k has columns in levels k-1 and k; row 0 is empty.
    """
    points = np.asarray(points, dtype=complex)
    level_ptr = np.asarray(level_ptr, dtype=np.int64)
    nlev = len(level_ptr) - 1
    c = 1.0 / np.diff(level_ptr)
    indptr = np.zeros(nlev + 1, dtype=np.int64)
    for k in range(1, nlev):
        indptr[k + 1] = level_ptr[k + 1] - level_ptr[k - 1]
    indptr = np.cumsum(indptr)
    indices = np.empty(indptr[-1], dtype=np.int64)
    data = np.empty(indptr[-1], dtype=complex)
    for k in range(1, nlev):
        l0, l1, l2 = level_ptr[k - 1], level_ptr[k], level_ptr[k + 1]
        w = c[k] * c[k - 1] / (points[l1:l2, None] - points[None, l0:l1]) ** 2
        s = indptr[k]
        indices[s:indptr[k + 1]] = np.arange(l0, l2)
        data[s:s + (l1 - l0)] = w.sum(axis=0)
        data[s + (l1 - l0):indptr[k + 1]] = -w.sum(axis=1)
    return indptr, indices, data


def min_separation(points, level_ptr):
    """Smallest distance between two points that enter a common force term.

    Returns ``(dist, i, j)`` with flat indices; ``(inf, -1, -1)`` if no pair.
    """
    points = np.asarray(points, dtype=complex)
    level_ptr = np.asarray(level_ptr, dtype=np.int64)
    nlev = len(level_ptr) - 1
    best = (np.inf, -1, -1)
    for k in range(nlev):
        a, b = level_ptr[k], level_ptr[k + 1]
        hi = level_ptr[min(k + 2, nlev)]
        d = np.abs(points[a:b, None] - points[None, a:hi])
        # only pairs (i, j) with j after i in flat order
        jj = np.arange(a, hi)[None, :]
        ii = np.arange(a, b)[:, None]
        d = np.where(jj > ii, d, np.inf)
        if d.size:
            pos = np.unravel_index(np.argmin(d), d.shape)
            if d[pos] < best[0]:
                best = (float(d[pos]), int(a + pos[0]), int(a + pos[1]))
    return best


def log_potential(x, centers, weights):
    """Evaluate sum_j weights[j] * log|x - centers[j]| at every x."""
    x = np.asarray(x, dtype=complex)
    centers = np.asarray(centers, dtype=complex)
    weights = np.asarray(weights, dtype=float)
    out = np.zeros(x.shape, dtype=float)
    for cj, wj in zip(centers, weights):
        out += wj * np.log(np.abs(x - cj))
    return out
