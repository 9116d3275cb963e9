"""Gauss map of the opened surface from the sphere data."""

from __future__ import annotations

import numpy as np


def gauss(chart, t, z):
    """t g_k(z) on even spheres and 1/(t g_k(z)) on odd ones."""
    gk = chart.g(z)
    if np.any(gk == 0) and chart.k % 2:
        raise ZeroDivisionError("Gauss map has a pole here")
    return t * gk if chart.k % 2 == 0 else 1.0 / (t * gk)


def neck_partner(lower, ia, upper, ib, t, z, tol=1e-14, max_iter=50):
    """Point z' near b on the upper sphere glued to z near a: v(z) w(z') = t^2.

    v = 1/g_lower, w = 1/g_upper; solved by Newton from the linearisation
    w ~ (z' - b) / beta.
    """
    z = np.asarray(z, dtype=complex)
    target = t * t * lower.g(z)  # = t^2 / v(z)
    b = upper.nodes_b[ib]
    zp = b + upper.beta[ib] * target
    g = upper.g
    for _ in range(max_iter):
        gz = g(zp)
        f = 1.0 / gz - target
        df = -g.derivative(zp) / gz ** 2
        step = f / df
        zp = zp - step
        if np.all(np.abs(step) <= tol * (1 + np.abs(zp - b))):
            break
    return zp
