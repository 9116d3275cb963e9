"""Contour integrals: trapezoid rule on circles, composite Gauss-Legendre on polylines.

Both refine by doubling until two successive values agree to ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_START = 256
N_CAP = 4096
TOL = 1e-10
GL_ORDER = 16


class QuadratureError(RuntimeError):
    pass


class SingularityProximityError(QuadratureError):
    pass


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    n: int

    def __complex__(self):
        return complex(self.value)


def _check_margin(points, poles, margin):
    if poles is None or margin is None or len(poles) == 0:
        return
    poles = np.asarray(poles, dtype=complex)
    d = np.min(np.abs(np.asarray(points)[:, None] - poles[None, :]))
    if d < margin:
        raise SingularityProximityError(f"contour passes within {d:.3g} of a pole (margin {margin:.3g})")


def circle_nodes(center, radius, n):
    theta = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * theta)
    return center + radius * e, 1j * radius * e * (2 * np.pi / n)


def circle_integral(f, center, radius, n=N_START, n_max=N_CAP, tol=TOL, poles=None,
                    margin=None) -> QuadResult:
    """Counterclockwise integral of f(z) dz over |z - center| = radius."""
    z, _ = circle_nodes(center, radius, 64)
    _check_margin(z, poles, margin)
    prev = None
    while True:
        z, w = circle_nodes(center, radius, n)
        vals = f(z)
        if not np.all(np.isfinite(vals)):
            raise SingularityProximityError("integrand not finite on the circle")
        val = complex(np.sum(vals * w))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)):
                return QuadResult(val, err, n)
        if n >= n_max:
            raise QuadratureError(f"circle quadrature did not settle at n={n}")
        prev = val
        n *= 2


_GL = {}


def _gauss(m):
    if m not in _GL:
        _GL[m] = np.polynomial.legendre.leggauss(m)
    return _GL[m]


def _segment_rule(z0, z1, panels, order=GL_ORDER):
    x, w = _gauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    s = (mids[:, None] + half * x[None, :]).ravel()
    ws = np.tile(w * half, panels)
    return z0 + (z1 - z0) * s, (z1 - z0) * ws


def polyline_integral(f, vertices, panels=4, max_panels=1024, tol=TOL, poles=None,
                      margin=None) -> QuadResult:
    """Integral of f(z) dz along the polyline through ``vertices``."""
    vertices = [complex(v) for v in vertices]
    if len(vertices) < 2:
        return QuadResult(0j, 0.0, 0)
    if poles is not None and margin is not None:
        probe = np.concatenate([_segment_rule(a, b, 8)[0] for a, b in zip(vertices, vertices[1:])])
        _check_margin(probe, poles, margin)
    prev = None
    while True:
        total = 0j
        for a, b in zip(vertices, vertices[1:]):
            z, w = _segment_rule(a, b, panels)
            vals = f(z)
            if not np.all(np.isfinite(vals)):
                raise SingularityProximityError("integrand not finite on the path")
            total += np.sum(vals * w)
        if prev is not None:
            err = abs(total - prev)
            if err <= tol * max(1.0, abs(total)):
                return QuadResult(complex(total), err, panels)
        if panels >= max_panels:
            raise QuadratureError(f"path quadrature did not settle at {panels} panels")
        prev = total
        panels *= 2


def contour_integral(f, contour, **kw) -> QuadResult:
    """Dispatch on ``("circle", center, radius)`` or a sequence of polyline vertices."""
    if isinstance(contour, tuple) and len(contour) == 3 and contour[0] == "circle":
        return circle_integral(f, contour[1], contour[2], **kw)
    return polyline_integral(f, contour, **kw)
