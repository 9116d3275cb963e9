"""Zeros of g_k: counting, and the alignment functional Z against omega_k.

Writing g_k = P_k / Q_k with Q_k = prod (z - node), omega_k vanishes at the
zeros of P_k exactly when omega_k / P_k has no poles away from the nodes,
which is tested by the moments Z_i = integral over dU_k of z^i omega_k / P_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charts import SphereChart
from .quadrature import circle_integral

Z_TOL = 1e-9


class ContourSelectionError(RuntimeError):
    pass


def denominator_polynomial(chart: SphereChart):
    return np.poly(chart.g.poles) if len(chart.g.poles) else np.array([1.0 + 0j])


def numerator_polynomial(chart: SphereChart, tol=1e-13):
    """Coefficients (highest first) of P_k = g_k Q_k, with cancelled leading terms dropped."""
    g = chart.g
    P = np.zeros(len(g.poles), dtype=complex)
    for j, (p, r) in enumerate(zip(g.poles, g.residues)):
        others = np.delete(g.poles, j)
        P += r * (np.poly(others) if len(others) else np.array([1.0]))
    scale = np.max(np.abs(g.residues)) if len(g.residues) else 1.0
    while len(P) > 1 and abs(P[0]) <= tol * scale:
        P = P[1:]
    return P


@dataclass
class ZeroContour:
    big_radius: float
    node_radius: float
    nodes: np.ndarray

    def integrate(self, f, **kw):
        """Integral of f dz over the big circle minus the node circles."""
        total = circle_integral(f, 0j, self.big_radius, **kw).value
        for p in self.nodes:
            total -= circle_integral(f, p, self.node_radius, **kw).value
        return total


def choose_contour(chart: SphereChart, roots, eps=None):
    """Node radius below half the node gap and half the root-to-node distance."""
    nodes = chart.nodes
    eps = 0.5 * chart.min_gap() if eps is None else eps
    if not np.isfinite(eps):
        eps = 1.0
    if len(roots):
        d = np.min(np.abs(roots[:, None] - nodes[None, :]))
        if d == 0:
            raise ContourSelectionError("a zero of P sits on a node")
        eps = min(eps, 0.5 * d)
    R = 2.0 * max(np.max(np.abs(nodes)), np.max(np.abs(roots)) if len(roots) else 0.0) + 1.0
    return ZeroContour(R, eps, nodes)


@dataclass
class ZeroReport:
    k: int
    degree: int
    expected: int
    count: float
    omega_count: float | None
    Z: np.ndarray
    roots: np.ndarray
    contour: ZeroContour = field(repr=False)

    @property
    def count_int(self):
        return int(round(self.count.real))

    @property
    def max_Z(self):
        return float(np.max(np.abs(self.Z))) if len(self.Z) else 0.0

    @property
    def passed(self):
        return (self.count_int == self.expected and abs(self.count - self.expected) < 1e-6
                and self.max_Z <= Z_TOL)


def zero_alignment(chart: SphereChart, eps=None) -> ZeroReport:
    """Zero count of g_k in U_k by the argument principle and the moments Z_i."""
    P = numerator_polynomial(chart)
    deg = len(P) - 1
    roots = np.roots(P) if deg > 0 else np.zeros(0, complex)
    contour = choose_contour(chart, roots, eps)
    g = chart.g
    count = contour.integrate(lambda z: g.derivative(z) / g(z)) / (2j * np.pi)
    expected = chart.n_a + chart.n_b - 2
    try:
        omega = chart.omega
    except ValueError:
        omega = None
    Z = []
    omega_count = None
    if omega is not None:
        omega_count = complex(contour.integrate(
            lambda z: omega.derivative(z) / omega(z)) / (2j * np.pi)).real
        for i in range(max(deg, 0)):
            Z.append(contour.integrate(lambda z, i=i: z ** i * omega(z) / np.polyval(P, z)))
    return ZeroReport(chart.k, deg, expected, complex(count), omega_count,
                      np.array(Z, dtype=complex), roots, contour)


def division_moments(f, P, radius=None):
    """Moments of f/P over a circle enclosing all zeros of P.

    Returns (Z, remainder, Z_from_remainder): Z_i = integral of z^i f/P dz for
    i < deg P by quadrature, and the same numbers from the polynomial division
    remainder via residues at the roots. f/P is entire iff the remainder is 0.
    """
    f = np.asarray(f, dtype=complex)
    P = np.asarray(P, dtype=complex)
    deg = len(P) - 1
    roots = np.roots(P)
    if radius is None:
        radius = 2 * np.max(np.abs(roots)) + 1
    _, rem = np.polydiv(f, P)
    dP = np.polyder(P)
    Z, Zr = [], []
    for i in range(deg):
        Z.append(circle_integral(lambda z, i=i: z ** i * np.polyval(f, z) / np.polyval(P, z),
                                 0j, radius).value)
        Zr.append(2j * np.pi * np.sum(roots ** i * np.polyval(rem, roots) / np.polyval(dP, roots)))
    return np.array(Z), rem, np.array(Zr)


def infinity_coefficient_numeric(chart: SphereChart, radius=None, n=512):
    """Mean of z^2 g_k(z) over a large circle (equals the 1/z^2 coefficient)."""
    if radius is None:
        radius = 10.0 * (1 + np.max(np.abs(chart.nodes)))
    theta = 2 * np.pi * np.arange(n) / n
    z = radius * np.exp(1j * theta)
    return complex(np.mean(z ** 2 * chart.g(z)))
