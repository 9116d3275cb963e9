"""t = 0 limits of the balancing and horizontal period functionals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..configspace import forces
from .charts import ChartFamily
from .quadrature import circle_integral, polyline_integral

FOUR_PI_I = 4j * np.pi


@dataclass
class LimitBalance:
    """boF per point (flat order of the configuration) and boG per level."""

    k_min: int
    sizes: tuple
    lower: np.ndarray
    upper: np.ndarray
    bo_g: dict
    deviation: float
    g_deviation: float

    @property
    def total(self):
        return self.lower + self.upper

    def passed(self, tol=1e-10):
        return self.deviation <= tol and self.g_deviation <= tol


def _conj_k(k, z):
    return np.conj(z) if k % 2 else z


def limit_balance(family: ChartFamily, tol=None, quadrature=False):
    """Residue form of the balancing functional at t = 0 (central weights).

    boF^-_{k,i} = conj^k(2 pi i Res_{a_{k,i}} g_k^2),
    boF^+_{k,i} = conj^{k+1}(2 pi i Res_{b_{k,i}} g_{k+1}^2),
    boG_k = -sum_i boF^-_{k,i}.
    With ``quadrature`` the residues are taken by circle integrals instead.
    The deviations from 4 pi i F and 4 pi i G are recorded (relative to 1 + |4 pi i F|).
    """
    cfg = family.cfg
    lower, upper = [], []
    bo_g = {}
    for j, lv in enumerate(cfg.levels):
        k = cfg.k_min + j
        lo, hi = family[k], family[k + 1]
        glo, ghi = lo.g, hi.g
        lo_k = []
        for i in range(len(lv)):
            a, b = lo.nodes_a[i], hi.nodes_b[i]
            if quadrature:
                eps = 0.5 * lo.min_gap() if np.isfinite(lo.min_gap()) else 1.0
                ra = circle_integral(lambda z: glo(z) ** 2, a, eps).value / (2j * np.pi)
                eps = 0.5 * hi.min_gap() if np.isfinite(hi.min_gap()) else 1.0
                rb = circle_integral(lambda z: ghi(z) ** 2, b, eps).value / (2j * np.pi)
            else:
                ra = glo.product_residue(glo, a)
                rb = ghi.product_residue(ghi, b)
            lo_k.append(_conj_k(k, 2j * np.pi * ra))
            upper.append(_conj_k(k + 1, 2j * np.pi * rb))
        lower.extend(lo_k)
        if j > 0:
            bo_g[k] = -complex(np.sum(lo_k))
    lower, upper = np.array(lower), np.array(upper)
    fs = forces(cfg)
    ref = FOUR_PI_I * fs.forces
    dev = float(np.max(np.abs(lower + upper - ref) / (1 + np.abs(ref)))) if len(ref) else 0.0
    gdev = 0.0
    for k, v in bo_g.items():
        r = FOUR_PI_I * fs.G(k)
        gdev = max(gdev, abs(v - r) / (1 + abs(r)))
    out = LimitBalance(cfg.k_min, cfg.sizes, lower, upper, bo_g, dev, gdev)
    if tol is not None and not out.passed(tol):
        raise AssertionError(f"limit balance differs from 4 pi i F by {dev:.3g}")
    return out


# ---------------------------------------------------------------------------
# horizontal periods


def _route(z0, z1, avoid, clearance):
    """Polyline from z0 to z1 keeping ``clearance`` from the points in ``avoid``."""
    avoid = np.asarray(avoid, dtype=complex)

    def clear(path):
        if len(avoid) == 0:
            return True
        for a, b in zip(path, path[1:]):
            s = np.linspace(0, 1, 257)
            z = a + (b - a) * s
            if np.min(np.abs(z[:, None] - avoid[None, :])) < clearance:
                return False
        return True

    path = [z0, z1]
    if clear(path):
        return path
    mid, d = 0.5 * (z0 + z1), z1 - z0
    perp = 1j * d / abs(d) if d != 0 else 1j
    for s in np.abs(d) * np.array([0.25, 0.5, 1.0, 2.0]):
        for sign in (1, -1):
            path = [z0, mid + sign * s * perp, z1]
            if clear(path):
                return path
    raise ValueError("no clear route between the nodes")


def g_zeros(chart):
    from .zeros import numerator_polynomial

    P = numerator_polynomial(chart)
    return np.roots(P) if len(P) > 1 else np.zeros(0, complex)


def ratio_integral(chart, z0, z1, tol=1e-12):
    """Integral of omega / g along a route from z0 to z1 avoiding the zeros of g."""
    g, w = chart.g, chart.omega
    zeros = g_zeros(chart)
    scale = max(abs(z1 - z0), 1e-3)
    path = _route(z0, z1, zeros, 0.05 * scale) if len(zeros) else [z0, z1]
    return polyline_integral(lambda z: w(z) / g(z), path, tol=tol).value


@dataclass
class HorizontalLimit:
    values: dict  # (k, i) -> H_{k,i}(0)
    closed_form: dict

    @property
    def max_abs(self):
        return max((abs(v) for v in self.values.values()), default=0.0)

    @property
    def max_deviation(self):
        return max((abs(self.values[key] - self.closed_form[key]) for key in self.values),
                   default=0.0)


def horizontal_limit(family: ChartFamily):
    """H_{k,i}(0) = int_{b_{k,1}}^{b_{k,i}} omega_{k+1}/g_{k+1} - conj(int_{a_{k,i}}^{a_{k,1}} omega_k/g_k).

    Only levels with n_k >= 2 whose two spheres are interior contribute. The
    closed form b_i - b_1 + conj(a_i) - conj(a_1) (central weights) is returned
    alongside for comparison.
    """
    values, closed = {}, {}
    cfg = family.cfg
    for j, lv in enumerate(cfg.levels):
        k = cfg.k_min + j
        if len(lv) < 2:
            continue
        lo, hi = family[k], family[k + 1]
        if not (lo.n_b and hi.n_a):
            continue
        a, b = lo.nodes_a, hi.nodes_b
        for i in range(1, len(lv)):
            up = ratio_integral(hi, b[0], b[i])
            down = ratio_integral(lo, a[i], a[0])
            values[(k, i + 1)] = complex(up - np.conj(down))
            closed[(k, i + 1)] = complex(b[i] - b[0] + np.conj(a[i]) - np.conj(a[0]))
    return HorizontalLimit(values, closed)


def solved_b_nodes(a_nodes):
    """b_{k,i} = -conj(a_{k,i}) + conj(a_{k,1}), the zero set of H at central weights."""
    a = np.asarray(a_nodes, dtype=complex)
    return -np.conj(a) + np.conj(a[0])

