"""Per-level Riemann sphere data at t = 0.

Sphere k carries the nodes a_{k,i} (necks up to level k) and b_{k-1,j}
(necks down to level k-1), both measured from p_{k-1,1} and conjugated and
negated on odd spheres:

    a_{k,i}   = (-1)^k conj^k(p_{k,i}   - p_{k-1,1}),
    b_{k-1,j} = (-1)^k conj^k(p_{k-1,j} - p_{k-1,1}).

On it live g_k = sum beta/(z-b) - sum alpha/(z-a) and the height form
omega_k = sum gamma_low/(z-b) dz - sum gamma_up/(z-a) dz.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..configspace import Configuration
from .forms import RationalForm
from .quadrature import circle_integral

WEIGHT_TOL = 1e-12


class ChartError(ValueError):
    pass


class CompatibilityError(ChartError):
    pass


def _arr(x):
    a = np.array(x, dtype=complex).ravel()
    a.setflags(write=False)
    return a


def parity_map(k, z):
    """z -> (-1)^k conj^k(z)."""
    z = np.asarray(z, dtype=complex)
    return np.conj(-z) if k % 2 else z


@dataclass(frozen=True, eq=False)
class SphereChart:
    k: int
    nodes_a: np.ndarray
    nodes_b: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma_a: np.ndarray
    gamma_b: np.ndarray

    def __post_init__(self):
        for name in ("nodes_a", "nodes_b", "alpha", "beta", "gamma_a", "gamma_b"):
            object.__setattr__(self, name, _arr(getattr(self, name)))
        na, nb = len(self.nodes_a), len(self.nodes_b)
        if len(self.alpha) != na or len(self.gamma_a) != na:
            raise ChartError("alpha and gamma_a need one weight per a-node")
        if len(self.beta) != nb or len(self.gamma_b) != nb:
            raise ChartError("beta and gamma_b need one weight per b-node")
        if na + nb == 0:
            raise ChartError("chart has no nodes")
        for name, w in (("alpha", self.alpha), ("beta", self.beta)):
            if len(w) and abs(w.sum() - 1) > WEIGHT_TOL:
                raise ChartError(f"{name} weights must sum to 1, got {w.sum()}")
        nodes = self.nodes
        if len(nodes) > 1:
            d = np.abs(nodes[:, None] - nodes[None, :])
            np.fill_diagonal(d, np.inf)
            if d.min() == 0:
                raise ChartError("chart nodes must be distinct")

    @property
    def nodes(self):
        return np.concatenate([self.nodes_a, self.nodes_b])

    @property
    def n_a(self):
        return len(self.nodes_a)

    @property
    def n_b(self):
        return len(self.nodes_b)

    @property
    def g(self) -> RationalForm:
        return RationalForm(np.concatenate([self.nodes_b, self.nodes_a]),
                            np.concatenate([self.beta, -self.alpha]))

    @property
    def omega(self) -> RationalForm:
        return omega0(self)

    def min_gap(self):
        nodes = self.nodes
        if len(nodes) < 2:
            return np.inf
        d = np.abs(nodes[:, None] - nodes[None, :])
        np.fill_diagonal(d, np.inf)
        return float(d.min())

    def is_central(self, tol=1e-14):
        ok = True
        for w in (self.alpha, self.gamma_a):
            if len(w):
                ok &= np.allclose(w, 1.0 / len(w), rtol=0, atol=tol)
        for w in (self.beta, self.gamma_b):
            if len(w):
                ok &= np.allclose(w, 1.0 / len(w), rtol=0, atol=tol)
        return bool(ok)

    def infinity_coefficient(self):
        """Leading coefficient L of g_k = L / z^2 + O(z^-3)."""
        return complex(np.sum(self.beta * self.nodes_b) - np.sum(self.alpha * self.nodes_a))

    def with_weights(self, **kw):
        return replace(self, **kw)


def omega0(chart: SphereChart) -> RationalForm:
    """Height form on the sphere at t = 0; needs matching gamma sums on both sides."""
    if abs(chart.gamma_a.sum() - chart.gamma_b.sum()) > WEIGHT_TOL:
        raise CompatibilityError(
            f"gamma sums differ on sphere {chart.k}: "
            f"{chart.gamma_a.sum()} (a) vs {chart.gamma_b.sum()} (b)"
        )
    return RationalForm(np.concatenate([chart.nodes_b, chart.nodes_a]),
                        np.concatenate([chart.gamma_b, -chart.gamma_a]))


@dataclass(frozen=True, eq=False)
class ChartFamily:
    """Charts k_min .. k_max + 1 of a windowed configuration.

    The bottom chart has no b-nodes and the top chart no a-nodes.
    """

    cfg: Configuration
    charts: dict

    def __getitem__(self, k):
        return self.charts[k]

    @property
    def ks(self):
        return sorted(self.charts)

    def neck(self, k, i):
        """(lower chart, index of a_{k,i}, upper chart, index of b_{k,i}); i is 1-based."""
        return self.charts[k], i - 1, self.charts[k + 1], i - 1

    def necks(self):
        for j, lv in enumerate(self.cfg.levels):
            k = self.cfg.k_min + j
            for i in range(1, len(lv) + 1):
                yield k, i

    def interior_spheres(self):
        return [k for k in self.ks if self.charts[k].n_a and self.charts[k].n_b]

    def interior_necks(self):
        """Necks whose two spheres both carry a and b nodes."""
        inner = set(self.interior_spheres())
        return [(k, i) for k, i in self.necks() if k in inner and k + 1 in inner]

    def replace_chart(self, k, chart):
        charts = dict(self.charts)
        charts[k] = chart
        return ChartFamily(self.cfg, charts)


def central_chart(cfg: Configuration, k) -> SphereChart:
    has_a = cfg.k_min <= k <= cfg.k_max
    has_b = cfg.k_min <= k - 1 <= cfg.k_max
    if not (has_a or has_b):
        raise ChartError(f"sphere {k} does not touch the window")
    ref = cfg.level(k - 1)[0] if has_b else cfg.level(k)[0]
    a = parity_map(k, cfg.level(k) - ref) if has_a else np.zeros(0, complex)
    b = parity_map(k, cfg.level(k - 1) - ref) if has_b else np.zeros(0, complex)
    ca = np.full(len(a), 1.0 / len(a)) if len(a) else np.zeros(0)
    cb = np.full(len(b), 1.0 / len(b)) if len(b) else np.zeros(0)
    return SphereChart(k, a, b, ca, cb, ca, cb)


def central_charts(cfg: Configuration) -> ChartFamily:
    """Charts with alpha = beta = gamma = 1/n built from the configuration."""
    return ChartFamily(cfg, {k: central_chart(cfg, k) for k in range(cfg.k_min, cfg.k_max + 2)})


def a_periods(family: ChartFamily, k, i, eps=None, **kw):
    """The A_{k,i} period computed on both sides.

    Returns (upper, lower): the integral of omega_{k+1} over C(b_{k,i}, eps)
    and minus the integral of omega_k over C(a_{k,i}, eps). Both should equal
    2 pi i gamma_{k,i}.
    """
    lo, ia, hi, ib = family.neck(k, i)
    if eps is None:
        eps = 0.5 * min(lo.min_gap(), hi.min_gap())
        eps = eps if np.isfinite(eps) else 1.0
    up = circle_integral(hi.omega, hi.nodes_b[ib], eps, **kw)
    down = circle_integral(lo.omega, lo.nodes_a[ia], eps, **kw)
    return up.value, -down.value
