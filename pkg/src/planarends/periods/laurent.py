"""Laurent expansion of omega across a neck and the period series built from it.

Near a_{k,i} on sphere k use v = 1/g_k, near b_{k,i} on sphere k+1 use
w = 1/g_{k+1}; opening the node identifies v w = t^2. In v,

    omega = -gamma dv/v + sum_{n>=0} r^{n+1} c+_n v^n dv
            + sum_{n>=2} (r t^2)^{n-1} c-_n dv / v^n,

where at t = 0 the coefficients are contour integrals of the sphere forms:
c+_n = (1/2 pi i) int_{C(a,eps)} omega_k (g_k/r)^{n+1} and
c-_n = -(1/2 pi i) int_{C(b,eps)} omega_{k+1} (g_{k+1}/r)^{n-1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import ChartFamily
from .quadrature import circle_integral, polyline_integral
from .zeros import numerator_polynomial

CUTOFF = 40
SAFETY = 1.05


class ConstantSelectionError(RuntimeError):
    pass


class TOutOfRangeError(ValueError):
    pass


def _circle_max(f, center, radius, n=512):
    theta = 2 * np.pi * np.arange(n) / n
    return float(np.max(np.abs(f(center + radius * np.exp(1j * theta)))))


def _circle_min(f, center, radius, n=512):
    theta = 2 * np.pi * np.arange(n) / n
    return float(np.min(np.abs(f(center + radius * np.exp(1j * theta)))))


@dataclass(frozen=True)
class NeckConstants:
    eps: float
    r: float
    eps_p: float
    r_p: float
    rho: float
    phi: complex
    psi: complex

    @property
    def t_max(self):
        return min(self.rho, 1.0 / np.sqrt(self.r * self.r_p))

    def to_json(self):
        return {"eps": self.eps, "r": self.r, "eps_prime": self.eps_p, "r_prime": self.r_p,
                "rho": self.rho, "t_max": self.t_max,
                "phi": [self.phi.real, self.phi.imag], "psi": [self.psi.real, self.psi.imag]}


def neck_constants(family: ChartFamily, k, i, eps=None, max_halvings=40,
                   bisections=30) -> NeckConstants:
    """Automated choice of eps, r, eps', r', rho for the neck (k, i).

    eps: half the smallest node gap on the two spheres.
    r: SAFETY * 2 max|g| on the eps-circles.
    eps': the largest value below eps/2 (to bisection accuracy) with
    |g| >= 2r on every 2eps'-circle and no zero of g inside.
    r': SAFETY * 2 max|g| on the eps'-circles.
    rho: min |1/g| on the 2eps'-circles about the two neck nodes.
    """
    lo, ia, hi, ib = family.neck(k, i)
    spheres = (lo, hi)
    if eps is None:
        eps = 0.5 * min(s.min_gap() for s in spheres)
    if not np.isfinite(eps):
        raise ConstantSelectionError("need at least two nodes to size the circles")
    r = SAFETY * 2 * max(_circle_max(s.g, p, eps) for s in spheres for p in s.nodes)
    zeros = []
    for s in spheres:
        P = numerator_polynomial(s)
        zeros.append(np.roots(P) if len(P) > 1 else np.zeros(0, complex))

    def admissible(ep):
        for s, zs in zip(spheres, zeros):
            for p in s.nodes:
                if len(zs) and np.min(np.abs(zs - p)) <= 2 * ep:
                    return False
                if _circle_min(s.g, p, 2 * ep) < 2 * r:
                    return False
        return True

    # largest admissible eps' below eps/2: halve to bracket, then bisect
    hi_ep = eps / 2
    lo_ep = hi_ep
    for _ in range(max_halvings):
        if admissible(lo_ep):
            break
        hi_ep, lo_ep = lo_ep, lo_ep / 2
    else:
        raise ConstantSelectionError(f"no eps' with |g| >= 2r={r:.3g} found")
    if lo_ep < hi_ep:
        for _ in range(bisections):
            mid = 0.5 * (lo_ep + hi_ep)
            lo_ep, hi_ep = (mid, hi_ep) if admissible(mid) else (lo_ep, mid)
    ep = lo_ep
    r_p = SAFETY * 2 * max(_circle_max(s.g, p, ep) for s in spheres for p in s.nodes)
    a, b = lo.nodes_a[ia], hi.nodes_b[ib]
    rho = min(_circle_min(lambda z: 1 / lo.g(z), a, 2 * ep),
              _circle_min(lambda z: 1 / hi.g(z), b, 2 * ep))
    phi = complex(1 / lo.g(a + ep))
    psi = complex(1 / hi.g(b + ep))
    if abs(r * phi) > 0.5 or abs(r * psi) > 0.5:
        raise ConstantSelectionError("|r phi| or |r psi| exceeds 1/2")
    return NeckConstants(float(eps), float(r), float(ep), float(r_p), float(rho), phi, psi)


@dataclass
class LaurentBlock:
    k: int
    i: int
    gamma: complex
    c_m1: complex
    c_plus: np.ndarray  # c+_n, n = 0..N
    c_minus: np.ndarray  # c-_n, n = 0..N (entries 0, 1 unused)
    consts: NeckConstants
    node_a: complex
    node_b: complex

    @property
    def cutoff(self):
        return len(self.c_plus) - 1

    def tail(self):
        """Size of the last retained terms, |c+_N (r rho)^N| and |c-_N (r rho)^N|."""
        x = self.consts.r * self.consts.rho
        N = self.cutoff
        return float(abs(self.c_plus[N]) * x ** N), float(abs(self.c_minus[N]) * x ** N)

    def series(self, v, t=0.0):
        """omega / dv in the v coordinate."""
        v = np.asarray(v, dtype=complex)
        r = self.consts.r
        out = -self.gamma / v
        rv = r * v
        for n, c in enumerate(self.c_plus):
            out = out + r * c * rv ** n
        if t:
            x = r * t * t / v
            for n in range(2, len(self.c_minus)):
                out = out + self.c_minus[n] * x ** (n - 1) / v
        return out


def laurent(family: ChartFamily, k, i, N=CUTOFF, consts=None, tol=1e-13) -> LaurentBlock:
    lo, ia, hi, ib = family.neck(k, i)
    consts = consts or neck_constants(family, k, i)
    a, b = lo.nodes_a[ia], hi.nodes_b[ib]
    w_lo, g_lo = lo.omega, lo.g
    w_hi, g_hi = hi.omega, hi.g
    r, eps = consts.r, consts.eps
    c_m1 = circle_integral(w_lo, a, eps, tol=tol).value / (2j * np.pi)
    cp = np.array([
        circle_integral(lambda z, n=n: w_lo(z) * (g_lo(z) / r) ** (n + 1), a, eps, tol=tol).value
        for n in range(N + 1)]) / (2j * np.pi)
    cm = np.zeros(N + 1, dtype=complex)
    for n in range(2, N + 1):
        cm[n] = -circle_integral(lambda z, n=n: w_hi(z) * (g_hi(z) / r) ** (n - 1), b, eps,
                                 tol=tol).value / (2j * np.pi)
    gamma = complex(lo.gamma_a[ia])
    return LaurentBlock(k, i, gamma, complex(c_m1), cp, cm, consts, a, b)


def reconstruction_error(family: ChartFamily, block: LaurentBlock, samples=20, seed=0):
    """Max |series(v(z)) - omega_k(z)/v'(z)| over points eps' <= |z - a| <= 2 eps'."""
    lo = family[block.k]
    g, w = lo.g, lo.omega
    rng = np.random.default_rng(seed)
    ep = block.consts.eps_p
    z = block.node_a + ep * (1 + rng.random(samples)) * np.exp(2j * np.pi * rng.random(samples))
    v = 1 / g(z)
    dv = -g.derivative(z) / g(z) ** 2
    exact = w(z) / dv
    return float(np.max(np.abs(block.series(v) - exact)))


def _check_t(block, t):
    if not 0 < t < block.consts.t_max:
        raise TOutOfRangeError(f"t={t} outside (0, {block.consts.t_max:.3g})")


def vertical_period(block: LaurentBlock, t):
    """(full, finite): the integral of omega from a+eps' through the neck to b+eps',
    and the same plus 2 gamma log t."""
    _check_t(block, t)
    c = block.consts
    r, phi, psi, g = c.r, c.phi, c.psi, block.gamma
    total = -g * np.log(t * t) + g * np.log(phi * psi)
    for n, cp in enumerate(block.c_plus):
        total += cp / (n + 1) * ((r * t * t / psi) ** (n + 1) - (r * phi) ** (n + 1))
    for n in range(2, len(block.c_minus)):
        total += block.c_minus[n] / (n - 1) * ((r * t * t / phi) ** (n - 1) - (r * psi) ** (n - 1))
    finite = total + 2 * g * np.log(t)
    return complex(total), complex(finite)


def vertical_finite_part_limit(block: LaurentBlock):
    """t -> 0 value of the finite part."""
    c = block.consts
    r, phi, psi, g = c.r, c.phi, c.psi, block.gamma
    out = g * np.log(phi * psi)
    out -= sum(cp / (n + 1) * (r * phi) ** (n + 1) for n, cp in enumerate(block.c_plus))
    out -= sum(block.c_minus[n] / (n - 1) * (r * psi) ** (n - 1)
               for n in range(2, len(block.c_minus)))
    return complex(out)


def vertical_t2_coefficient(block: LaurentBlock):
    """Coefficient of t^2 in the finite part: r c+_0 / psi + r c-_2 / phi."""
    c = block.consts
    return complex(c.r * block.c_plus[0] / c.psi + c.r * block.c_minus[2] / c.phi)


def neck_integrals(block: LaurentBlock, t=None):
    """(int v omega, int w omega) over the neck path from a+eps' to b+eps'.

    With t None the tau = 0 limits are returned; they equal the integrals of
    omega_k/g_k from a+eps' to a and of omega_{k+1}/g_{k+1} from b to b+eps'.
    """
    c = block.consts
    r, phi, psi, g = c.r, c.phi, c.psi, block.gamma
    cp, cm = block.c_plus, block.c_minus
    N = len(cp) - 1
    iv = g * phi - sum(cp[n] * r ** (n + 1) * phi ** (n + 2) / (n + 2) for n in range(N + 1))
    iw = g * psi - sum(cm[n + 2] * r ** (n + 1) * psi ** (n + 2) / (n + 2) for n in range(N - 1))
    if t is None:
        return complex(iv), complex(iw)
    _check_t(block, t)
    t2 = t * t
    v1 = t2 / psi
    w0 = t2 / phi
    # t-dependent corrections in the v coordinate, v from phi to t^2/psi
    iv += -g * v1 + sum(cp[n] * r ** (n + 1) * v1 ** (n + 2) / (n + 2) for n in range(N + 1))
    iv += r * t2 * cm[2] * np.log(v1 / phi)
    for n in range(3, N + 1):
        iv += cm[n] / (2 - n) * (r ** (n - 1) * t2 * psi ** (n - 2) - r * t2 * (r * t2 / phi) ** (n - 2))
    # and in w, w from t^2/phi to psi; d+_n = -c-_{n+2}, d-_m = -c+_{m-2}
    iw += -g * w0 + sum(cm[n + 2] * r ** (n + 1) * w0 ** (n + 2) / (n + 2) for n in range(N - 1))
    iw += -r * t2 * cp[0] * np.log(psi / w0)
    for m in range(3, N + 2):
        iw += -cp[m - 2] / (2 - m) * (r * t2 * (r * t2 / psi) ** (m - 2) - r ** (m - 1) * t2 * phi ** (m - 2))
    return complex(iv), complex(iw)


def neck_limits_direct(family: ChartFamily, block: LaurentBlock, tol=1e-13):
    """Quadrature of omega/g from a+eps' to a (sphere k) and b to b+eps' (sphere k+1)."""
    lo, hi = family[block.k], family[block.k + 1]
    ep = block.consts.eps_p
    a, b = block.node_a, block.node_b
    iv = polyline_integral(lambda z: lo.omega(z) / lo.g(z), [a + ep, a], tol=tol).value
    iw = polyline_integral(lambda z: hi.omega(z) / hi.g(z), [b, b + ep], tol=tol).value
    return complex(iv), complex(iw)


def b_period(family: ChartFamily, block: LaurentBlock, t, base_lo, base_hi):
    """Integral of omega along a B-type path: base_lo -> a+eps' on sphere k,
    through the neck, then b+eps' -> base_hi on sphere k+1."""
    lo, hi = family[block.k], family[block.k + 1]
    ep = block.consts.eps_p
    first = polyline_integral(lo.omega, [base_lo, block.node_a + ep]).value
    full, _ = vertical_period(block, t)
    last = polyline_integral(hi.omega, [block.node_b + ep, base_hi]).value
    return complex(first + full + last)
