"""Finite blocks: residual force, Newton balancing, non-degeneracy certificates.

A finite block has a single point on its first and last level. When every
interior point is balanced, the first point feels the residual force F_C and
the last one feels -F_C; blocks with equal residual forces can be stacked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .configspace import (
    Configuration,
    DegenerateConfigurationError,
    LevelType,
    _pair,
    _parse_pair,
    forces,
    jacobian,
    point_jacobian,
    reduce,
)


class BalanceError(RuntimeError):
    pass


class SingularJacobianError(BalanceError):
    pass


class NonConvergenceError(BalanceError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteConfiguration:
    """A block over levels 0..h with n_0 = n_h = 1."""

    inner: Configuration

    def __post_init__(self):
        cfg = self.inner
        if cfg.k_min != 0:
            cfg = cfg.shift_levels(-cfg.k_min)
            object.__setattr__(self, "inner", cfg)
        if len(cfg.levels) < 2:
            raise ValueError("a finite block needs height >= 1")
        if cfg.sizes[0] != 1 or cfg.sizes[-1] != 1:
            raise ValueError(f"first and last level must hold one point, got type {cfg.sizes}")

    @classmethod
    def from_points(cls, levels):
        return cls(Configuration.from_points(levels))

    @property
    def height(self):
        return len(self.inner.levels) - 1

    @property
    def sizes(self):
        return self.inner.sizes

    @property
    def level_type(self):
        return self.inner.level_type

    @property
    def first(self):
        return complex(self.inner.levels[0][0])

    @property
    def last(self):
        return complex(self.inner.levels[-1][0])

    @property
    def levels(self):
        return self.inner.levels

    def translate(self, w):
        return FiniteConfiguration(self.inner.translate(w))

    def __repr__(self):
        return f"FiniteConfiguration(type={self.sizes})"


@dataclass
class ResidualReport:
    F_C: complex
    F_last: complex
    interior_max: float
    sum_deviation: float
    moment_deviation: float
    endpoint_deviation: float | None
    balanced: bool

    def to_json(self):
        return {
            "residual": _pair(self.F_C),
            "last_force": _pair(self.F_last),
            "interior_max": self.interior_max,
            "sum_deviation": self.sum_deviation,
            "moment_deviation": self.moment_deviation,
            "endpoint_deviation": self.endpoint_deviation,
            "balanced": self.balanced,
        }


def residual(fc: FiniteConfiguration, tol=1e-10) -> ResidualReport:
    """Residual force and the two global identities of the block.

    For any block sum F = 0 and sum p F = 1 - sum_k 1/n_k; once balanced also
    (p_h - p_0) F_C = sum_{k>=1} 1/n_k.
    """
    cfg = fc.inner
    fs = forces(cfg)
    pts, _ = cfg.flat()
    F = fs.forces
    FC = complex(F[0])
    inv = sum(1.0 / n for n in cfg.sizes)
    sum_dev = abs(F.sum())
    mom_dev = abs((pts * F).sum() - (1 - inv))
    imax = fs.interior_max()
    balanced = imax <= tol * (1 + abs(FC))
    end_dev = None
    if balanced:
        end_dev = abs((fc.last - fc.first) * FC - (inv - 1.0))
    return ResidualReport(FC, complex(F[-1]), imax, sum_dev, mom_dev, end_dev, balanced)


def residual_force(fc: FiniteConfiguration) -> complex:
    return complex(forces(fc.inner).forces[0])


# ---------------------------------------------------------------------------
# Newton


@dataclass
class BalanceResult:
    block: FiniteConfiguration
    iterations: int
    history: list
    residual: complex

    def to_json(self):
        return {
            "iterations": self.iterations,
            "history": list(self.history),
            "residual": _pair(self.residual),
            "block": block_to_json(self.block),
        }


def _interior(cfg):
    ptr = cfg.level_type.level_ptr()
    return int(ptr[1]), int(ptr[-2])


def _smallest_singular_value(A):
    A = A.toarray() if hasattr(A, "toarray") else np.asarray(A)
    if A.size == 0:
        return np.inf
    return float(np.linalg.svd(A, compute_uv=False)[-1])


def initial_guess(level_type, endpoints) -> FiniteConfiguration:
    """Interior levels on the segment between the endpoints, spread sideways.

    Level k sits at p_0 + (k/h) (p_h - p_0); its n points are offset along the
    perpendicular by cot(j pi / (n+1)) |p_h - p_0| / h, j = 1..n.
    """
    sizes = level_type.sizes if isinstance(level_type, LevelType) else tuple(level_type)
    h = len(sizes) - 1
    p0, ph = complex(endpoints[0]), complex(endpoints[1])
    delta = ph - p0
    if delta == 0:
        raise ValueError("endpoints must differ")
    perp = -1j * delta / abs(delta)
    step = abs(delta) / h
    levels = []
    for k, n in enumerate(sizes):
        centre = p0 + delta * k / h
        if k == 0:
            centre = p0
        elif k == h:
            centre = ph
        if n == 1:
            levels.append([centre])
        else:
            j = np.arange(1, n + 1)
            levels.append(centre + perp * step / np.tan(j * np.pi / (n + 1)))
    return FiniteConfiguration.from_points(levels)


def newton_balance(level_type=None, endpoints=None, init=None, *, max_iter=50,
                   tol=1e-12, sigma_tol=1e-10, growth=1.1, min_step=2.0 ** -30):
    """Solve F_{k,i} = 0 on interior levels with both endpoints pinned.

    Either ``init`` (a FiniteConfiguration) or ``level_type`` must be given;
    missing endpoints are taken from ``init``. Steps are halved while they
    would merge points or raise the residual above ``growth`` times its
    current value. Convergence: max interior |F| <= tol (1 + |F_C|).
    """
    if init is None:
        if level_type is None or endpoints is None:
            raise ValueError("need an initial block or a type with endpoints")
        init = initial_guess(level_type, endpoints)
    if level_type is not None:
        sizes = level_type.sizes if isinstance(level_type, LevelType) else tuple(level_type)
        if tuple(sizes) != init.sizes:
            raise ValueError(f"initial block has type {init.sizes}, expected {tuple(sizes)}")
    cfg = init.inner
    if endpoints is not None:
        levels = list(cfg.levels)
        levels[0] = [complex(endpoints[0])]
        levels[-1] = [complex(endpoints[1])]
        cfg = Configuration(tuple(levels))

    pts, ptr = cfg.flat()
    a, b = _interior(cfg)

    def evaluate(p):
        c = Configuration.from_points(
            [p[ptr[j]:ptr[j + 1]] for j in range(len(ptr) - 1)], check=True
        )
        F = forces(c).forces
        return c, F, float(np.max(np.abs(F[a:b]))) if b > a else 0.0

    cfg, F, res = evaluate(pts)
    history = [res]
    it = 0
    while res > tol * (1 + abs(F[0])):
        if it >= max_iter:
            raise NonConvergenceError(
                f"no convergence after {max_iter} iterations (residual {res:.3g})"
            )
        J = point_jacobian(cfg)[a:b, a:b].tocsc()
        smin = _smallest_singular_value(J)
        if smin < sigma_tol:
            raise SingularJacobianError(
                f"Jacobian singular at iteration {it} (sigma_min {smin:.3g})"
            )
        dx = spla.spsolve(J, -F[a:b]) if b - a > 1 else -F[a:b] / J.toarray().ravel()
        lam = 1.0
        while True:
            trial = pts.copy()
            trial[a:b] += lam * np.asarray(dx).ravel()
            try:
                cand = evaluate(trial)
            except DegenerateConfigurationError:
                cand = None
            if cand is not None and cand[2] <= growth * res:
                break
            lam *= 0.5
            if lam < min_step:
                raise NonConvergenceError(f"line search failed at iteration {it}")
        pts = trial
        cfg, F, res = cand
        history.append(res)
        it += 1
    return BalanceResult(FiniteConfiguration(cfg), it, history, complex(F[0]))


# ---------------------------------------------------------------------------
# certificates


@dataclass
class NondegeneracyCertificate:
    determinant: complex
    sigma_min: float
    dimension: int
    threshold: float = 1e-10

    @property
    def passed(self):
        return self.sigma_min > self.threshold

    def to_json(self):
        return {
            "determinant": _pair(self.determinant),
            "abs_determinant": abs(self.determinant),
            "sigma_min": self.sigma_min,
            "dimension": self.dimension,
            "pass": self.passed,
        }


def reduced_matrix(fc: FiniteConfiguration):
    """Dense complex matrix of d(G_k, F_{k,2..}) / d(ell_k, u_{k,2..}), k = 0..h."""
    return jacobian(reduce(fc.inner, k0=0)).to_dense()


def certify(fc: FiniteConfiguration, balance_tol=1e-8, threshold=1e-10):
    """Determinant and smallest singular value (real doubled form) of the block map."""
    rep = residual(fc, tol=balance_tol)
    if not rep.balanced:
        raise BalanceError(f"block is not balanced (interior max {rep.interior_max:.3g})")
    A = reduced_matrix(fc)
    det = complex(np.linalg.det(A)) if A.size else 1 + 0j
    real = np.block([[A.real, -A.imag], [A.imag, A.real]])
    smin = _smallest_singular_value(real)
    return NondegeneracyCertificate(det, smin, A.shape[0], threshold)


# ---------------------------------------------------------------------------
# examples and scaling


def scale(fc: FiniteConfiguration, lam) -> FiniteConfiguration:
    if lam == 0:
        raise ValueError("scale factor must be non-zero")
    return FiniteConfiguration(fc.inner.scale(lam))


def chain(a=1.0, h=1):
    if h < 1:
        raise ValueError("chain height must be >= 1")
    return FiniteConfiguration.from_points([[k * complex(a)] for k in range(h + 1)])


def fan(n=2):
    if n < 1:
        raise ValueError("fan needs n >= 1")
    j = np.arange(1, n + 1)
    return FiniteConfiguration.from_points([[0j], 1j + 1 / np.tan(j * np.pi / (n + 1)), [2j]])


def ladder22():
    s = np.sqrt(2) / 2
    return FiniteConfiguration.from_points(
        [[0j], [-s + 1j, s + 1j], [-s + 2j, s + 2j], [3j]]
    )


BUILTINS = {"chain": chain, "fan": fan, "ladder22": ladder22}


def builtin(name, **params) -> FiniteConfiguration:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown block {name!r}; known: {sorted(BUILTINS)}") from None
    return factory(**params)


def fan_residual(n):
    """Closed-form residual force (n+1)/(2 n i) of ``fan(n)``."""
    return (n + 1) / (2j * n)


def scale_to(fc: FiniteConfiguration, target) -> FiniteConfiguration:
    """Rescale so that the residual force equals ``target``."""
    target = complex(target)
    if target == 0:
        raise ValueError("target residual force must be non-zero")
    return scale(fc, residual_force(fc) / target)


def make_compatible(blocks, target=0.5 / 1j):
    """Scale every block to the common residual force ``target``."""
    return [scale_to(b, target) for b in blocks]


# ---------------------------------------------------------------------------
# block files


def block_to_json(fc: FiniteConfiguration, name=None):
    return {
        "name": name or "block",
        "type": list(fc.sizes),
        "points": [[_pair(z) for z in lv] for lv in fc.levels],
        "residual": _pair(residual_force(fc)),
    }


def block_from_json(obj, rtol=1e-8):
    """Parse a block record; the stored residual is checked against the points."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    keys = {"name", "type", "points", "residual"}
    if not isinstance(obj, dict) or not {"type", "points"} <= set(obj) <= keys:
        raise ValueError(f"block record needs 'type' and 'points', optional {keys}")
    levels = [[_parse_pair(p, "points") for p in lv] for lv in obj["points"]]
    fc = FiniteConfiguration.from_points(levels)
    if list(fc.sizes) != list(obj["type"]):
        raise ValueError(f"type {obj['type']} does not match points {fc.sizes}")
    if "residual" in obj:
        stored = _parse_pair(obj["residual"], "residual")
        actual = residual_force(fc)
        if abs(stored - actual) > rtol * (1 + abs(actual)):
            raise ValueError(f"stored residual {stored} disagrees with points ({actual})")
    return fc
