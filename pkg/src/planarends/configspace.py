"""Configurations of neck positions and the forces between them.

A configuration of type (n_k) is a list of complex points p_{k,i} per level k
over a contiguous window of levels. Each point feels

    F_{k,i} = 2 sum_{j != i} c_k^2 / (p_{k,i} - p_{k,j})
              - sum_j c_k c_{k+1} / (p_{k,i} - p_{k+1,j})
              - sum_j c_k c_{k-1} / (p_{k,i} - p_{k-1,j}),      c_k = 1/n_k,

with empty sums for neighbours outside the window. The reduced coordinates
(ell_k = p_{k,1} - p_{k-1,1}, u_{k,i} = p_{k,i} - p_{k,1}) remove the
translation symmetry; in them the stacked force vector (G_k, F_{k,2..n_k})
has a block-tridiagonal Jacobian.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import kernels

DISTINCT_RTOL = 1e-9


class DegenerateConfigurationError(ValueError):
    """Two points that enter a common force term (nearly) coincide."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class LevelType:
    """Level sizes n_k over the window k_min .. k_min + len(sizes) - 1."""

    sizes: tuple
    k_min: int = 0

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes:
            raise ValueError("a level type needs at least one level")
        if any(n < 1 for n in sizes):
            raise ValueError(f"level sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def k_max(self):
        return self.k_min + len(self.sizes) - 1

    @property
    def levels(self):
        return range(self.k_min, self.k_max + 1)

    @property
    def width(self):
        return max(self.sizes)

    def n(self, k):
        return self.sizes[k - self.k_min]

    def level_ptr(self):
        return np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)

    def __len__(self):
        return len(self.sizes)


def _freeze(a):
    a = np.array(a, dtype=complex).reshape(-1)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Configuration:
    """Complex points p_{k,i}, one array per level, starting at level k_min."""

    levels: tuple
    k_min: int = 0
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        levels = tuple(_freeze(lv) for lv in self.levels)
        if not levels:
            raise ValueError("a configuration needs at least one level")
        if any(len(lv) == 0 for lv in levels):
            raise ValueError("every level needs at least one point")
        if not all(np.all(np.isfinite(lv)) for lv in levels):
            raise ValueError("configuration points must be finite")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "k_min", int(self.k_min))
        if self.check:
            self.assert_distinct()

    @classmethod
    def from_points(cls, points, k_min=0, check=True):
        """Build from a list of per-level point lists (or a {k: points} dict)."""
        if isinstance(points, dict):
            ks = sorted(points)
            if ks != list(range(ks[0], ks[0] + len(ks))):
                raise ValueError(f"levels must be contiguous, got {ks}")
            return cls(tuple(points[k] for k in ks), k_min=ks[0], check=check)
        return cls(tuple(points), k_min=k_min, check=check)

    # -- shape ---------------------------------------------------------
    @property
    def level_type(self):
        return LevelType(tuple(len(lv) for lv in self.levels), self.k_min)

    @property
    def sizes(self):
        return tuple(len(lv) for lv in self.levels)

    @property
    def k_max(self):
        return self.k_min + len(self.levels) - 1

    @property
    def width(self):
        return max(self.sizes)

    def level(self, k):
        if not self.k_min <= k <= self.k_max:
            raise KeyError(f"level {k} outside window [{self.k_min}, {self.k_max}]")
        return self.levels[k - self.k_min]

    def weight(self, k):
        return 1.0 / len(self.level(k))

    def flat(self):
        """Return (points, level_ptr) in the kernels' flat layout."""
        return np.concatenate(self.levels), self.level_type.level_ptr()

    def flat_index(self, k, i):
        """Flat index of p_{k,i} (i is 1-based as in the formulas)."""
        ptr = self.level_type.level_ptr()
        n = len(self.level(k))
        if not 1 <= i <= n:
            raise IndexError(f"point index {i} outside 1..{n} on level {k}")
        return int(ptr[k - self.k_min] + i - 1)

    def label(self, flat_index):
        ptr = self.level_type.level_ptr()
        lev = int(np.searchsorted(ptr, flat_index, side="right") - 1)
        return (self.k_min + lev, int(flat_index - ptr[lev] + 1))

    def diameter(self):
        pts = np.concatenate(self.levels)
        return float(np.hypot(np.ptp(pts.real), np.ptp(pts.imag)))

    # -- transformations ----------------------------------------------
    def translate(self, w):
        return Configuration(tuple(lv + w for lv in self.levels), self.k_min)

    def scale(self, lam):
        if lam == 0:
            raise ValueError("scale factor must be non-zero")
        return Configuration(tuple(lv * lam for lv in self.levels), self.k_min)

    def conj(self):
        return Configuration(tuple(np.conj(lv) for lv in self.levels), self.k_min)

    def shift_levels(self, dk):
        return Configuration(self.levels, self.k_min + dk, check=False)

    def with_level(self, k, points):
        levels = list(self.levels)
        levels[k - self.k_min] = points
        return Configuration(tuple(levels), self.k_min)

    # -- checks ---------------------------------------------------------
    def separation(self):
        """(distance, (k, i), (k', j)) for the closest interacting pair."""
        pts, ptr = self.flat()
        d, a, b = kernels.min_separation(pts, ptr)
        if a < 0:
            return np.inf, None, None
        return d, self.label(a), self.label(b)

    def assert_distinct(self, rtol=DISTINCT_RTOL):
        d, a, b = self.separation()
        scale = max(self.diameter(), 1e-300)
        if d <= rtol * scale:
            raise DegenerateConfigurationError(
                f"points p{a} and p{b} coincide (distance {d:.3g}, "
                f"diameter {scale:.3g})",
                pair=(a, b),
            )

    def __repr__(self):
        return f"Configuration(type={self.sizes}, k_min={self.k_min})"


@dataclass(frozen=True)
class ForceStack:
    """All forces F_{k,i}, the level sums G_k, and the stacked reduced vector."""

    k_min: int
    sizes: tuple
    forces: np.ndarray
    gvalues: np.ndarray
    level_ptr: np.ndarray

    def force(self, k, i):
        return complex(self.forces[self.level_ptr[k - self.k_min] + i - 1])

    def level_forces(self, k):
        j = k - self.k_min
        return self.forces[self.level_ptr[j]:self.level_ptr[j + 1]]

    def G(self, k):
        if k == self.k_min:
            raise KeyError(f"G_{k} needs level {k - 1}, outside the window")
        return complex(self.gvalues[k - self.k_min])

    @property
    def k_max(self):
        return self.k_min + len(self.sizes) - 1

    def is_partial(self, k):
        """Window-edge levels see only one neighbour level."""
        return k == self.k_min or k == self.k_max

    @property
    def stacked(self):
        """(G_k, F_{k,2..n_k}) level by level; the first level has no G."""
        parts = []
        for j, k in enumerate(range(self.k_min, self.k_max + 1)):
            if j > 0:
                parts.append([self.gvalues[j]])
            parts.append(self.forces[self.level_ptr[j] + 1:self.level_ptr[j + 1]])
        return np.concatenate(parts) if parts else np.zeros(0, complex)

    def interior_max(self):
        """Largest |F_{k,i}| over non-partial levels (0 when there are none)."""
        a, b = self.level_ptr[1], self.level_ptr[-2]
        if b <= a:
            return 0.0
        return float(np.max(np.abs(self.forces[a:b])))

    def telescoping_defect(self):
        """max over interior k of |sum_i F_{k,i} - (G_{k+1} - G_k)|, normalised."""
        worst = 0.0
        for j in range(1, len(self.sizes) - 1):
            s = self.forces[self.level_ptr[j]:self.level_ptr[j + 1]].sum()
            g0, g1 = self.gvalues[j], self.gvalues[j + 1]
            worst = max(worst, abs(s - (g1 - g0)) / (1 + abs(g0) + abs(g1)))
        return worst


def forces(cfg: Configuration) -> ForceStack:
    """Evaluate every force of a windowed configuration."""
    pts, ptr = cfg.flat()
    F, G = kernels.force_sums(pts, ptr)
    return ForceStack(cfg.k_min, cfg.sizes, F, G, ptr)


def balance_defect(fs: ForceStack):
    """max of |F_{k,i}| (i >= 2) and |G_{k+1} - G_k| over non-partial levels.

    Together with telescoping this is equivalent to all interior forces
    vanishing; a constant nonzero G (Riemann chains) is allowed.
    """
    worst = 0.0
    for j in range(1, len(fs.sizes) - 1):
        a, b = fs.level_ptr[j], fs.level_ptr[j + 1]
        if b - a > 1:
            worst = max(worst, float(np.max(np.abs(fs.forces[a + 1:b]))))
        worst = max(worst, abs(fs.gvalues[j + 1] - fs.gvalues[j]))
    return worst


def is_balanced(cfg, tol=1e-10):
    return balance_defect(forces(cfg)) <= tol


# ---------------------------------------------------------------------------
# reduced coordinates


@dataclass(frozen=True, eq=False)
class ReducedParams:
    """ell_k for k in (k_min, k_max], u_{k,2..n_k} per level, and the gauge.

    ``anchor`` is p_{k0,1}; together with ells and us it fixes every point.
    """

    k_min: int
    ells: np.ndarray
    us: tuple
    anchor: complex = 0j
    k0: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "ells", _freeze(self.ells))
        object.__setattr__(self, "us", tuple(_freeze(u) for u in self.us))
        if len(self.ells) != len(self.us) - 1:
            raise ValueError("need one ell per level after the first")
        if self.k0 is None:
            object.__setattr__(self, "k0", self.k_min)
        if not self.k_min <= self.k0 <= self.k_max:
            raise ValueError(f"anchor level {self.k0} outside the window")

    @property
    def k_max(self):
        return self.k_min + len(self.us) - 1

    @property
    def sizes(self):
        return tuple(len(u) + 1 for u in self.us)

    def ell(self, k):
        return complex(self.ells[k - self.k_min - 1])

    def u(self, k, i):
        """u_{k,i}; u_{k,1} is identically zero."""
        return 0j if i == 1 else complex(self.us[k - self.k_min][i - 2])

    @property
    def stacked(self):
        parts = []
        for j in range(len(self.us)):
            if j > 0:
                parts.append([self.ells[j - 1]])
            parts.append(self.us[j])
        return np.concatenate(parts)

    def replace_stacked(self, vec):
        """Rebuild from a stacked vector with the same layout (gauge kept)."""
        vec = np.asarray(vec, dtype=complex)
        ells, us, pos = [], [], 0
        for j, n in enumerate(self.sizes):
            if j > 0:
                ells.append(vec[pos])
                pos += 1
            us.append(vec[pos:pos + n - 1])
            pos += n - 1
        return ReducedParams(self.k_min, np.array(ells), tuple(us), self.anchor, self.k0)

    def translate(self, w):
        return ReducedParams(self.k_min, self.ells, self.us, self.anchor + w, self.k0)


def reduce(cfg: Configuration, k0=None) -> ReducedParams:
    """Change of variables to (ell, u) with the gauge point p_{k0,1}."""
    k0 = cfg.k_min if k0 is None else k0
    firsts = np.array([lv[0] for lv in cfg.levels])
    ells = np.diff(firsts)
    us = tuple(lv[1:] - lv[0] for lv in cfg.levels)
    return ReducedParams(cfg.k_min, ells, us, complex(cfg.level(k0)[0]), k0)


def realize(rp: ReducedParams, check=True) -> Configuration:
    """Inverse of :func:`reduce`."""
    j0 = rp.k0 - rp.k_min
    firsts = np.zeros(len(rp.us), dtype=complex)
    cs = np.concatenate([[0], np.cumsum(rp.ells)])
    firsts = rp.anchor + cs - cs[j0]
    # exact at the anchor level
    firsts[j0] = rp.anchor
    levels = tuple(np.concatenate([[f], f + u]) for f, u in zip(firsts, rp.us))
    return Configuration(levels, rp.k_min, check=check)


def forces_reduced(rp: ReducedParams) -> ForceStack:
    """Forces straight from the reduced variables (no anchor involved).

    Each level is placed relative to the first point of the level below, so
    the differences entering the force terms are exactly
    u_{k,i} - ell_{k+1} - u_{k+1,j} and u_{k,i} + ell_k - u_{k-1,j}.
    """
    n = len(rp.us)
    F_parts = []
    G = np.zeros(n, dtype=complex)
    sizes = rp.sizes
    for j in range(n):
        uk = np.concatenate([[0], rp.us[j]])
        ck = 1.0 / sizes[j]
        d = uk[:, None] - uk[None, :]
        np.fill_diagonal(d, np.inf)
        f = 2 * ck * ck * (1 / d).sum(axis=1)
        if j + 1 < n:
            uu = np.concatenate([[0], rp.us[j + 1]])
            f -= ck / sizes[j + 1] * (1 / (uk[:, None] - rp.ells[j] - uu[None, :])).sum(axis=1)
        if j > 0:
            ul = np.concatenate([[0], rp.us[j - 1]])
            inv = 1 / (uk[:, None] + rp.ells[j - 1] - ul[None, :])
            f -= ck / sizes[j - 1] * inv.sum(axis=1)
            G[j] = ck / sizes[j - 1] * inv.sum()
        F_parts.append(f)
    ptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    return ForceStack(rp.k_min, sizes, np.concatenate(F_parts), G, ptr)


# ---------------------------------------------------------------------------
# Jacobians


def point_jacobian(cfg: Configuration):
    """Sparse complex Jacobian dF/dp (rows and columns in flat point order)."""
    pts, ptr = cfg.flat()
    indptr, indices, data = kernels.force_jacobian(pts, ptr)
    n = len(pts)
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def gvalue_point_jacobian(cfg: Configuration):
    """Sparse complex Jacobian dG/dp, one row per level (row 0 empty)."""
    pts, ptr = cfg.flat()
    indptr, indices, data = kernels.gvalue_jacobian(pts, ptr)
    return sp.csr_matrix((data, indices, indptr), shape=(len(ptr) - 1, len(pts)))


@dataclass(frozen=True)
class JacobianBand:
    """Block-tridiagonal Jacobian of the stacked forces w.r.t. stacked (ell, u).

    ``blocks[(k, m)]`` is d(G_k, F_{k,2..}) / d(ell_m, u_{m,2..}) for |k - m| <= 1;
    blocks further from the diagonal do not exist (they are exactly zero).
    """

    k_min: int
    dims: tuple
    blocks: dict

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.dims)]).astype(int)

    @property
    def shape(self):
        n = int(sum(self.dims))
        return (n, n)

    def block(self, k, m):
        if abs(k - m) > 1:
            j, i = k - self.k_min, m - self.k_min
            return np.zeros((self.dims[j], self.dims[i]), dtype=complex)
        return self.blocks[(k, m)]

    def to_dense(self):
        off = self.offsets
        out = np.zeros(self.shape, dtype=complex)
        for (k, m), blk in self.blocks.items():
            j, i = k - self.k_min, m - self.k_min
            out[off[j]:off[j + 1], off[i]:off[i + 1]] = blk
        return out

    def to_sparse(self):
        off = self.offsets
        rows, cols, vals = [], [], []
        for (k, m), blk in self.blocks.items():
            j, i = k - self.k_min, m - self.k_min
            r, c = np.nonzero(np.ones_like(blk, dtype=bool))
            rows.append(r + off[j])
            cols.append(c + off[i])
            vals.append(blk.ravel())
        if not rows:
            return sp.csr_matrix(self.shape, dtype=complex)
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=self.shape,
        )

    def real_form(self):
        """Dense real matrix of the same map in (Re, Im) coordinates."""
        a = self.to_dense()
        return np.block([[a.real, -a.imag], [a.imag, a.real]])


def jacobian(rp) -> JacobianBand:
    """Analytic Jacobian of the stacked force vector in reduced coordinates.

    Accepts ReducedParams or a Configuration. For an output row on level k
    we place level k-1 at p_{k,1} - ell_k + u and level k+1 at
    p_{k,1} + ell_{k+1} + u, which makes the coupling to ell_{k-1} exactly zero.
    """
    cfg = realize(rp) if isinstance(rp, ReducedParams) else rp
    JF = point_jacobian(cfg).tocsr()
    JG = gvalue_point_jacobian(cfg).tocsr()
    sizes = cfg.sizes
    ptr = cfg.level_type.level_ptr()
    nlev = len(sizes)
    dims = tuple(n - 1 if j == 0 else n for j, n in enumerate(sizes))
    blocks = {}
    for j in range(nlev):
        k = cfg.k_min + j
        lo = ptr[max(j - 1, 0)]
        hi = ptr[min(j + 2, nlev)]
        # output rows: G_k then F_{k,2..}
        rows = []
        if j > 0:
            rows.append(JG[j, lo:hi].toarray().ravel())
        for r in range(ptr[j] + 1, ptr[j + 1]):
            rows.append(JF[r, lo:hi].toarray().ravel())
        D = np.array(rows, dtype=complex).reshape(len(rows), hi - lo)
        for m in (j - 1, j, j + 1):
            if not 0 <= m < nlev:
                continue
            T = np.zeros((hi - lo, dims[m]), dtype=complex)
            col = 0
            if m > 0:
                if m == j + 1:
                    T[ptr[m] - lo:ptr[m + 1] - lo, 0] = 1.0
                elif m == j:
                    T[ptr[j - 1] - lo:ptr[j] - lo, 0] = -1.0
                col = 1
            for r in range(ptr[m] + 1, ptr[m + 1]):
                T[r - lo, col] = 1.0
                col += 1
            blocks[(k, cfg.k_min + m)] = D @ T
    return JacobianBand(cfg.k_min, dims, blocks)


# ---------------------------------------------------------------------------
# width, value-set and separation hypotheses


@dataclass
class HypothesesReport:
    width: int
    distinct_values: int
    finitely_valued: bool
    mean_margins: dict
    min_margin: float

    @property
    def passed(self):
        return self.finitely_valued and self.min_margin > 0

    def to_json(self):
        return {
            "width": self.width,
            "distinct_values": self.distinct_values,
            "finitely_valued": self.finitely_valued,
            "mean_margins": {str(k): v for k, v in self.mean_margins.items()},
            "min_margin": self.min_margin,
            "pass": self.passed,
        }


def distinct_count(values, tol=1e-9):
    """Number of distinct complex values up to ``tol`` (greedy clustering)."""
    vals = np.asarray(values, dtype=complex).ravel()
    reps = []
    for v in vals:
        if not any(abs(v - r) <= tol * (1 + abs(r)) for r in reps):
            reps.append(v)
    return len(reps)


def check_hypotheses(cfg: Configuration, max_distinct=None, tol=1e-9):
    """Width, distinct values of the reduced sequence, level-mean separation.

    The mean margin for level k is |mean(p_k) - mean(p_{k-1})|, which must be
    positive for the Gauss map to have exactly a double zero/pole at the end.
    """
    rp = reduce(cfg)
    nvals = distinct_count(rp.stacked, tol) if len(rp.stacked) else 0
    finite = True if max_distinct is None else nvals <= max_distinct
    means = [lv.mean() for lv in cfg.levels]
    margins = {
        cfg.k_min + j: float(abs(means[j] - means[j - 1])) for j in range(1, len(means))
    }
    return HypothesesReport(
        width=cfg.width,
        distinct_values=nvals,
        finitely_valued=finite,
        mean_margins=margins,
        min_margin=min(margins.values()) if margins else float("inf"),
    )


# ---------------------------------------------------------------------------
# JSON


def _pair(z):
    return [float(z.real), float(z.imag)]


def _parse_pair(x, where):
    if not (isinstance(x, (list, tuple)) and len(x) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)):
        raise ValueError(f"{where}: expected [re, im], got {x!r}")
    return complex(x[0], x[1])


def configuration_from_json(obj, check=True):
    """Strict parse of {"levels": [{"k": int, "points": [[re, im], ...]}, ...]}."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or set(obj) != {"levels"}:
        extra = set(obj) - {"levels"} if isinstance(obj, dict) else obj
        raise ValueError(f"configuration must have exactly the field 'levels' (got {extra!r})")
    levels = {}
    for n, lv in enumerate(obj["levels"]):
        if not isinstance(lv, dict) or set(lv) != {"k", "points"}:
            raise ValueError(f"levels[{n}] must have exactly the fields 'k' and 'points'")
        k = lv["k"]
        if not isinstance(k, int) or isinstance(k, bool):
            raise ValueError(f"levels[{n}].k must be an integer")
        if k in levels:
            raise ValueError(f"level {k} given twice")
        levels[k] = [_parse_pair(p, f"levels[{n}].points") for p in lv["points"]]
    if not levels:
        raise ValueError("configuration has no levels")
    return Configuration.from_points(levels, check=check)


def configuration_to_json(cfg: Configuration):
    return {
        "levels": [
            {"k": cfg.k_min + j, "points": [_pair(z) for z in lv]}
            for j, lv in enumerate(cfg.levels)
        ]
    }


def forces_to_json(fs: ForceStack):
    out = []
    for j, n in enumerate(fs.sizes):
        k = fs.k_min + j
        entry = {
            "k": k,
            "forces": [_pair(z) for z in fs.level_forces(k)],
            "partial": fs.is_partial(k),
        }
        if j > 0:
            entry["G"] = _pair(fs.gvalues[j])
        out.append(entry)
    return {"levels": out, "interior_max": fs.interior_max()}
