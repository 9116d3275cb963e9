"""Graph sheets between consecutive levels of necks.

All sheets share the horizontal coordinate X = conj(p): the neck at p_{k,i}
sits at X = conj(p_{k,i}) on every sheet it touches. Sheet k lies between
the necks of level k-1 (below) and level k (above) and is the graph of

    h_k(X) = sum_j c_{k-1} log|X - conj p_{k-1,j}| - sum_i c_k log|X - conj p_{k,i}|

shifted by an offset H_k with H_{k+1} - H_k = -2 c_k log t. In chart
coordinates this is X = conj(z) + conj(ref) on even spheres and
X = conj(ref) - z on odd ones, so h_k(X(z)) equals the chart height.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .. import kernels
from ..configspace import Configuration

DEFAULT_EPS = 0.1
DEFAULT_GRID = 128
DEFAULT_MARGIN = 3.0
DEFAULT_RING = 32


class SheetOverlapError(ValueError):
    """Consecutive sheets overlap vertically: t is too large."""


@dataclass(frozen=True, eq=False)
class SheetModel:
    k: int
    up: np.ndarray  # X of the necks to level k (h -> +inf)
    down: np.ndarray  # X of the necks to level k-1 (h -> -inf)
    c_up: float
    c_down: float
    offset: float
    eps: float
    box: tuple  # (xmin, xmax, ymin, ymax)
    ref: complex  # p_{k-1,1} (or p_{k,1} on the bottom sheet)

    @property
    def parity(self):
        return self.k % 2

    @property
    def normal_sign(self):
        """-1: the sheet faces down (even k); +1: it faces up (odd k)."""
        return -1 if self.k % 2 == 0 else 1

    @property
    def centers(self):
        return np.concatenate([self.up, self.down])

    def h(self, X):
        X = np.asarray(X, dtype=complex)
        w = np.concatenate([np.full(len(self.down), self.c_down),
                            np.full(len(self.up), -self.c_up)])
        centers = np.concatenate([self.down, self.up])
        return kernels.log_potential(X, centers, w)

    def height(self, X):
        return self.offset + self.h(X)

    def chart_to_global(self, z):
        z = np.asarray(z, dtype=complex)
        if self.k % 2 == 0:
            return np.conj(z) + np.conj(self.ref)
        return np.conj(self.ref) - z

    def global_to_chart(self, X):
        X = np.asarray(X, dtype=complex)
        if self.k % 2 == 0:
            return np.conj(X - np.conj(self.ref))
        return np.conj(self.ref) - X

    def grid(self, n):
        x0, x1, y0, y1 = self.box
        xs, ys = np.linspace(x0, x1, n), np.linspace(y0, y1, n)
        return xs[None, :] + 1j * ys[:, None]

    def domain_mask(self, X):
        """True outside the eps-disks about the necks."""
        c = self.centers
        if len(c) == 0:
            return np.ones(np.shape(X), dtype=bool)
        d = np.min(np.abs(np.asarray(X)[..., None] - c), axis=-1)
        return d > self.eps

    def sup_abs_h(self, n=DEFAULT_GRID):
        X = self.grid(n)
        X = X[self.domain_mask(X)]
        theta = 2 * np.pi * np.arange(64) / 64
        rings = (self.centers[:, None] + self.eps * np.exp(1j * theta)[None, :]).ravel()
        vals = self.h(np.concatenate([X, rings]))
        return float(np.max(np.abs(vals)))

    def level_components(self, eta, n=DEFAULT_GRID):
        """Connected pieces of {h >= eta} on a grid, and the up-centres each holds."""
        X = self.grid(n)
        lab, count = ndimage.label(self.h(X) >= eta)
        held = []
        x0, x1, y0, y1 = self.box
        for p in self.up:
            jx = int(round((p.real - x0) / (x1 - x0) * (n - 1)))
            jy = int(round((p.imag - y0) / (y1 - y0) * (n - 1)))
            held.append(int(lab[jy, jx]) if 0 <= jx < n and 0 <= jy < n else 0)
        return count, held


def window_box(cfg: Configuration, margin=DEFAULT_MARGIN):
    X = np.conj(np.concatenate(cfg.levels))
    return (float(X.real.min() - margin), float(X.real.max() + margin),
            float(X.imag.min() - margin), float(X.imag.max() + margin))


def sheet_offsets(cfg: Configuration, t, corrections=None):
    """H_k for sheets k_min .. k_max + 1, H_{k_min} = 0."""
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    H = [0.0]
    for j, lv in enumerate(cfg.levels):
        k = cfg.k_min + j
        gap = -2.0 / len(lv) * np.log(t)
        if corrections is not None:
            gap += corrections.get(k, 0.0)
        H.append(H[-1] + gap)
    return H


def finite_part_corrections(cfg: Configuration):
    """Extra gap per level from the t -> 0 finite part of the vertical period.

    For neck (k, i) the real part of the period from a+eps' to b+eps' equals
    (H_{k+1} + h_{k+1}(b+eps')) - (H_k + h_k(a+eps')); the correction is that
    identity solved for H_{k+1} - H_k + 2 c_k log t and averaged over the level.
    """
    from ..periods.charts import central_charts
    from ..periods.laurent import laurent, vertical_finite_part_limit

    fam = central_charts(cfg)
    out = {}
    for j, lv in enumerate(cfg.levels):
        k = cfg.k_min + j
        lo, hi = fam[k], fam[k + 1]
        if not (lo.n_b and hi.n_a):
            continue
        vals = []
        for i in range(1, len(lv) + 1):
            blk = laurent(fam, k, i)
            ep = blk.consts.eps_p
            h_lo = float(np.real(np.sum(lo.gamma_b * np.log(np.abs(blk.node_a + ep - lo.nodes_b))))
                         - np.sum(lo.gamma_a * np.log(np.abs(blk.node_a + ep - lo.nodes_a))))
            h_hi = float(np.real(np.sum(hi.gamma_b * np.log(np.abs(blk.node_b + ep - hi.nodes_b))))
                         - np.sum(hi.gamma_a * np.log(np.abs(blk.node_b + ep - hi.nodes_a))))
            vals.append(vertical_finite_part_limit(blk).real - h_hi + h_lo)
        out[k] = float(np.mean(vals))
    return out


def build_sheets(cfg: Configuration, t, eps=DEFAULT_EPS, margin=DEFAULT_MARGIN,
                 check=True, finite_part=False, grid=DEFAULT_GRID):
    """Sheets k_min .. k_max + 1 of the window with their offsets.

    With ``check`` an overlap of consecutive sheet height ranges raises
    SheetOverlapError.
    """
    box = window_box(cfg, margin)
    corr = finite_part_corrections(cfg) if finite_part else None
    H = sheet_offsets(cfg, t, corr)
    sheets = []
    for j in range(len(cfg.levels) + 1):
        k = cfg.k_min + j
        up = np.conj(cfg.level(k)) if j < len(cfg.levels) else np.zeros(0, complex)
        down = np.conj(cfg.level(k - 1)) if j > 0 else np.zeros(0, complex)
        ref = cfg.level(k - 1)[0] if j > 0 else cfg.level(k)[0]
        sheets.append(SheetModel(
            k, up, down,
            1.0 / len(up) if len(up) else 0.0,
            1.0 / len(down) if len(down) else 0.0,
            H[j], eps, box, complex(ref),
        ))
    if check:
        for s0, s1 in zip(sheets, sheets[1:]):
            lo = s0.offset + s0.sup_abs_h(grid)
            hi = s1.offset - s1.sup_abs_h(grid)
            if hi <= lo:
                raise SheetOverlapError(
                    f"sheets {s0.k} and {s1.k} overlap (margin {hi - lo:.3g}); decrease t"
                )
    return sheets


def choose_eta(sheet: SheetModel, n=DEFAULT_GRID, etas=None):
    """Smallest eta on a grid for which {h >= eta} splits into one piece per up-centre."""
    if len(sheet.up) == 0:
        return None
    if etas is None:
        etas = np.linspace(0.0, -sheet.c_up * np.log(sheet.eps), 41)
    for eta in etas:
        count, held = sheet.level_components(eta, n)
        if count == len(sheet.up) and len(set(held)) == len(held) and 0 not in held:
            return float(eta)
    return None
