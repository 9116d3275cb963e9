"""Catenoid patches joining consecutive sheets.

Around X_c = conj(p_{k,i}) the neck is the surface of revolution
rho = w cosh((x3 - x0) / c) with c = c_k. Along each boundary ray theta the
two gluing heights H_lo (sheet k at X_c + eps e^{i theta}) and H_hi
(sheet k+1) fix x0 = (H_lo + H_hi) / 2 and w = eps / cosh((H_hi - H_lo) / (2c)),
so the patch meets both sheet rings exactly. The model is approximate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sheets import DEFAULT_RING, SheetModel

DEFAULT_ROWS = 24
CONTINUITY_TOL = 1e-9


class GluingError(ValueError):
    """A neck patch fails to meet its sheets."""


def ring_angles(ring=DEFAULT_RING):
    return 2 * np.pi * np.arange(ring) / ring


def matching_waist(h_lo, h_hi, c, eps):
    """w with x0 +- c arcosh(eps / w) = (h_lo, h_hi): eps / cosh((h_hi - h_lo) / (2c))."""
    u = (np.asarray(h_hi) - np.asarray(h_lo)) / (2.0 * c)
    if np.any(u <= 0):
        raise GluingError("upper gluing height is not above the lower one")
    return eps * np.exp(-u) * 2.0 / (1.0 + np.exp(-2.0 * u))


def catenoid_rows(x0, w, c, U, rows):
    """Rows of (rho, x3) on the profile, uniform in the parameter s in [-U, U]."""
    s = np.linspace(-1.0, 1.0, rows)[:, None] * np.asarray(U)[None, :]
    return w[None, :] * np.cosh(s), x0[None, :] + c * s


@dataclass(frozen=True, eq=False)
class NeckModel:
    k: int
    i: int  # 1-based within the level
    center: complex  # X of the axis
    a_node: complex  # p_{k,i}
    c: float
    eps: float
    theta: np.ndarray
    h_lo: np.ndarray  # sheet k heights on the gluing ring
    h_hi: np.ndarray  # sheet k+1 heights on the gluing ring
    rows: int
    min_u: float = 0.0  # floor on the half-height parameter for crossed sheets
    approximate: bool = True

    @property
    def x0(self):
        return 0.5 * (self.h_lo + self.h_hi)

    @property
    def U(self):
        return np.maximum((self.h_hi - self.h_lo) / (2.0 * self.c), self.min_u)

    @property
    def waists(self):
        return matching_waist(self.x0 - self.c * self.U, self.x0 + self.c * self.U, self.c, self.eps)

    @property
    def waist(self):
        return float(np.min(self.waists))

    def profile(self):
        """(rows, ring) arrays of rho and x3."""
        return catenoid_rows(self.x0, self.waists, self.c, self.U, self.rows)

    def points(self):
        rho, x3 = self.profile()
        X = self.center + rho * np.exp(1j * self.theta)[None, :]
        return np.stack([X.real, X.imag, x3], axis=-1)

    def gluing_mismatch(self):
        """Max distance between the patch boundary rows and the sheet ring points."""
        P = self.points()
        X = self.center + self.eps * np.exp(1j * self.theta)
        lo = np.stack([X.real, X.imag, self.h_lo], axis=-1)
        hi = np.stack([X.real, X.imag, self.h_hi], axis=-1)
        return float(max(np.max(np.abs(P[0] - lo)), np.max(np.abs(P[-1] - hi))))

    def to_json(self):
        return {"k": self.k, "i": self.i, "center": [self.center.real, self.center.imag],
                "c": self.c, "eps": self.eps, "waist_min": self.waist,
                "waist_max": float(np.max(self.waists)),
                "x0_mean": float(np.mean(self.x0)), "approximate": True}


def build_necks(sheets: list[SheetModel], t=None, ring=DEFAULT_RING, rows=DEFAULT_ROWS,
                tol=CONTINUITY_TOL, strict=True):
    """One catenoid patch per neck between consecutive sheets.

    With ``strict`` false, necks whose sheets cross at the gluing ring are kept
    with a tiny positive height so the embeddedness diagnostics can run.
    """
    theta = ring_angles(ring)
    out = []
    for lo, hi in zip(sheets, sheets[1:]):
        for i, X in enumerate(lo.up):
            ringX = X + lo.eps * np.exp(1j * theta)
            neck = NeckModel(lo.k, i + 1, complex(X), complex(np.conj(X)), lo.c_up, lo.eps,
                             theta, lo.height(ringX), hi.height(ringX), rows,
                             0.0 if strict else 1e-6)
            if np.any(neck.h_hi <= neck.h_lo):
                if strict:
                    raise GluingError(f"neck ({lo.k},{i + 1}): sheets cross at the gluing ring")
            elif neck.gluing_mismatch() > tol:
                raise GluingError(f"neck ({lo.k},{i + 1}) misses its sheets")
            out.append(neck)
    return out
