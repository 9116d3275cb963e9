"""Reference-value checks: each line carries computed, reference, deviation, tolerance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import balance
from .configspace import Configuration, forces
from .periods import central_charts, laurent, limit_balance, zero_alignment


@dataclass
class CheckLine:
    name: str
    computed: object
    reference: object
    deviation: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.deviation) and self.deviation <= self.tolerance)

    def to_json(self):
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            return v

        return {"name": self.name, "computed": enc(self.computed),
                "reference": enc(self.reference), "deviation": self.deviation,
                "tolerance": self.tolerance, "pass": self.passed}

    def summary(self):
        return "%s %s: deviation %.3g (tolerance %.1g)" % (
            "PASS" if self.passed else "FAIL", self.name, self.deviation, self.tolerance)


def _rel(x, ref):
    return float(abs(x - ref) / max(abs(ref), 1e-300))


def _min_gap(pts):
    if len(pts) < 2:
        return np.inf
    d = np.abs(np.subtract.outer(pts, pts))
    np.fill_diagonal(d, np.inf)
    return d.min()


def random_configuration(sizes, rng, spread=1.0, min_gap=0.05):
    """Random points per level (rejecting near coincidences within a level)."""
    while True:
        levels = [rng.normal(scale=spread, size=n) + 1j * rng.normal(scale=spread, size=n)
                  for n in sizes]
        if all(_min_gap(lv) > min_gap for lv in levels):
            return Configuration.from_points(levels)


def example_blocks():
    """Name -> balanced built-in block used throughout the checks."""
    out = {"riemann": balance.chain(h=4), "ladder22": balance.ladder22()}
    for n in range(1, 7):
        out[f"fan{n}"] = balance.fan(n)
    return out


def residual_checks(tol=1e-12):
    lines = []
    for a in (1.0, 2.0, 0.5 + 0.5j):
        F = balance.residual_force(balance.chain(a))
        lines.append(CheckLine(f"residual chain a={a}", F, 1 / a, _rel(F, 1 / a), tol))
    for n in range(1, 7):
        F = balance.residual_force(balance.fan(n))
        ref = balance.fan_residual(n)
        lines.append(CheckLine(f"residual fan n={n}", F, ref, _rel(F, ref), tol))
    F = balance.residual_force(balance.ladder22())
    ref = 2 / 3j
    lines.append(CheckLine("residual ladder22", F, ref, _rel(F, ref), tol))
    return lines


def determinant_check(tol=1e-10):
    cert = balance.certify(balance.ladder22())
    d = abs(cert.determinant)
    return [CheckLine("ladder22 reduced determinant", d, 4 / 243, _rel(d, 4 / 243), tol)]


def identity_checks(trials=100, seed=0, tol=1e-10):
    rng = np.random.default_rng(seed)
    lines = []
    for sizes in ((1, 1), (1, 2, 1), (1, 2, 2, 1), (1, 3, 1)):
        worst_sum = worst_mom = 0.0
        for _ in range(trials):
            cfg = random_configuration(sizes, rng)
            F = forces(cfg).forces
            pts, _ = cfg.flat()
            scale = 1 + np.max(np.abs(pts * F))
            ref = 1 - sum(1.0 / n for n in sizes)
            worst_sum = max(worst_sum, abs(F.sum()) / scale)
            worst_mom = max(worst_mom, abs((pts * F).sum() - ref) / scale)
        lines.append(CheckLine(f"sum F type {sizes}", worst_sum, 0.0, worst_sum, tol))
        lines.append(CheckLine(f"sum pF type {sizes}", worst_mom, 0.0, worst_mom, tol))
    return lines


def limit_balance_checks(trials=20, seed=0, tol=1e-10):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        sizes = tuple(rng.integers(1, 4, size=rng.integers(2, 5)))
        cfg = random_configuration(sizes, rng)
        worst = max(worst, limit_balance(central_charts(cfg)).deviation)
    return [CheckLine("residue balance equals 4 pi i F", worst, 0.0, worst, tol)]


def laurent_checks(tol=1e-12):
    worst = 0.0
    for b in example_blocks().values():
        fam = central_charts(b.inner)
        for k, i in fam.interior_necks():
            blk = laurent(fam, k, i)
            worst = max(worst, abs(blk.c_m1 + blk.gamma))
    return [CheckLine("Laurent c_-1 = -gamma", worst, 0.0, worst, tol)]


def zero_count_checks(tol=1e-9):
    lines = []
    worst_count, worst_z = 0.0, 0.0
    for b in example_blocks().values():
        fam = central_charts(b.inner)
        for k in fam.interior_spheres():
            rep = zero_alignment(fam[k])
            worst_count = max(worst_count, abs(rep.count - rep.expected))
            worst_z = max(worst_z, rep.max_Z)
    lines.append(CheckLine("zero count n_k + n_(k-1) - 2", worst_count, 0.0, worst_count, 1e-6))
    lines.append(CheckLine("zero alignment Z", worst_z, 0.0, worst_z, tol))
    return lines


def run_all(seed=0, tol=None):
    """Every check; ``tol`` (if given) overrides the per-check tolerances."""
    lines = (residual_checks() + determinant_check() + identity_checks(seed=seed)
             + limit_balance_checks(seed=seed) + laurent_checks() + zero_count_checks())
    if tol is not None:
        for ln in lines:
            ln.tolerance = tol
    return lines
