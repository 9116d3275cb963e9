"""Rational functions with simple poles, sum_j res_j / (z - pole_j)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PoleNotFoundError(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class RationalForm:
    poles: np.ndarray
    residues: np.ndarray

    def __post_init__(self):
        p = np.array(self.poles, dtype=complex).ravel()
        r = np.array(self.residues, dtype=complex).ravel()
        if p.shape != r.shape:
            raise ValueError("need one residue per pole")
        p.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "poles", p)
        object.__setattr__(self, "residues", r)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for p, r in zip(self.poles, self.residues):
            out += r / (z - p)
        return out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for p, r in zip(self.poles, self.residues):
            out -= r / (z - p) ** 2
        return out

    def _index(self, pole, tol=1e-12):
        d = np.abs(self.poles - pole)
        j = int(np.argmin(d)) if d.size else -1
        if j < 0 or d[j] > tol * (1 + abs(pole)):
            raise PoleNotFoundError(f"{pole} is not a pole of this form")
        return j

    def residue(self, pole):
        return complex(self.residues[self._index(pole)])

    def regular_part(self, pole):
        """Value at ``pole`` of the form minus its principal part there."""
        j = self._index(pole)
        mask = np.ones(len(self.poles), dtype=bool)
        mask[j] = False
        return complex(np.sum(self.residues[mask] / (self.poles[j] - self.poles[mask])))

    def product_residue(self, other: "RationalForm", pole):
        """Residue of self * other at a common simple pole (double pole of the product).

        With self = A/(z-p) + f and other = B/(z-p) + h the residue is A h(p) + B f(p).
        """
        sa, so = self._has(pole), other._has(pole)
        if not (sa or so):
            raise PoleNotFoundError(f"{pole} is not a pole of either factor")
        A = self.residue(pole) if sa else 0j
        B = other.residue(pole) if so else 0j
        f = self.regular_part(pole) if sa else complex(self(pole))
        h = other.regular_part(pole) if so else complex(other(pole))
        return A * h + B * f

    def _has(self, pole):
        try:
            self._index(pole)
            return True
        except PoleNotFoundError:
            return False

    @property
    def total_residue(self):
        return complex(self.residues.sum())

    def moment(self, power=1):
        """sum_j res_j pole_j^power (coefficients of the expansion at infinity)."""
        return complex(np.sum(self.residues * self.poles ** power))

    def scaled(self, s):
        return RationalForm(self.poles, self.residues * s)


def residue(form: RationalForm, pole, other: RationalForm | None = None):
    """Residue of ``form`` (or of ``form * other``) at ``pole``."""
    if other is None:
        return form.residue(pole)
    return form.product_residue(other, pole)
