"""Numeric embeddedness diagnostics for the sheets-plus-necks model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .mesh import SurfaceMesh
from .sheets import DEFAULT_GRID


@dataclass
class EmbeddednessReport:
    t: float
    slab_margins: dict  # (k, k+1) -> min above minus max below
    cylinder_margins: dict  # k -> min axis distance minus 2 eps
    sampled: int
    intersections: int
    witnesses: list = field(default_factory=list)

    @property
    def slabs_ok(self):
        return all(m > 0 for m in self.slab_margins.values())

    @property
    def cylinders_ok(self):
        return all(m > 0 for m in self.cylinder_margins.values())

    @property
    def passed(self):
        return self.slabs_ok and self.cylinders_ok and self.intersections == 0

    def to_json(self):
        return {
            "t": self.t,
            "approximate_model": True,
            "slab_separation": {"%d-%d" % k: v for k, v in sorted(self.slab_margins.items())},
            "min_slab_separation": min(self.slab_margins.values(), default=None),
            "cylinder_margin": {str(k): v for k, v in sorted(self.cylinder_margins.items())},
            "triangles_sampled": self.sampled,
            "intersections": self.intersections,
            "checks": {"slabs": self.slabs_ok, "cylinders": self.cylinders_ok,
                       "triangles": self.intersections == 0},
            "pass": self.passed,
        }


def slab(sheet, grid=DEFAULT_GRID):
    s = sheet.sup_abs_h(grid)
    return sheet.offset - s, sheet.offset + s


def _segment_hits(o, d, v0, v1, v2, eps=1e-12):
    """Moller-Trumbore for segments o + s d, s in [0, 1], against triangles (vectorised)."""
    e1, e2 = v1 - v0, v2 - v0
    p = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, p)
    ok = np.abs(det) > eps
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tv = o - v0
    u = np.einsum("ij,ij->i", tv, p) * inv
    q = np.cross(tv, e1)
    v = np.einsum("ij,ij->i", d, q) * inv
    s = np.einsum("ij,ij->i", e2, q) * inv
    return ok & (u >= 0) & (v >= 0) & (u + v <= 1) & (s >= 0) & (s <= 1)


def triangle_pairs_intersect(P, Q):
    """Row-wise test whether triangles P[n] and Q[n] (n, 3, 3) cross each other."""
    hit = np.zeros(len(P), dtype=bool)
    for A, B in ((P, Q), (Q, P)):
        for i, j in ((0, 1), (1, 2), (2, 0)):
            hit |= _segment_hits(A[:, i], A[:, j] - A[:, i], B[:, 0], B[:, 1], B[:, 2])
    return hit


def intersection_spot_check(mesh: SurfaceMesh, sample=4000, seed=0):
    """Intersections between a random sample of triangles and all nearby non-adjacent ones."""
    T, V = mesh.triangles, mesh.vertices
    if len(T) == 0:
        return 0, 0, []
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(len(T), size=min(sample, len(T)), replace=False))
    P = V[T]
    cen = P.mean(axis=1)
    rad = np.max(np.linalg.norm(P - cen[:, None, :], axis=2), axis=1)
    # large triangles are matched by brute force so the tree radius stays small
    cut = 4.0 * np.median(rad)
    small = np.flatnonzero(rad <= cut)
    big = np.flatnonzero(rad > cut)
    tree = cKDTree(cen[small])
    hits = tree.query_ball_point(cen[pick], rad[pick] + cut, return_sorted=False)
    counts = np.array([len(h) for h in hits], dtype=np.int64)
    ii = np.repeat(pick, counts)
    jj = small[np.concatenate(hits).astype(np.int64)] if counts.sum() else np.zeros(0, np.int64)
    if len(big):
        d = np.linalg.norm(cen[pick][:, None, :] - cen[big][None, :, :], axis=2)
        a, b = np.nonzero(d <= rad[pick][:, None] + rad[big][None, :])
        ii = np.concatenate([ii, pick[a]])
        jj = np.concatenate([jj, big[b]])
    near = (ii != jj) & (np.linalg.norm(cen[ii] - cen[jj], axis=1) <= rad[ii] + rad[jj])
    ii, jj = ii[near], jj[near]
    shared = (T[ii][:, :, None] == T[jj][:, None, :]).any(axis=(1, 2))
    ii, jj = ii[~shared], jj[~shared]
    hit = triangle_pairs_intersect(P[ii], P[jj])
    wit = [(int(a), int(b)) for a, b in zip(ii[hit][:10], jj[hit][:10])]
    return len(pick), int(hit.sum()), wit


def embeddedness_report(sheets, necks, t, mesh: SurfaceMesh | None = None, sample=4000,
                        seed=0, grid=DEFAULT_GRID):
    """Slab separation, neck cylinder disjointness and a triangle intersection spot check."""
    slabs = {}
    for s0, s1 in zip(sheets, sheets[1:]):
        slabs[(s0.k, s1.k)] = float(slab(s1, grid)[0] - slab(s0, grid)[1])
    cyl = {}
    by_level = {}
    for n in necks:
        by_level.setdefault(n.k, []).append(n)
    for k, ns in by_level.items():
        if len(ns) < 2:
            continue
        X = np.array([n.center for n in ns])
        d = np.abs(X[:, None] - X[None, :])
        d[np.diag_indices(len(X))] = np.inf
        cyl[k] = float(d.min() - 2 * max(n.eps for n in ns))
    sampled, hits, wit = (0, 0, []) if mesh is None else intersection_spot_check(mesh, sample, seed)
    return EmbeddednessReport(t, slabs, cyl, sampled, hits, wit)
