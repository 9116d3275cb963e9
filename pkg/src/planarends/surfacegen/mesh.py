"""Triangulated sheets-plus-necks surface, topology, curvature and OBJ export."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Delaunay

from .necks import NeckModel, ring_angles
from .sheets import DEFAULT_GRID, DEFAULT_RING, SheetModel


@dataclass(eq=False)
class SurfaceMesh:
    vertices: np.ndarray  # (V, 3)
    triangles: np.ndarray  # (T, 3) int, 0-based
    tags: list = field(default_factory=list)  # tag names; ("sheet", k) or ("neck", k, i)
    vertex_tag: np.ndarray = None  # (V,) index into tags
    face_tag: np.ndarray = None  # (T,)
    frame: str = "scaled"

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.vertex_tag is None:
            self.vertex_tag = np.zeros(len(self.vertices), dtype=np.int64)
        if self.face_tag is None:
            self.face_tag = np.zeros(len(self.triangles), dtype=np.int64)

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64), [])

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.triangles)

    def tag_name(self, tag):
        return "sheet %d" % tag[1] if tag[0] == "sheet" else "neck %d %d" % (tag[1], tag[2])

    def areas(self):
        P = self.vertices[self.triangles]
        return 0.5 * np.linalg.norm(np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]), axis=1)

    def normals(self):
        P = self.vertices[self.triangles]
        n = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def edges(self):
        """Unique undirected edges and how many faces use each."""
        e = np.sort(self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
        return np.unique(e, axis=0, return_counts=True)

    def euler_characteristic(self):
        e, _ = self.edges()
        used = np.unique(self.triangles)
        return int(len(used) - len(e) + len(self.triangles))

    def boundary_loops(self):
        e, cnt = self.edges()
        b = e[cnt == 1]
        if len(b) == 0:
            return 0
        nodes, inv = np.unique(b, return_inverse=True)
        inv = inv.reshape(-1, 2)
        m = len(nodes)
        adj = coo_matrix((np.ones(len(b)), (inv[:, 0], inv[:, 1])), shape=(m, m))
        return int(connected_components(adj, directed=False)[0])

    def components(self):
        if self.n_faces == 0:
            return 0
        t = self.triangles
        rows = np.concatenate([t[:, 0], t[:, 1]])
        cols = np.concatenate([t[:, 1], t[:, 2]])
        adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n_vertices,) * 2)
        n, lab = connected_components(adj, directed=False)
        return len(np.unique(lab[np.unique(t)]))

    def genus(self):
        """(2 C - b - chi) / 2 for an orientable mesh with C components and b boundary loops."""
        g2 = 2 * self.components() - self.boundary_loops() - self.euler_characteristic()
        if g2 % 2:
            raise ValueError("odd genus numerator: mesh is not a surface")
        return g2 // 2

    def is_manifold(self):
        _, cnt = self.edges()
        return bool(np.all(cnt <= 2))

    def is_consistently_oriented(self):
        """Every interior edge is traversed once in each direction."""
        d = self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        _, cnt = np.unique(d, axis=0, return_counts=True)
        return bool(np.all(cnt == 1))

    def min_area(self):
        return float(self.areas().min()) if self.n_faces else 0.0

    def unscaled(self, t):
        """Apply the inverse horizontal scaling (x1, x2) -> (x1, x2) / (2t)."""
        V = self.vertices.copy()
        V[:, :2] /= 2.0 * t
        return SurfaceMesh(V, self.triangles.copy(), list(self.tags), self.vertex_tag.copy(),
                           self.face_tag.copy(), "unscaled")


def mean_curvature(mesh: SurfaceMesh):
    """Cotan-Laplacian |H| per vertex (mixed barycentric area); NaN on the boundary."""
    V, T = mesh.vertices, mesh.triangles
    n = len(V)
    Hn = np.zeros((n, 3))
    area = np.zeros(n)
    for j in range(3):
        i0, i1, i2 = T[:, j], T[:, (j + 1) % 3], T[:, (j + 2) % 3]
        u, v = V[i1] - V[i0], V[i2] - V[i0]
        cot = np.einsum("ij,ij->i", u, v) / np.linalg.norm(np.cross(u, v), axis=1)
        # the angle at i0 is opposite the edge (i1, i2)
        d = V[i1] - V[i2]
        np.add.at(Hn, i1, cot[:, None] * d)
        np.add.at(Hn, i2, -cot[:, None] * d)
    np.add.at(area, T.ravel(), np.repeat(mesh.areas() / 3.0, 3))
    H = np.linalg.norm(Hn, axis=1) / (4.0 * np.maximum(area, 1e-300))
    e, cnt = mesh.edges()
    H[np.unique(e[cnt == 1])] = np.nan
    return H


# ---------------------------------------------------------------------------
# tessellation


def _orient(tri, xy, sign):
    P = xy[tri]
    area = ((P[:, 1, 0] - P[:, 0, 0]) * (P[:, 2, 1] - P[:, 0, 1])
            - (P[:, 1, 1] - P[:, 0, 1]) * (P[:, 2, 0] - P[:, 0, 0]))
    flip = np.sign(area) != sign
    tri = tri.copy()
    tri[flip] = tri[flip][:, [0, 2, 1]]
    return tri


def sheet_vertices_xy(sheet: SheetModel, grid=DEFAULT_GRID, ring=DEFAULT_RING):
    """Grid points outside the holes followed by the hole rings (up-centres first)."""
    X = sheet.grid(grid).ravel()
    centers = sheet.centers
    if len(centers):
        h = max(sheet.box[1] - sheet.box[0], sheet.box[3] - sheet.box[2]) / (grid - 1)
        d = np.min(np.abs(X[:, None] - centers[None, :]), axis=1)
        X = X[d > sheet.eps + 0.35 * h]
    theta = ring_angles(ring)
    rings = (centers[:, None] + sheet.eps * np.exp(1j * theta)[None, :]).ravel()
    return np.concatenate([X, rings]), len(X)


def tessellate_sheet(sheet: SheetModel, grid=DEFAULT_GRID, ring=DEFAULT_RING):
    """(xyz, triangles, ring_start) with triangles oriented to the sheet normal."""
    X, n_grid = sheet_vertices_xy(sheet, grid, ring)
    xy = np.stack([X.real, X.imag], axis=1)
    tri = Delaunay(xy).simplices.astype(np.int64)
    keep = np.ones(len(tri), dtype=bool)
    r = tri - n_grid
    on_ring = r >= 0
    same = on_ring.all(axis=1) & (r[:, 0] // ring == r[:, 1] // ring) & (r[:, 1] // ring == r[:, 2] // ring)
    keep &= ~same
    cen = X[tri].mean(axis=1)
    if len(sheet.centers):
        keep &= np.min(np.abs(cen[:, None] - sheet.centers[None, :]), axis=1) > sheet.eps
    tri = _orient(tri[keep], xy, sheet.normal_sign)
    xyz = np.column_stack([xy, sheet.height(X)])
    return xyz, tri, n_grid


def tessellate_neck(neck: NeckModel, lo_ring, hi_ring, start, lower_parity):
    """Interior rows as new vertices; boundary rows are the sheet ring indices."""
    P = neck.points()
    rows, ring = P.shape[:2]
    inner = P[1:-1].reshape(-1, 3)
    idx = np.empty((rows, ring), dtype=np.int64)
    idx[0] = lo_ring
    idx[-1] = hi_ring
    idx[1:-1] = start + np.arange((rows - 2) * ring).reshape(rows - 2, ring)
    j1 = np.roll(np.arange(ring), -1)
    a, b = idx[:-1], idx[:-1][:, j1]
    c, d = idx[1:], idx[1:][:, j1]
    if lower_parity == 0:
        # lower sheet faces down: the neck faces its axis
        t1 = np.stack([a, c, d], axis=-1)
        t2 = np.stack([a, d, b], axis=-1)
    else:
        t1 = np.stack([a, b, d], axis=-1)
        t2 = np.stack([a, d, c], axis=-1)
    tri = np.concatenate([t1.reshape(-1, 3), t2.reshape(-1, 3)])
    return inner, tri


def assemble(sheets: list[SheetModel], necks: list[NeckModel], grid=DEFAULT_GRID,
             ring=DEFAULT_RING):
    """Single mesh; sheet vertices (grid then rings) per sheet, then neck interiors."""
    verts, tris, vtag, ftag, tags = [], [], [], [], []
    ring_index = {}  # (k, "up"/"down", i) -> global vertex indices
    offset = 0
    for s in sheets:
        xyz, tri, n_grid = tessellate_sheet(s, grid, ring)
        tag = len(tags)
        tags.append(("sheet", s.k))
        verts.append(xyz)
        tris.append(tri + offset)
        vtag.append(np.full(len(xyz), tag))
        ftag.append(np.full(len(tri), tag))
        base = offset + n_grid
        for i in range(len(s.up)):
            ring_index[(s.k, "up", i)] = base + i * ring + np.arange(ring)
        base += len(s.up) * ring
        for i in range(len(s.down)):
            ring_index[(s.k + 0, "down", i)] = base + i * ring + np.arange(ring)
        offset += len(xyz)
    for n in necks:
        lo = ring_index[(n.k, "up", n.i - 1)]
        hi = ring_index[(n.k + 1, "down", n.i - 1)]
        inner, tri = tessellate_neck(n, lo, hi, offset, n.k % 2)
        tag = len(tags)
        tags.append(("neck", n.k, n.i))
        verts.append(inner)
        tris.append(tri)
        vtag.append(np.full(len(inner), tag))
        ftag.append(np.full(len(tri), tag))
        offset += len(inner)
    if not verts:
        return SurfaceMesh.empty()
    return SurfaceMesh(np.concatenate(verts), np.concatenate(tris), tags,
                       np.concatenate(vtag).astype(np.int64),
                       np.concatenate(ftag).astype(np.int64))


def expected_vertex_count(sheets, necks, grid=DEFAULT_GRID, ring=DEFAULT_RING):
    """Per sheet the kept grid points plus one ring per hole; per neck ring * (rows - 2)."""
    total = 0
    for s in sheets:
        total += sheet_vertices_xy(s, grid, ring)[1] + len(s.centers) * ring
    for n in necks:
        total += ring * (n.rows - 2)
    return total


def catenoid_mesh(c=1.0, height=2.0, ring=DEFAULT_RING, rows=33):
    """Closed-form catenoid rho = c cosh(x3 / c), |x3| <= height, as a tube mesh."""
    theta = ring_angles(ring)
    s = np.linspace(-height / c, height / c, rows)
    rho, x3 = c * np.cosh(s), c * s
    X = rho[:, None] * np.exp(1j * theta)[None, :]
    V = np.stack([X.real, X.imag, np.broadcast_to(x3[:, None], X.shape)], axis=-1).reshape(-1, 3)
    idx = np.arange(rows * ring).reshape(rows, ring)
    j1 = np.roll(np.arange(ring), -1)
    a, b, cc, d = idx[:-1], idx[:-1][:, j1], idx[1:], idx[1:][:, j1]
    tri = np.concatenate([np.stack([a, cc, d], -1).reshape(-1, 3),
                          np.stack([a, d, b], -1).reshape(-1, 3)])
    return SurfaceMesh(V, tri, [("neck", 0, 1)])


# ---------------------------------------------------------------------------
# export


HEADER = "# planarends first-order surface model (sheets and catenoid necks, approximate)"


def export_mesh(mesh: SurfaceMesh, path):
    """Write an OBJ file; tags become comment lines with 1-based vertex and face ranges."""
    lines = [HEADER,
             "# frame %s" % mesh.frame,
             "# vertices %d faces %d" % (mesh.n_vertices, mesh.n_faces)]
    for j, tag in enumerate(mesh.tags):
        vi = np.flatnonzero(mesh.vertex_tag == j)
        fi = np.flatnonzero(mesh.face_tag == j)
        vr = "%d-%d" % (vi[0] + 1, vi[-1] + 1) if len(vi) else "none"
        fr = "%d-%d" % (fi[0] + 1, fi[-1] + 1) if len(fi) else "none"
        lines.append("# tag %s vertices %s faces %s" % (mesh.tag_name(tag), vr, fr))
    lines.extend("v %.12g %.12g %.12g" % tuple(p) for p in mesh.vertices)
    lines.extend("f %d %d %d" % tuple(f + 1) for f in mesh.triangles)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_obj(path):
    """Vertices and 0-based faces of an OBJ file written by export_mesh."""
    V, F = [], []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if line.startswith("v "):
                V.append([float(x) for x in line.split()[1:4]])
            elif line.startswith("f "):
                F.append([int(x) - 1 for x in line.split()[1:4]])
    return np.array(V, dtype=float).reshape(-1, 3), np.array(F, dtype=np.int64).reshape(-1, 3)
