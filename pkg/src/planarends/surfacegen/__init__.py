"""First-order surface model: Gauss map, sheets, catenoid necks, meshes."""

from .embed import EmbeddednessReport, embeddedness_report, intersection_spot_check
from .gauss import gauss, neck_partner
from .mesh import (SurfaceMesh, assemble, catenoid_mesh, expected_vertex_count, export_mesh,
                   mean_curvature, read_obj)
from .necks import DEFAULT_ROWS, GluingError, NeckModel, build_necks, matching_waist
from .sheets import (DEFAULT_EPS, DEFAULT_GRID, DEFAULT_RING, SheetModel, SheetOverlapError,
                     build_sheets, choose_eta, sheet_offsets)


def build_surface(cfg, t, eps=DEFAULT_EPS, grid=DEFAULT_GRID, ring=DEFAULT_RING,
                  rows=DEFAULT_ROWS, check=True, finite_part=False):
    """Sheets, necks and the assembled mesh for a configuration window."""
    sheets = build_sheets(cfg, t, eps=eps, check=check, finite_part=finite_part, grid=grid)
    necks = build_necks(sheets, t, ring=ring, rows=rows, strict=check)
    return sheets, necks, assemble(sheets, necks, grid=grid, ring=ring)


__all__ = [
    "DEFAULT_EPS", "DEFAULT_GRID", "DEFAULT_RING", "DEFAULT_ROWS",
    "EmbeddednessReport", "GluingError", "NeckModel", "SheetModel", "SheetOverlapError",
    "SurfaceMesh", "assemble", "build_necks", "build_sheets", "build_surface",
    "catenoid_mesh", "choose_eta", "embeddedness_report", "expected_vertex_count",
    "export_mesh", "gauss", "intersection_spot_check", "matching_waist", "mean_curvature",
    "neck_partner", "read_obj", "sheet_offsets",
]
