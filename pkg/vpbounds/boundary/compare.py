"""Cell-membership overlap between two boundaries."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Union

import numpy as np
import shapely
from shapely.geometry import shape
from shapely.ops import unary_union

from vpbounds.boundary.polygons import polygonize
from vpbounds.boundary.schemas import BoundarySet, OverlapReport
from vpbounds.core.errors import EmptyBoundaryError, GeometryError, UsageError
from vpbounds.grid.geodesy import row_areas_km2
from vpbounds.grid.spec import GridSpec

BoundaryLike = Union[BoundarySet, dict, list, np.ndarray]


def load_boundary_geojson(path: str | Path) -> dict[str, Any]:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"boundary file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise GeometryError(-1, f"invalid JSON: {exc}") from None


def _geometries(doc: dict | list) -> list:
    if isinstance(doc, dict):
        if doc.get("type") == "FeatureCollection":
            return [shape(f["geometry"]) for f in doc.get("features") or []]
        if doc.get("type") == "Feature":
            return [shape(doc["geometry"])]
        return [shape(doc)]
    return [g if hasattr(g, "geom_type") else shape(g) for g in doc]


def cell_mask(boundary: BoundaryLike, spec: GridSpec) -> np.ndarray:
    """Cells of ``spec`` whose centers lie inside ``boundary``.

    Boolean arrays are taken as masks over ``spec`` already; a BoundarySet on
    the same grid contributes its labelled cells directly.
    """
    if isinstance(boundary, np.ndarray):
        if boundary.shape != spec.shape:
            raise UsageError(f"mask shape {boundary.shape} does not match grid {spec.shape}")
        return boundary.astype(bool)
    if isinstance(boundary, BoundarySet):
        if boundary.spec == spec:
            return boundary.labels > 0
        boundary = polygonize(boundary)
    geoms = _geometries(boundary)
    if not geoms:
        return np.zeros(spec.shape, dtype=bool)
    region = unary_union(geoms)
    lat, lon = np.meshgrid(spec.lat_centers(), spec.lon_centers(), indexing="ij")
    return shapely.contains_xy(region, lon, lat)


def compare_boundaries(a: BoundaryLike, b: BoundaryLike, spec: GridSpec) -> OverlapReport:
    """Jaccard index and areas of two boundaries, measured on the cells of ``spec``.

    Raises:
        EmptyBoundaryError: either boundary covers no cell.
    """
    ma = cell_mask(a, spec)
    mb = cell_mask(b, spec)
    if not ma.any() or not mb.any():
        raise EmptyBoundaryError("both boundaries must cover at least one cell")
    areas = row_areas_km2(spec)[:, None] * np.ones(spec.shape)
    inter = ma & mb
    union = ma | mb

    def area(m: np.ndarray) -> float:
        return math.fsum(areas[m].tolist())

    a_union = area(union)
    return OverlapReport(
        jaccard=area(inter) / a_union,
        area_a_km2=area(ma),
        area_b_km2=area(mb),
        area_intersection_km2=area(inter),
        cells_a=int(ma.sum()),
        cells_b=int(mb.sum()),
        cells_intersection=int(inter.sum()),
    )
