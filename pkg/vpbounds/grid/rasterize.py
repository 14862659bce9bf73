"""Overlap-weighted polygon rasterization and point binning."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import shapely
from shapely.geometry import Polygon

from vpbounds.core.config import resolve_threads
from vpbounds.core.errors import DegeneratePolygonError, FieldError, GeometryError
from vpbounds.grid.spec import EDGE_EPS, DensityGrid, GridSpec

logger = logging.getLogger(__name__)

# Features per work unit. Fixed so the summation order never depends on the
# worker count.
_CHUNK = 64

LatLon = tuple[float, float]


@dataclass(frozen=True)
class ValuedPolygon:
    """A sampling polygon with the value spread evenly over its area.

    Rings are ``(lat, lon)`` vertex sequences: one exterior, then optional
    interior holes.
    """

    exterior: tuple[LatLon, ...]
    value: float
    holes: tuple[tuple[LatLon, ...], ...] = ()

    def planar(self, lon_scale: float) -> Polygon:
        """Shapely polygon in equirectangular coordinates ``(lon·lon_scale, lat)``."""

        def ring(points: Iterable[LatLon]) -> list[tuple[float, float]]:
            return [(lon * lon_scale, lat) for lat, lon in points]

        return Polygon(ring(self.exterior), [ring(h) for h in self.holes])


def planar_lon_scale(spec: GridSpec) -> float:
    """Longitude compression of the local equirectangular plane (cos of mid-latitude)."""
    return math.cos(math.radians(spec.mid_latitude))


def _validated(polygons: Sequence[ValuedPolygon], lon_scale: float) -> list[Polygon]:
    shapes: list[Polygon] = []
    for idx, poly in enumerate(polygons):
        if len(poly.exterior) < 3:
            raise GeometryError(idx, "exterior ring needs at least 3 vertices")
        if not math.isfinite(poly.value) or poly.value < 0:
            raise FieldError(idx, "value", "must be a finite nonnegative number")
        shape = poly.planar(lon_scale)
        if shape.area <= 0.0:
            raise DegeneratePolygonError(idx)
        shapes.append(shape)
    return shapes


def _rasterize_chunk(
    shapes: Sequence[Polygon],
    values: Sequence[float],
    spec: GridSpec,
    lon_scale: float,
) -> np.ndarray:
    out = np.zeros(spec.shape)
    cs = spec.cell_size
    for shape, value in zip(shapes, values):
        if value == 0.0:
            continue
        minx, miny, maxx, maxy = shape.bounds
        r0 = max(0, math.floor((miny - spec.lat_min) / cs))
        r1 = min(spec.n_rows, math.ceil((maxy - spec.lat_min) / cs))
        c0 = max(0, math.floor((minx / lon_scale - spec.lon_min) / cs))
        c1 = min(spec.n_cols, math.ceil((maxx / lon_scale - spec.lon_min) / cs))
        if r1 <= r0 or c1 <= c0:
            continue
        lat_edges = spec.lat_min + np.arange(r0, r1 + 1) * cs
        x_edges = (spec.lon_min + np.arange(c0, c1 + 1) * cs) * lon_scale
        y0, x0 = np.meshgrid(lat_edges[:-1], x_edges[:-1], indexing="ij")
        y1, x1 = np.meshgrid(lat_edges[1:], x_edges[1:], indexing="ij")
        boxes = shapely.box(x0, y0, x1, y1)
        overlap = shapely.area(shapely.intersection(shape, boxes))
        out[r0:r1, c0:c1] += overlap * (value / shape.area)
    return out


def rasterize_polygons(
    polygons: Sequence[ValuedPolygon],
    spec: GridSpec,
    *,
    threads: int | None = None,
) -> DensityGrid:
    """Spread each polygon's value over the cells it overlaps.

    Each cell receives ``Σ_a overlap(a, cell) / area(a) · value(a)``, with
    areas measured in the local equirectangular plane of the grid. Mass that
    falls outside the grid is lost; cells are never renormalized.

    Raises:
        GeometryError: A polygon has fewer than 3 exterior vertices.
        DegeneratePolygonError: A polygon has zero planar area.
        FieldError: A polygon value is negative or not finite.
    """
    lon_scale = planar_lon_scale(spec)
    shapes = _validated(polygons, lon_scale)
    values = [p.value for p in polygons]
    chunks = [
        (shapes[i : i + _CHUNK], values[i : i + _CHUNK]) for i in range(0, len(shapes), _CHUNK)
    ]
    logger.debug(
        "rasterizing %d polygons in %d chunks (mid-latitude %.4f)",
        len(shapes),
        len(chunks),
        spec.mid_latitude,
    )
    mass = np.zeros(spec.shape)
    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
        # map() yields in submission order, so the reduction is fixed-order.
        for partial in pool.map(lambda c: _rasterize_chunk(c[0], c[1], spec, lon_scale), chunks):
            mass += partial
    return DensityGrid(spec=spec, mass=mass)


def rasterize_points(
    points: Sequence[tuple[float, float, float]] | np.ndarray,
    spec: GridSpec,
) -> DensityGrid:
    """Add each ``(lat, lon, weight)`` to the cell containing it.

    Points on a shared edge belong to the cell with the larger index. Points
    outside the extent are counted on ``DensityGrid.points_outside`` and
    logged.
    """
    arr = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    lat, lon, weight = arr[:, 0], arr[:, 1], arr[:, 2]
    bad = np.flatnonzero(~np.isfinite(weight) | (weight < 0))
    if bad.size:
        raise FieldError(int(bad[0]), "weight", "must be a finite nonnegative number")
    rows = np.floor((lat - spec.lat_min) / spec.cell_size + EDGE_EPS).astype(np.int64)
    cols = np.floor((lon - spec.lon_min) / spec.cell_size + EDGE_EPS).astype(np.int64)
    inside = (rows >= 0) & (rows < spec.n_rows) & (cols >= 0) & (cols < spec.n_cols)
    mass = np.zeros(spec.shape)
    np.add.at(mass, (rows[inside], cols[inside]), weight[inside])
    n_outside = int(np.count_nonzero(~inside))
    if n_outside:
        logger.warning("%d of %d points fall outside the grid extent", n_outside, len(arr))
    return DensityGrid(spec=spec, mass=mass, points_outside=n_outside)
