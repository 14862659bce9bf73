"""Readers for GeoJSON/CSV inputs and writers/readers for serialized grids.

Binary raster layout (``VPGRID01``), all little-endian::

    0   8s   magic "VPGRID01"
    8   f64  lat_min
    16  f64  lon_min
    24  f64  cell_size
    32  u32  n_rows
    36  u32  n_cols
    40  ...  zero padding up to byte 64
    64  f64  mass, row-major, n_rows × n_cols
"""

from __future__ import annotations

import csv
import json
import math
import struct
from pathlib import Path
from typing import Any

import numpy as np
from shapely.geometry import MultiPolygon, Polygon, shape

from vpbounds.core.errors import (
    DegeneratePolygonError,
    FieldError,
    GeometryError,
    GridFormatError,
    UsageError,
)
from vpbounds.grid.rasterize import ValuedPolygon
from vpbounds.grid.spec import DensityGrid, GridSpec

MAGIC = b"VPGRID01"
HEADER_SIZE = 64
_HEADER = struct.Struct("<8sdddII")


def fmt_float(x: float) -> str:
    # repr round-trips float64 exactly
    return repr(float(x))


def _numeric(raw: Any, idx: int, field: str) -> float:
    if isinstance(raw, bool) or raw is None:
        raise FieldError(idx, field, "is not numeric")
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise FieldError(idx, field, f"is not numeric: {raw!r}") from None
    if not math.isfinite(value):
        raise FieldError(idx, field, "is not finite")
    return value


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------


def _ring(coords) -> tuple[tuple[float, float], ...]:
    # GeoJSON positions are (lon, lat)
    return tuple((float(lat), float(lon)) for lon, lat, *_ in coords)


def _valued(poly: Polygon, value: float) -> ValuedPolygon:
    return ValuedPolygon(
        exterior=_ring(poly.exterior.coords),
        value=value,
        holes=tuple(_ring(h.coords) for h in poly.interiors),
    )


def load_geojson(path: str | Path, value_field: str) -> list[ValuedPolygon]:
    """Parse a FeatureCollection of (Multi)Polygons carrying ``value_field``.

    MultiPolygons are split into their parts, each receiving a share of the
    feature value proportional to its planar area.

    Raises:
        FieldError: ``value_field`` missing or non-numeric on a feature.
        GeometryError: malformed or non-polygonal geometry.
        DegeneratePolygonError: a feature with zero area.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"input file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise GeometryError(-1, f"invalid JSON: {exc}") from None
    if doc.get("type") != "FeatureCollection":
        raise GeometryError(-1, "top-level object is not a FeatureCollection")

    out: list[ValuedPolygon] = []
    for idx, feature in enumerate(doc.get("features") or []):
        props = feature.get("properties") or {}
        if value_field not in props:
            raise FieldError(idx, value_field, "is missing")
        value = _numeric(props[value_field], idx, value_field)
        if value < 0:
            raise FieldError(idx, value_field, "is negative")
        try:
            geom = shape(feature["geometry"])
        except Exception as exc:  # noqa: BLE001
            raise GeometryError(idx, f"malformed geometry: {exc}") from None
        if isinstance(geom, Polygon):
            parts = [geom]
        elif isinstance(geom, MultiPolygon):
            parts = list(geom.geoms)
        else:
            raise GeometryError(idx, f"unsupported geometry type {geom.geom_type}")
        total_area = sum(p.area for p in parts)
        if total_area <= 0.0:
            raise DegeneratePolygonError(idx)
        out.extend(_valued(p, value * p.area / total_area) for p in parts if p.area > 0.0)
    return out


def load_csv(path: str | Path, value_field: str = "weight") -> list[tuple[float, float, float]]:
    """Read ``lat,lon[,weight]`` rows; a missing weight column means weight 1."""
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise UsageError(f"input file not found: {path}") from None
    points: list[tuple[float, float, float]] = []
    with fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for required in ("lat", "lon"):
            if required not in fields:
                raise FieldError(-1, required, "is missing from the CSV header")
        has_weight = value_field in fields
        for idx, row in enumerate(reader):
            lat = _numeric(row["lat"], idx, "lat")
            lon = _numeric(row["lon"], idx, "lon")
            if not -90.0 <= lat <= 90.0:
                raise FieldError(idx, "lat", f"outside [-90, 90]: {lat}")
            weight = _numeric(row[value_field], idx, value_field) if has_weight else 1.0
            if weight < 0:
                raise FieldError(idx, value_field, "is negative")
            points.append((lat, lon, weight))
    return points


# ---------------------------------------------------------------------------
# Grid serialization
# ---------------------------------------------------------------------------


def write_grid_binary(path: str | Path, grid: DensityGrid) -> None:
    s = grid.spec
    header = _HEADER.pack(MAGIC, s.lat_min, s.lon_min, s.cell_size, s.n_rows, s.n_cols)
    header = header.ljust(HEADER_SIZE, b"\x00")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(grid.mass, dtype="<f8").tobytes(order="C"))


def decode_grid(data: bytes) -> DensityGrid:
    """Decode a ``VPGRID01`` byte string."""
    if len(data) < HEADER_SIZE or data[:8] != MAGIC:
        raise GridFormatError("not a VPGRID01 raster (bad magic or short header)")
    _, lat_min, lon_min, cell_size, n_rows, n_cols = _HEADER.unpack_from(data, 0)
    expected = HEADER_SIZE + 8 * n_rows * n_cols
    if len(data) != expected:
        raise GridFormatError(f"raster holds {len(data)} bytes, header implies {expected}")
    try:
        spec = GridSpec(
            lat_min=lat_min, lon_min=lon_min, cell_size=cell_size, n_rows=n_rows, n_cols=n_cols
        )
        mass = np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE).reshape(n_rows, n_cols)
        return DensityGrid(spec=spec, mass=mass)
    except ValueError as exc:
        raise GridFormatError(f"invalid raster contents: {exc}") from None


def read_grid_binary(path: str | Path) -> DensityGrid:
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise UsageError(f"grid file not found: {path}") from None
    return decode_grid(data)


def write_grid_csv(path: str | Path, grid: DensityGrid) -> None:
    lats = grid.spec.lat_centers()
    lons = grid.spec.lon_centers()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "col", "lat_center", "lon_center", "mass"])
        for i in range(grid.spec.n_rows):
            for j in range(grid.spec.n_cols):
                writer.writerow(
                    [i, j, fmt_float(lats[i]), fmt_float(lons[j]), fmt_float(grid.mass[i, j])]
                )


def write_grid(path: str | Path, grid: DensityGrid, fmt: str = "binary") -> None:
    if fmt == "binary":
        write_grid_binary(path, grid)
    elif fmt == "csv":
        write_grid_csv(path, grid)
    else:
        raise UsageError(f"unsupported grid format {fmt!r}; use binary or csv")


def read_grid_csv(path: str | Path) -> DensityGrid:
    """Rebuild a grid from :func:`write_grid_csv` output.

    The cell size is recovered from the spacing of cell centers, so the
    file needs at least two rows or two columns.
    """
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise UsageError(f"grid file not found: {path}") from None
    with fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise GridFormatError(f"grid CSV {path} holds no cells")
    try:
        r = np.array([int(x["row"]) for x in rows])
        c = np.array([int(x["col"]) for x in rows])
        lat = np.array([float(x["lat_center"]) for x in rows])
        lon = np.array([float(x["lon_center"]) for x in rows])
        mass = np.array([float(x["mass"]) for x in rows])
    except (KeyError, ValueError) as exc:
        raise GridFormatError(f"grid CSV {path}: {exc}") from None
    n_rows, n_cols = int(r.max()) + 1, int(c.max()) + 1
    if n_rows > 1:
        cs = (lat.max() - lat.min()) / (n_rows - 1)
    elif n_cols > 1:
        cs = (lon.max() - lon.min()) / (n_cols - 1)
    else:
        raise GridFormatError("cannot infer the cell size of a single-cell CSV grid")
    cs = round(float(cs), 12)
    grid_mass = np.zeros((n_rows, n_cols))
    grid_mass[r, c] = mass
    spec = GridSpec(
        lat_min=float(lat.min()) - cs / 2,
        lon_min=float(lon.min()) - cs / 2,
        cell_size=cs,
        n_rows=n_rows,
        n_cols=n_cols,
    )
    return DensityGrid(spec=spec, mass=grid_mass)


def read_grid(path: str | Path) -> DensityGrid:
    """Read a binary raster, or a grid CSV when the file ends in ``.csv``."""
    if Path(path).suffix.lower() == ".csv":
        return read_grid_csv(path)
    return read_grid_binary(path)
