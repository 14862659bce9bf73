"""Great-circle distance and spherical cell-area primitives."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from vpbounds.core.config import EARTH_RADIUS_KM

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from vpbounds.grid.spec import GridSpec

KM_PER_DEG = 2.0 * math.pi * EARTH_RADIUS_KM / 360.0


def haversine_km(p1: tuple[float, float], p2: tuple[float, float]) -> float:
    """Great-circle distance in km between two ``(lat, lon)`` points in degrees."""
    lat1, lon1 = map(math.radians, p1)
    lat2, lon2 = map(math.radians, p2)
    h = (
        math.sin((lat2 - lat1) / 2.0) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2.0) ** 2
    )
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def haversine_km_array(
    lat: float,
    lon: float,
    lats: NDArray[np.float64],
    lons: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Distances in km from one point to many.

    Every distance-dependent decision in the package (circle radii, box
    tests, generators) goes through this function so that two code paths
    fed the same arrays see bit-identical distances.
    """
    phi0 = math.radians(lat)
    lam0 = math.radians(lon)
    phi = np.radians(lats)
    lam = np.radians(lons)
    h = np.sin((phi - phi0) / 2.0) ** 2 + math.cos(phi0) * np.cos(phi) * np.sin(
        (lam - lam0) / 2.0
    ) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def cell_area_km2(spec: GridSpec, row: int) -> float:
    """Spherical area of any cell in ``row``: R²·Δλ·(sin φ_top − sin φ_bottom)."""
    if not 0 <= row < spec.n_rows:
        raise IndexError(f"row {row} outside [0, {spec.n_rows})")
    bottom = math.radians(spec.lat_min + row * spec.cell_size)
    top = math.radians(spec.lat_min + (row + 1) * spec.cell_size)
    dlon = math.radians(spec.cell_size)
    return EARTH_RADIUS_KM**2 * dlon * (math.sin(top) - math.sin(bottom))


def row_areas_km2(spec: GridSpec) -> NDArray[np.float64]:
    """Cell areas for every row, shape ``(n_rows,)``."""
    return np.array([cell_area_km2(spec, i) for i in range(spec.n_rows)], dtype=np.float64)


def km_to_deg_lat(km: float) -> float:
    return km / KM_PER_DEG


def km_to_deg_lon(km: float, lat: float) -> float:
    return km / (KM_PER_DEG * math.cos(math.radians(lat)))
