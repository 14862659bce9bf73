"""Shared fixtures for the vpbounds test suite.

Provides:
- ``random_grid``: factory for small seeded random grids (oracle tests).
- ``disc_city`` / ``two_disc_city``: synthetic cities with known footprints.
- ``uniform_disc``: factory for a uniform disc on an empty grid.
- ``square_spec``: factory for a grid spec centered on a point.

Heavy fixtures are session-scoped; every grid is immutable.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
import pytest

from vpbounds.grid import DensityGrid, GridSpec
from vpbounds.grid.geodesy import km_to_deg_lat, km_to_deg_lon
from vpbounds.synth import Disc, DiscCitySpec, generate_disc_city, two_disc_spec

CITY_CENTER = (12.0, 30.0)
HIGH_DENSITY = 10000.0
LOW_DENSITY = 200.0


def _square_spec(center: tuple[float, float], half_km: float, cell: float) -> GridSpec:
    dlat = km_to_deg_lat(half_km)
    dlon = km_to_deg_lon(half_km, center[0])
    return GridSpec.covering(
        center[0] - dlat, center[1] - dlon, center[0] + dlat, center[1] + dlon, cell
    )


@pytest.fixture(scope="session")
def square_spec() -> Callable[..., GridSpec]:
    return _square_spec


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def random_grid() -> Callable[..., DensityGrid]:
    """``random_grid(seed, n_rows=12, n_cols=12, zero_share=0.3, integer=False)``.

    ``integer=True`` draws small integer masses so that equal cumulative
    masses, and therefore tie-breaks, actually occur.
    """

    def make(
        seed: int,
        n_rows: int = 12,
        n_cols: int = 12,
        zero_share: float = 0.3,
        integer: bool = False,
    ) -> DensityGrid:
        rng = np.random.default_rng(seed)
        if integer:
            mass = rng.integers(1, 4, size=(n_rows, n_cols)).astype(np.float64)
        else:
            mass = rng.exponential(1.0, size=(n_rows, n_cols))
        mass[rng.random((n_rows, n_cols)) < zero_share] = 0.0
        if not mass.any():
            mass[n_rows // 2, n_cols // 2] = 1.0
        spec = GridSpec(lat_min=10.0, lon_min=20.0, cell_size=0.01, n_rows=n_rows, n_cols=n_cols)
        return DensityGrid(spec=spec, mass=mass)

    return make


@pytest.fixture(scope="session")
def uniform_disc() -> Callable[..., DensityGrid]:
    """``uniform_disc(radius_km, cell=0.005, density=1000.0)`` on an otherwise empty grid."""

    def make(radius_km: float, cell: float = 0.005, density: float = 1000.0) -> DensityGrid:
        spec = _square_spec(CITY_CENTER, radius_km + 3.0, cell)
        disc = Disc(center=CITY_CENTER, radius_km=radius_km, density=density)
        return generate_disc_city(DiscCitySpec(grid=spec, discs=(disc,)))

    return make


@pytest.fixture(scope="session")
def disc_city() -> tuple[DensityGrid, Disc]:
    """An 8 km high-density disc on a low-density plain, 0.005° cells."""
    spec = _square_spec(CITY_CENTER, 20.0, 0.005)
    disc = Disc(center=CITY_CENTER, radius_km=8.0, density=HIGH_DENSITY)
    grid = generate_disc_city(DiscCitySpec(grid=spec, discs=(disc,), plain_density=LOW_DENSITY))
    return grid, disc


@pytest.fixture(scope="session")
def two_disc_city() -> tuple[DensityGrid, DiscCitySpec]:
    """Two 5 km discs with a 6 km low-density gap between their edges."""
    spec = _square_spec(CITY_CENTER, 30.0, 0.01)
    city = two_disc_spec(spec, CITY_CENTER, 5.0, 6.0, HIGH_DENSITY, 100.0)
    return generate_disc_city(city), city


@pytest.fixture(scope="session")
def small_city() -> DensityGrid:
    """A 4 km disc on a plain, 0.01° cells: cheap enough for end-to-end runs."""
    spec = _square_spec(CITY_CENTER, 14.0, 0.01)
    disc = Disc(center=CITY_CENTER, radius_km=4.0, density=HIGH_DENSITY)
    return generate_disc_city(DiscCitySpec(grid=spec, discs=(disc,), plain_density=LOW_DENSITY))
