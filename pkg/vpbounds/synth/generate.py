"""Synthetic grids with known ground truth."""

from __future__ import annotations

import logging
import math

import numpy as np

from vpbounds.core.errors import OuterRingError
from vpbounds.grid.geodesy import (
    KM_PER_DEG,
    haversine_km,
    haversine_km_array,
    km_to_deg_lon,
    row_areas_km2,
)
from vpbounds.grid.spec import DensityGrid, GridSpec
from vpbounds.model.rings import ring_model_from_rings
from vpbounds.synth.schemas import Disc, DiscCitySpec, RingCitySpec

logger = logging.getLogger(__name__)


def _center_distances(spec: GridSpec, center: tuple[float, float]) -> np.ndarray:
    lat, lon = np.meshgrid(spec.lat_centers(), spec.lon_centers(), indexing="ij")
    return haversine_km_array(center[0], center[1], lat.ravel(), lon.ravel()).reshape(spec.shape)


def grid_reach_km(spec: GridSpec, center: tuple[float, float]) -> float:
    """Distance from ``center`` to the nearest grid edge."""
    lat, lon = center
    return min(
        haversine_km(center, (spec.lat_min, lon)),
        haversine_km(center, (spec.lat_max, lon)),
        haversine_km(center, (lat, spec.lon_min)),
        haversine_km(center, (lat, spec.lon_max)),
    )


def _ring_coefficients(spec: RingCitySpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    radii = np.array([r for r, _ in spec.rings])
    a = np.array([e for _, e in spec.rings])
    if spec.density_form == "continuous":
        model = ring_model_from_rings(radii, a, spec.total_mass)
        return radii, a, model.coefficients()
    # f(r) = f_j · (r / r_j)^a_j inside ring j, with f = 1 at the outer radius
    log_f = np.zeros(radii.size)
    for j in range(radii.size - 1, 0, -1):
        log_f[j - 1] = log_f[j] + a[j] * (math.log(radii[j - 1]) - math.log(radii[j]))
    log_k = log_f - a * np.log(radii)
    c = spec.total_mass * a * np.exp(log_k) / (2.0 * math.pi)
    return radii, a, c


def generate_ring_city(spec: RingCitySpec, seed: int = 0) -> DensityGrid:
    """Cell mass = ring density at the cell center × cell area, renormalized to P.

    The radius at the center cell is clamped to half the smaller cell side so
    the density stays finite there. ``noise_sigma > 0`` multiplies every cell
    by seeded lognormal noise before renormalizing.

    Raises:
        OuterRingError: the outer ring does not fit inside the grid.
    """
    g = spec.grid
    reach = grid_reach_km(g, spec.center)
    if spec.outer_radius_km > reach:
        raise OuterRingError(spec.outer_radius_km, reach)
    radii, a, c = _ring_coefficients(spec)

    r = _center_distances(g, spec.center)
    half_cell = 0.5 * g.cell_size * KM_PER_DEG * min(1.0, math.cos(math.radians(spec.center[0])))
    r_eff = np.maximum(r, half_cell)
    inside = r <= radii[-1]
    j = np.minimum(np.searchsorted(radii, r, side="left"), radii.size - 1)
    rho = np.where(inside, c[j] * r_eff ** (a[j] - 2.0), 0.0)
    mass = rho * row_areas_km2(g)[:, None]

    if spec.noise_sigma > 0:
        rng = np.random.default_rng(seed)
        mass = mass * rng.lognormal(mean=0.0, sigma=spec.noise_sigma, size=mass.shape)
    total = math.fsum(mass.ravel().tolist())
    mass = mass * (spec.total_mass / total)
    logger.debug(
        "ring city: %d rings, %d nonzero cells", len(spec.rings), int(np.count_nonzero(mass))
    )
    return DensityGrid(spec=g, mass=mass)


def generate_disc_city(spec: DiscCitySpec) -> DensityGrid:
    """Density ``disc.density`` inside each disc (first disc wins on overlap),
    ``rim_density`` on its rim band and ``plain_density`` elsewhere."""
    g = spec.grid
    rho = np.full(g.shape, spec.plain_density, dtype=np.float64)
    assigned = np.zeros(g.shape, dtype=bool)
    for disc in spec.discs:
        r = _center_distances(g, disc.center)
        core = (r <= disc.radius_km) & ~assigned
        rho[core] = disc.density
        assigned |= core
        if disc.rim_width_km > 0:
            rim = (r <= disc.radius_km + disc.rim_width_km) & ~assigned
            rho[rim] = disc.rim_density
            assigned |= rim
    return DensityGrid(spec=g, mass=rho * row_areas_km2(g)[:, None])


def two_disc_spec(
    grid: GridSpec,
    center: tuple[float, float],
    radius_km: float,
    gap_km: float,
    density: float,
    plain_density: float,
) -> DiscCitySpec:
    """Two equal discs on one parallel, the second east of the first, with
    ``gap_km`` of plain between their edges."""
    offset = km_to_deg_lon(2.0 * radius_km + gap_km, center[0])
    east = (center[0], center[1] + offset)
    return DiscCitySpec(
        grid=grid,
        discs=(
            Disc(center=center, radius_km=radius_km, density=density),
            Disc(center=east, radius_km=radius_km, density=density),
        ),
        plain_density=plain_density,
    )


def generate_two_disc_city(
    grid: GridSpec,
    center: tuple[float, float],
    radius_km: float,
    gap_km: float,
    density: float,
    plain_density: float,
) -> DensityGrid:
    city = two_disc_spec(grid, center, radius_km, gap_km, density, plain_density)
    return generate_disc_city(city)


def disc_mask(spec: GridSpec, disc: Disc) -> np.ndarray:
    """Cells whose centers lie inside ``disc`` (its ground-truth footprint)."""
    return _center_distances(spec, disc.center) <= disc.radius_km
