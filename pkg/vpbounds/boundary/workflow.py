"""End-to-end city and region workflows."""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import NamedTuple

import numpy as np

from vpbounds.boundary.clusters import cluster_above
from vpbounds.boundary.schemas import BoundarySet, CitySearch
from vpbounds.core.errors import BoxTooSmallError, EmptyBoxError
from vpbounds.fit import RingFit, breakpoints_as_fractions, fit_piecewise, mask_artifacts
from vpbounds.grid.geodesy import haversine_km, km_to_deg_lat, km_to_deg_lon
from vpbounds.grid.spec import DensityGrid
from vpbounds.model import RingModel, default_threshold_ring, model_from_fit, threshold_density
from vpbounds.solver import (
    SearchConstraint,
    VpCircle,
    VpProfile,
    default_fractions,
    vp_profile,
)

logger = logging.getLogger(__name__)

# Slack on the box test for cell centers that land exactly on the box edge.
_BOX_SLACK = 1e-12


class CityResult(NamedTuple):
    profile: VpProfile
    fit: RingFit
    model: RingModel
    boundaries: BoundarySet


class RegionResult(NamedTuple):
    profile: VpProfile
    fit: RingFit | None
    circles: list[VpCircle]


def crop_box(
    grid: DensityGrid, center: tuple[float, float], side_km: float
) -> tuple[DensityGrid, tuple[int, int]]:
    """Cells whose centers fall in the square of side ``side_km`` around ``center``.

    The half-side is converted to degrees at the center latitude, so the
    box snaps to whole cells. Returns the cropped grid and its row/column
    offset in ``grid``.

    Raises:
        EmptyBoxError: the box misses the grid or holds no mass.
    """
    lat0, lon0 = center
    half = side_km / 2.0
    dlat = km_to_deg_lat(half) + _BOX_SLACK
    dlon = km_to_deg_lon(half, lat0) + _BOX_SLACK
    rows = np.flatnonzero(np.abs(grid.spec.lat_centers() - lat0) <= dlat)
    cols = np.flatnonzero(np.abs(grid.spec.lon_centers() - lon0) <= dlon)
    if rows.size == 0 or cols.size == 0:
        raise EmptyBoxError(f"a {side_km} km box around {center} misses the grid")
    box = grid.crop(int(rows[0]), int(rows[-1]) + 1, int(cols[0]), int(cols[-1]) + 1)
    if box.total_mass <= 0:
        raise EmptyBoxError(f"the {side_km} km box around {center} holds no mass")
    return box, (int(rows[0]), int(cols[0]))


def _principal(bset: BoundarySet, center: tuple[float, float]) -> int | None:
    if not bset.clusters:
        return None
    cell = bset.spec.locate(*center)
    if cell is not None and bset.labels[cell] > 0:
        return int(bset.labels[cell])
    dists = [haversine_km(center, cl.centroid) for cl in bset.clusters]
    return bset.clusters[int(np.argmin(dists))].label


def boundary_from_model(
    box: DensityGrid,
    model: RingModel,
    search: CitySearch,
    origin: tuple[int, int] = (0, 0),
) -> BoundarySet:
    """Threshold ``box`` at the model's last-breakpoint density.

    Raises:
        BoxTooSmallError: the last breakpoint lies beyond the box half-side.
    """
    b = default_threshold_ring(model)
    r_b = model.rings[b].r_outer_km
    half = search.box_side_km / 2.0
    if r_b > half:
        raise BoxTooSmallError(r_b, half)
    rho0 = threshold_density(model, b, search.side)
    bset = cluster_above(box, rho0, search.connectivity)
    principal = _principal(bset, search.approx_center)
    provenance = {
        "search": search.model_dump(mode="json"),
        "threshold_ring": b,
        "threshold_radius_km": r_b,
        "exponents": [g.a for g in model.rings],
        "ring_radii_km": [g.r_outer_km for g in model.rings],
        "total_mass": model.total_mass,
    }
    if principal is not None:
        logger.info(
            "principal cluster %d: %d cells, %.2f km2",
            principal,
            bset.cluster(principal).n_cells,
            bset.cluster(principal).area_km2,
        )
    return replace(bset, origin=origin, principal_label=principal, provenance=provenance)


def city_profile(
    grid: DensityGrid,
    search: CitySearch,
    *,
    threads: int | None = None,
) -> tuple[DensityGrid, tuple[int, int], VpProfile]:
    """Crop the box and solve the center-constrained profile inside it."""
    box, origin = crop_box(grid, search.approx_center, search.box_side_km)
    constraint = SearchConstraint(
        center=search.approx_center, max_distance_km=search.search_radius_km
    )
    fractions = default_fractions(box, search.n_fractions)
    profile = vp_profile(box, fractions, constraint, threads=threads)
    return box, origin, profile


def city_boundary(
    grid: DensityGrid,
    search: CitySearch,
    *,
    seed: int | None = None,
    restarts: int | None = None,
    threads: int | None = None,
) -> CityResult:
    """Crop, profile, fit, model and threshold one city.

    Every intermediate artifact is returned. The cluster containing (or
    nearest to) ``search.approx_center`` is flagged as principal.
    """
    box, origin, profile = city_profile(grid, search, threads=threads)
    masked = mask_artifacts(profile, search.mask_min_cells)
    fit = fit_piecewise(
        masked, search.n_breakpoints, seed=seed, restarts=restarts, threads=threads
    )
    model = model_from_fit(fit, masked)
    bset = boundary_from_model(box, model, search, origin)
    return CityResult(profile=masked, fit=fit, model=model, boundaries=bset)


def region_boundaries(
    grid: DensityGrid,
    n_breakpoints: int,
    *,
    mask_min_cells: int | None = None,
    n_fractions: int | None = None,
    seed: int | None = None,
    restarts: int | None = None,
    threads: int | None = None,
    coarse_factor: int = 1,
) -> RegionResult:
    """Unconstrained profile, fit, and the VP circle at every breakpoint.

    A profile with fewer than three positive radii (a point mass, say) has
    no slope to fit: the result then carries no fit and no circles.
    """
    fractions = default_fractions(grid, n_fractions)
    profile = vp_profile(grid, fractions, threads=threads, coarse_factor=coarse_factor)
    if np.count_nonzero(profile.radii() > 0) < 3:
        logger.warning("profile has fewer than 3 positive radii; nothing to fit")
        return RegionResult(profile=profile, fit=None, circles=[])
    masked = mask_artifacts(profile, mask_min_cells)
    fit = fit_piecewise(masked, n_breakpoints, seed=seed, restarts=restarts, threads=threads)
    circles: list[VpCircle] = []
    if fit.breakpoints_logf:
        fs = [f for f, _ in breakpoints_as_fractions(fit, masked)]
        circles = list(
            vp_profile(grid, fs, threads=threads, coarse_factor=coarse_factor).entries
        )
    for c in circles:
        logger.info(
            "region circle f=%.4f r=%.2f km at (%.4f, %.4f)",
            c.target_fraction,
            c.radius_km,
            *c.center,
        )
    return RegionResult(profile=masked, fit=fit, circles=circles)
