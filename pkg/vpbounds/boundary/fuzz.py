"""Perturbation analysis: how stable is a city boundary under its search knobs."""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path

import numpy as np

from vpbounds.boundary.polygons import write_boundary_geojson
from vpbounds.boundary.schemas import BoundarySet, CitySearch, FuzzSpec
from vpbounds.boundary.workflow import city_boundary
from vpbounds.core.config import resolve_threads
from vpbounds.core.errors import VpBoundsError
from vpbounds.grid.io import fmt_float
from vpbounds.grid.spec import DensityGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FuzzRun:
    center: tuple[float, float]
    search_radius_km: float
    box_side_km: float
    boundaries: BoundarySet | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.boundaries is not None


@dataclass(frozen=True, eq=False)
class FuzzResult:
    """``frequency[i, j]`` is the share of successful runs whose principal
    cluster contained cell ``(i, j)`` of the input grid."""

    frequency: np.ndarray
    runs: tuple[FuzzRun, ...]

    @property
    def n_success(self) -> int:
        return sum(r.ok for r in self.runs)


def _searches(search: CitySearch, spec: FuzzSpec) -> list[CitySearch]:
    lat0, lon0 = search.approx_center
    return [
        search.model_copy(
            update={
                "approx_center": (lat0 + dlat, lon0 + dlon),
                "search_radius_km": radius,
                "box_side_km": side,
            }
        )
        for (dlat, dlon), radius, side in product(
            spec.center_offsets_deg, spec.search_radii_km, spec.box_sides_km
        )
    ]


def fuzz_boundary(
    grid: DensityGrid,
    search: CitySearch,
    perturbations: FuzzSpec | None = None,
    *,
    seed: int | None = None,
    restarts: int | None = None,
    threads: int | None = None,
) -> FuzzResult:
    """Run :func:`city_boundary` over the perturbation cross product.

    A failing run is recorded with its error and left out of the
    frequencies; it does not stop the others.
    """
    perturbations = perturbations or FuzzSpec()
    searches = _searches(search, perturbations)

    def one(s: CitySearch) -> FuzzRun:
        base = FuzzRun(
            center=s.approx_center, search_radius_km=s.search_radius_km, box_side_km=s.box_side_km
        )
        if s.box_side_km <= 2 * s.search_radius_km:
            return replace(base, error="box_side_km must exceed twice search_radius_km")
        try:
            # each run is itself sequential; parallelism is across runs
            result = city_boundary(grid, s, seed=seed, restarts=restarts, threads=1)
        except VpBoundsError as exc:
            logger.warning("fuzz run %s failed: %s", s.approx_center, exc)
            return replace(base, error=f"{type(exc).__name__}: {exc}")
        return replace(base, boundaries=result.boundaries)

    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
        runs = tuple(pool.map(one, searches))

    counts = np.zeros(grid.spec.shape)
    n_ok = sum(run.ok for run in runs)
    for run in runs:
        if not run.ok or run.boundaries.principal_label is None:
            continue
        bset = run.boundaries
        r0, c0 = bset.origin
        n_r, n_c = bset.labels.shape
        counts[r0 : r0 + n_r, c0 : c0 + n_c] += bset.mask(bset.principal_label)
    if n_ok == 0:
        logger.warning("all %d fuzz runs failed", len(runs))
    frequency = counts / n_ok if n_ok else counts
    logger.info("fuzz: %d of %d runs succeeded", n_ok, len(runs))
    return FuzzResult(frequency=frequency, runs=runs)


def write_fuzz_outputs(directory: str | Path, grid: DensityGrid, result: FuzzResult) -> list[Path]:
    """``inclusion.csv`` for the whole grid plus one GeoJSON per successful run."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "inclusion.csv"]
    lats, lons = grid.spec.lat_centers(), grid.spec.lon_centers()
    with open(written[0], "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "col", "lat_center", "lon_center", "inclusion_fraction"])
        for i in range(grid.spec.n_rows):
            for j in range(grid.spec.n_cols):
                freq = fmt_float(result.frequency[i, j])
                writer.writerow([i, j, fmt_float(lats[i]), fmt_float(lons[j]), freq])
    for n, run in enumerate(result.runs):
        if run.ok:
            path = out / f"run_{n:03d}.geojson"
            write_boundary_geojson(path, run.boundaries)
            written.append(path)
    return written
