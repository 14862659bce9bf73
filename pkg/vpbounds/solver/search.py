"""Exact Valeriepieris circle search over grid-cell centers.

Every nonzero cell center passing the constraint is a candidate. For one
candidate the cells are ordered by (distance, row-major index), masses are
accumulated in that order, and the radius for a fraction f is the first
distance at which the running mass reaches f·P; all cells at that same
distance are included together. Running sums within round-off of f·P are
settled with ``math.fsum``, so ``achieved_fraction >= target_fraction``
always holds. The winner minimizes ``(radius, -achieved mass, row, col)``.

Candidates are processed in fixed-size blocks. A block only skips a
candidate when it provably cannot reach a fraction within the block's
current best radius, so pruning never changes the answer, and blocks are
reduced in a fixed order, so worker count never changes it either.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from vpbounds.core.config import resolve_threads, settings
from vpbounds.core.errors import NoCandidateError, UnreachableMassError, UsageError
from vpbounds.grid.geodesy import KM_PER_DEG, haversine_km_array
from vpbounds.grid.spec import DensityGrid
from vpbounds.solver.schemas import (
    SearchConstraint,
    VpCircle,
    VpProfile,
    holds_fraction,
    mass_tolerance,
)

logger = logging.getLogger(__name__)

# Cells (at least) that the smallest default circle should span.
_MIN_SPAN_CELLS = 10
# Coarse neighbourhood (in coarse cells) searched around each coarse winner.
_COARSE_HALO = 1


@dataclass(frozen=True)
class _Cells:
    rows: np.ndarray
    cols: np.ndarray
    lats: np.ndarray
    lons: np.ndarray
    mass: np.ndarray


def nonzero_cell_table(grid: DensityGrid) -> _Cells:
    """Nonzero cells with their center coordinates, in row-major order."""
    rows, cols, mass = grid.nonzero_cells()
    return _Cells(
        rows=rows,
        cols=cols,
        lats=grid.spec.lat_centers()[rows],
        lons=grid.spec.lon_centers()[cols],
        mass=np.ascontiguousarray(mass),
    )


@dataclass
class _Best:
    """Per-fraction incumbent under the total order (radius, -mass, row, col)."""

    radius: np.ndarray
    mass: np.ndarray
    cells: np.ndarray
    row: np.ndarray
    col: np.ndarray

    @classmethod
    def empty(cls, n: int) -> _Best:
        big = np.iinfo(np.int64).max
        return cls(
            radius=np.full(n, np.inf),
            mass=np.zeros(n),
            cells=np.zeros(n, dtype=np.int64),
            row=np.full(n, big, dtype=np.int64),
            col=np.full(n, big, dtype=np.int64),
        )

    def offer(self, radius, mass, cells, row, col) -> None:
        better = np.isfinite(radius) & (
            (radius < self.radius)
            | (
                (radius == self.radius)
                & (
                    (mass > self.mass)
                    | (
                        (mass == self.mass)
                        & ((row < self.row) | ((row == self.row) & (col < self.col)))
                    )
                )
            )
        )
        if not np.any(better):
            return
        self.radius = np.where(better, radius, self.radius)
        self.mass = np.where(better, mass, self.mass)
        self.cells = np.where(better, cells, self.cells)
        self.row = np.where(better, row, self.row)
        self.col = np.where(better, col, self.col)

    def merge(self, other: _Best) -> None:
        self.offer(other.radius, other.mass, other.cells, other.row, other.col)


@dataclass(frozen=True)
class _Targets:
    fractions: np.ndarray
    total: float
    tol: float

    @property
    def mass(self) -> np.ndarray:
        return self.fractions * self.total


def _settle(sd: np.ndarray, sm: np.ndarray, i: int, f: float, total: float) -> int:
    """First rank at or after ``i`` whose distance ties hold ``f`` exactly."""
    while i < sd.size:
        end = int(np.searchsorted(sd, sd[i], side="right"))
        if holds_fraction(sm[:end].tolist(), total, f):
            return i
        i = end
    return i


def _candidate_radii(
    d: np.ndarray,
    mass: np.ndarray,
    targets: _Targets,
    cap: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Radius, included mass and cell count per fraction for one center.

    Only cells within ``cap`` km are ranked; fractions not reachable inside
    ``cap`` get an infinite radius.
    """
    n_f = targets.fractions.size
    radius = np.full(n_f, np.inf)
    got = np.zeros(n_f)
    count = np.zeros(n_f, dtype=np.int64)
    if math.isfinite(cap):
        sel = d <= cap
        d, mass = d[sel], mass[sel]
    if d.size == 0:
        return radius, got, count
    order = np.argsort(d, kind="stable")
    sd = d[order]
    sm = mass[order]
    cum = np.cumsum(sm)
    want = targets.mass
    idx = np.searchsorted(cum, want - targets.tol, side="left")
    near = (idx < cum.size) & (cum[np.minimum(idx, cum.size - 1)] < want + targets.tol)
    for j in np.flatnonzero(near):
        idx[j] = _settle(sd, sm, int(idx[j]), float(targets.fractions[j]), targets.total)
    ok = idx < cum.size
    if not np.any(ok):
        return radius, got, count
    r = sd[idx[ok]]
    end = np.searchsorted(sd, r, side="right")
    radius[ok] = r
    got[ok] = cum[end - 1]
    count[ok] = end
    return radius, got, count


def _search_block(
    cand: np.ndarray,
    cells: _Cells,
    targets: _Targets,
    seed_radius: np.ndarray,
) -> _Best:
    n = targets.fractions.size
    best = _Best.empty(n)
    bound = seed_radius.copy()
    for k in cand:
        d = haversine_km_array(cells.lats[k], cells.lons[k], cells.lats, cells.lons)
        cap = float(np.max(bound))
        radius, got, count = _candidate_radii(d, cells.mass, targets, cap)
        best.offer(
            radius,
            got,
            count,
            np.full(n, cells.rows[k], dtype=np.int64),
            np.full(n, cells.cols[k], dtype=np.int64),
        )
        bound = np.minimum(bound, best.radius)
    return best


def _admissible(
    grid: DensityGrid,
    cells: _Cells,
    constraint: SearchConstraint,
    candidate_mask: np.ndarray | None,
) -> np.ndarray:
    ok = cells.mass > constraint.min_cell_mass
    if constraint.has_region:
        lat0, lon0 = constraint.center
        dist = haversine_km_array(lat0, lon0, cells.lats, cells.lons)
        ok &= dist <= constraint.max_distance_km
    if candidate_mask is not None:
        ok &= candidate_mask[cells.rows, cells.cols]
    return np.flatnonzero(ok)


def _held_mass(cells: _Cells, n_cols: int, row: int, col: int, radius: float) -> float:
    """Exactly rounded mass within ``radius`` of the candidate at (row, col)."""
    k = int(np.searchsorted(cells.rows * n_cols + cells.cols, row * n_cols + col))
    d = haversine_km_array(cells.lats[k], cells.lons[k], cells.lats, cells.lons)
    return math.fsum(cells.mass[d <= radius].tolist())


def _solve(
    grid: DensityGrid,
    fractions: np.ndarray,
    constraint: SearchConstraint,
    threads: int | None,
    candidate_mask: np.ndarray | None = None,
) -> list[VpCircle]:
    total = grid.total_mass
    if total <= 0:
        raise NoCandidateError("grid holds no mass")
    cells = nonzero_cell_table(grid)
    wanted = _Targets(fractions, total, mass_tolerance(cells.mass.size, total))
    targets = wanted.mass
    reachable = math.fsum(cells.mass.tolist())
    too_big = np.flatnonzero(targets - wanted.tol > reachable)
    if too_big.size:
        j = int(too_big[0])
        raise UnreachableMassError(float(fractions[j]), float(targets[j]), reachable)

    cand = _admissible(grid, cells, constraint, candidate_mask)
    if cand.size == 0:
        raise NoCandidateError("no admissible candidate center satisfies the search constraint")
    # Heaviest cells first: they tend to be good centers and tighten the bound.
    cand = cand[np.lexsort((cand, -cells.mass[cand]))]

    seed = _search_block(cand[:1], cells, wanted, np.full(fractions.size, np.inf))
    rest = cand[1:]
    block = max(1, settings.candidate_block)
    blocks = [rest[i : i + block] for i in range(0, rest.size, block)]
    logger.debug(
        "circle search: %d candidates, %d cells, %d fractions, %d blocks",
        cand.size,
        cells.mass.size,
        fractions.size,
        len(blocks),
    )
    best = seed
    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
        for partial in pool.map(
            lambda b: _search_block(b, cells, wanted, seed.radius), blocks
        ):
            best.merge(partial)

    missing = np.flatnonzero(~np.isfinite(best.radius))
    if missing.size:
        j = int(missing[0])
        raise UnreachableMassError(float(fractions[j]), float(targets[j]), reachable)

    spec = grid.spec
    return [
        VpCircle(
            center=spec.cell_center(int(best.row[j]), int(best.col[j])),
            radius_km=float(best.radius[j]),
            target_fraction=float(fractions[j]),
            achieved_fraction=_held_mass(
                cells, spec.n_cols, int(best.row[j]), int(best.col[j]), float(best.radius[j])
            )
            / total,
            cells_included=int(best.cells[j]),
            row=int(best.row[j]),
            col=int(best.col[j]),
        )
        for j in range(fractions.size)
    ]


def _coarse_candidates(
    grid: DensityGrid,
    fractions: np.ndarray,
    constraint: SearchConstraint,
    factor: int,
    threads: int | None,
) -> np.ndarray:
    """Fine-cell mask around the coarse-grid winners (heuristic)."""
    coarse = grid.decimate(factor)
    if constraint.has_region:
        slack = factor * grid.spec.cell_size * KM_PER_DEG * math.sqrt(2.0)
        constraint = constraint.model_copy(
            update={"max_distance_km": constraint.max_distance_km + slack, "min_cell_mass": 0.0}
        )
    winners = _solve(coarse, fractions, constraint, threads)
    mask_coarse = np.zeros(coarse.spec.shape, dtype=bool)
    for c in winners:
        mask_coarse[
            max(0, c.row - _COARSE_HALO) : c.row + _COARSE_HALO + 1,
            max(0, c.col - _COARSE_HALO) : c.col + _COARSE_HALO + 1,
        ] = True
    fine = np.repeat(np.repeat(mask_coarse, factor, axis=0), factor, axis=1)
    return fine[: grid.spec.n_rows, : grid.spec.n_cols]


def _as_fractions(fractions: Sequence[float]) -> np.ndarray:
    fs = np.asarray(fractions, dtype=np.float64)
    if fs.ndim != 1 or fs.size == 0:
        raise UsageError("fractions must be a non-empty list")
    if np.any(fs <= 0) or np.any(fs > 1):
        raise UsageError("fractions must lie in (0, 1]")
    if np.any(np.diff(fs) <= 0):
        raise UsageError("fractions must be strictly increasing")
    return fs


def vp_circle(
    grid: DensityGrid,
    f: float,
    constraint: SearchConstraint | None = None,
    *,
    threads: int | None = None,
    coarse_factor: int = 1,
) -> VpCircle:
    """Smallest circle centered on an admissible cell holding ``f`` of the mass.

    Raises:
        NoCandidateError: no cell center passes the constraint.
        UnreachableMassError: ``f·P`` exceeds the reachable mass.
    """
    return vp_profile(
        grid, [f], constraint, threads=threads, coarse_factor=coarse_factor
    ).entries[0]


def vp_profile(
    grid: DensityGrid,
    fractions: Sequence[float] | None = None,
    constraint: SearchConstraint | None = None,
    *,
    threads: int | None = None,
    coarse_factor: int = 1,
) -> VpProfile:
    """Solve one VP circle per fraction; centers may move between fractions.

    ``coarse_factor > 1`` enables the coarse-to-fine heuristic: the search
    runs first on a block-summed grid, then exactly over fine candidates in
    the neighbourhood of every coarse winner. It is not guaranteed optimal.
    """
    fs = _as_fractions(default_fractions(grid) if fractions is None else fractions)
    constraint = constraint or SearchConstraint()
    mask = None
    if coarse_factor > 1:
        mask = _coarse_candidates(grid, fs, constraint, coarse_factor, threads)
    circles = _solve(grid, fs, constraint, threads, candidate_mask=mask)
    logger.info(
        "profile solved: %d fractions, r(f_min)=%.3f km, r(f_max)=%.3f km",
        len(circles),
        circles[0].radius_km,
        circles[-1].radius_km,
    )
    return VpProfile(entries=tuple(circles), total_mass=grid.total_mass)


def default_fractions(grid: DensityGrid, n: int | None = None) -> list[float]:
    """Log-spaced fractions from the ten-heaviest-cell fraction up to 1."""
    n = settings.n_fractions if n is None else n
    if n < 1:
        raise UsageError(f"n_fractions must be >= 1, got {n}")
    total = grid.total_mass
    if total <= 0:
        raise NoCandidateError("grid holds no mass")
    heaviest = np.sort(grid.mass.ravel())[::-1][:_MIN_SPAN_CELLS]
    f_min = min(1.0, math.fsum(heaviest.tolist()) / total)
    if f_min >= 1.0:
        return [1.0]
    fs = np.unique(np.geomspace(f_min, 1.0, n))
    fs[-1] = 1.0
    return [float(f) for f in fs]
