"""Brute-force reference implementations for tests.

Deliberately naive: plain Python sorts and loops, no pruning, no blocks.
They share only the distance kernel and the cell-center table with the
production code. Acceptance is decided with exactly rounded sums.
"""

from __future__ import annotations

import bisect
import math
from collections import deque

import numpy as np

from vpbounds.boundary.clusters import assemble_boundary_set
from vpbounds.boundary.schemas import BoundarySet
from vpbounds.core.errors import NoCandidateError, OracleGuardError, UnreachableMassError
from vpbounds.grid.geodesy import haversine_km_array
from vpbounds.grid.spec import DensityGrid
from vpbounds.solver.schemas import SearchConstraint, VpCircle
from vpbounds.solver.search import nonzero_cell_table

ORACLE_CELL_LIMIT = 5000
# Running sums this far below the target skip the exact check; far wider than
# float round-off at ORACLE_CELL_LIMIT cells.
_SCREEN_RTOL = 1e-6


def _table(grid: DensityGrid, limit: int):
    cells = nonzero_cell_table(grid)
    if cells.mass.size > limit:
        raise OracleGuardError(int(cells.mass.size), limit)
    if grid.total_mass <= 0:
        raise NoCandidateError("grid holds no mass")
    return cells


def _candidates(cells, constraint: SearchConstraint) -> list[int]:
    out = []
    if constraint.has_region:
        lat0, lon0 = constraint.center
        dist = haversine_km_array(lat0, lon0, cells.lats, cells.lons)
    for k in range(cells.mass.size):
        if not cells.mass[k] > constraint.min_cell_mass:
            continue
        if constraint.has_region and not dist[k] <= constraint.max_distance_km:
            continue
        out.append(k)
    if not out:
        raise NoCandidateError("no admissible candidate center satisfies the search constraint")
    return out


def _circle(grid, cells, k, f, radius, got, count) -> VpCircle:
    row, col = int(cells.rows[k]), int(cells.cols[k])
    return VpCircle(
        center=grid.spec.cell_center(row, col),
        radius_km=radius,
        target_fraction=f,
        achieved_fraction=got / grid.total_mass,
        cells_included=count,
        row=row,
        col=col,
    )


def brute_force_vp_circle(
    grid: DensityGrid,
    f: float,
    constraint: SearchConstraint | None = None,
    *,
    limit: int = ORACLE_CELL_LIMIT,
) -> VpCircle:
    """Try every admissible center; same tie rules as :func:`vp_circle`."""
    constraint = constraint or SearchConstraint()
    cells = _table(grid, limit)
    total = grid.total_mass
    screen = f * total * (1.0 - _SCREEN_RTOL)
    best = None
    for k in _candidates(cells, constraint):
        d = haversine_km_array(cells.lats[k], cells.lons[k], cells.lats, cells.lons)
        ranked = sorted((float(d[i]), i) for i in range(d.size))
        masses = [float(cells.mass[i]) for _, i in ranked]
        cum = 0.0
        end = 0
        hit = None
        while end < len(ranked):
            radius = ranked[end][0]
            while end < len(ranked) and ranked[end][0] == radius:
                cum += masses[end]
                end += 1
            if cum >= screen and math.fsum(masses[:end]) / total >= f:
                hit = radius
                break
        if hit is None:
            continue
        key = (hit, -cum, int(cells.rows[k]), int(cells.cols[k]))
        if best is None or key < best[0]:
            best = (key, k, math.fsum(masses[:end]), end)
    if best is None:
        raise UnreachableMassError(f, f * total, math.fsum(cells.mass.tolist()))
    (radius, _, _, _), k, got, count = best
    return _circle(grid, cells, k, f, radius, got, count)


def brute_force_vp_circle_by_mask(
    grid: DensityGrid,
    f: float,
    constraint: SearchConstraint | None = None,
    *,
    limit: int = ORACLE_CELL_LIMIT,
) -> VpCircle:
    """Second exhaustive search: bisect over the distinct radii of each center,
    summing the cells inside each trial disc exactly."""
    constraint = constraint or SearchConstraint()
    cells = _table(grid, limit)
    total = grid.total_mass
    best = None
    for k in _candidates(cells, constraint):
        d = haversine_km_array(cells.lats[k], cells.lons[k], cells.lats, cells.lons)
        radii = np.unique(d).tolist()

        def held(r: float) -> float:
            return math.fsum(cells.mass[d <= r].tolist())

        j = bisect.bisect_left(radii, True, key=lambda r: held(r) / total >= f)
        if j == len(radii):
            continue
        radius = radii[j]
        got = held(radius)
        key = (radius, -got, int(cells.rows[k]), int(cells.cols[k]))
        if best is None or key < best[0]:
            best = (key, k, got, int(np.count_nonzero(d <= radius)))
    if best is None:
        raise UnreachableMassError(f, f * total, math.fsum(cells.mass.tolist()))
    (radius, _, _, _), k, got, count = best
    return _circle(grid, cells, k, f, radius, got, count)


def _neighbours(connectivity: int) -> list[tuple[int, int]]:
    rook = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if connectivity == 4:
        return rook
    return rook + [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def brute_force_clusters(grid: DensityGrid, rho0: float, connectivity: int = 4) -> BoundarySet:
    """Cluster by repeated flood fill; holes found by filling the background
    inward from the grid frame."""
    n_rows, n_cols = grid.spec.shape
    areas = grid.cell_areas()
    above = np.zeros((n_rows, n_cols), dtype=bool)
    for i in range(n_rows):
        for j in range(n_cols):
            above[i, j] = grid.mass[i, j] / areas[i] > rho0

    # background reachable from the frame through 4-connected low cells
    outside = np.zeros_like(above)
    queue: deque[tuple[int, int]] = deque()
    for i in range(n_rows):
        for j in range(n_cols):
            on_frame = i in (0, n_rows - 1) or j in (0, n_cols - 1)
            if on_frame and not above[i, j]:
                outside[i, j] = True
                queue.append((i, j))
    while queue:
        i, j = queue.popleft()
        for di, dj in _neighbours(4):
            a, b = i + di, j + dj
            if 0 <= a < n_rows and 0 <= b < n_cols and not above[a, b] and not outside[a, b]:
                outside[a, b] = True
                queue.append((a, b))
    filled = ~outside

    labels = np.zeros((n_rows, n_cols), dtype=np.int32)
    next_label = 0
    for i in range(n_rows):
        for j in range(n_cols):
            if not filled[i, j] or labels[i, j]:
                continue
            next_label += 1
            labels[i, j] = next_label
            queue.append((i, j))
            while queue:
                ci, cj = queue.popleft()
                for di, dj in _neighbours(connectivity):
                    a, b = ci + di, cj + dj
                    if 0 <= a < n_rows and 0 <= b < n_cols and filled[a, b] and not labels[a, b]:
                        labels[a, b] = next_label
                        queue.append((a, b))
    return assemble_boundary_set(grid, rho0, connectivity, labels, above)
