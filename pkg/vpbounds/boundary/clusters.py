"""Threshold a density grid into hole-free connected clusters."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import ndimage

from vpbounds.boundary.schemas import BoundarySet, Cluster, Connectivity
from vpbounds.core.errors import UsageError
from vpbounds.grid.spec import DensityGrid

logger = logging.getLogger(__name__)

ROOK = ndimage.generate_binary_structure(2, 1)
QUEEN = ndimage.generate_binary_structure(2, 2)


def structure(connectivity: int) -> np.ndarray:
    if connectivity == 4:
        return ROOK
    if connectivity == 8:
        return QUEEN
    raise UsageError(f"connectivity must be 4 or 8, got {connectivity}")


def above_threshold(grid: DensityGrid, rho0: float) -> np.ndarray:
    """Cells whose density is strictly greater than ``rho0``."""
    return grid.density() > rho0


def assemble_boundary_set(
    grid: DensityGrid,
    rho0: float,
    connectivity: int,
    raw_labels: np.ndarray,
    above: np.ndarray,
) -> BoundarySet:
    """Relabel components by descending mass and collect per-cluster figures.

    ``raw_labels`` may number the components in any order (0 = background).
    Ties in mass go to the component whose first cell comes first in
    row-major order.
    """
    spec = grid.spec
    areas = grid.cell_areas()
    lat_c = spec.lat_centers()
    lon_c = spec.lon_centers()
    flat = raw_labels.ravel()
    order = np.argsort(flat, kind="stable")
    bounds = np.searchsorted(flat[order], np.arange(1, int(flat.max(initial=0)) + 2))

    raw: list[tuple[float, int, int]] = []
    members: dict[int, np.ndarray] = {}
    for lab in range(1, int(flat.max(initial=0)) + 1):
        idx = order[bounds[lab - 1] : bounds[lab]]
        if idx.size == 0:
            continue
        members[lab] = idx
        rows, cols = np.divmod(idx, spec.n_cols)
        mass = math.fsum(grid.mass[rows, cols].tolist())
        raw.append((mass, int(idx[0]), lab))
    raw.sort(key=lambda t: (-t[0], t[1]))

    labels = np.zeros(spec.shape, dtype=np.int32)
    clusters: list[Cluster] = []
    for new, (mass, _, lab) in enumerate(raw, start=1):
        rows, cols = np.divmod(members[lab], spec.n_cols)
        labels[rows, cols] = new
        w = grid.mass[rows, cols]
        if mass > 0:
            centroid = (
                float(np.dot(w, lat_c[rows]) / w.sum()),
                float(np.dot(w, lon_c[cols]) / w.sum()),
            )
        else:
            centroid = (float(lat_c[rows].mean()), float(lon_c[cols].mean()))
        clusters.append(
            Cluster(
                label=new,
                cells=tuple(zip(rows.tolist(), cols.tolist())),
                mass=mass,
                area_km2=math.fsum(areas[rows].tolist()),
                holes_filled=bool(np.any(~above[rows, cols])),
                centroid=centroid,
            )
        )
    return BoundarySet(
        threshold_density=float(rho0),
        clusters=tuple(clusters),
        connectivity=connectivity,
        labels=labels,
        spec=spec,
    )


def cluster_above(grid: DensityGrid, rho0: float, connectivity: Connectivity = 4) -> BoundarySet:
    """Label the hole-free connected components of ``density > rho0``.

    Below-threshold regions that cannot reach the grid frame through
    4-connected below-threshold cells are holes and join the cluster around
    them; components are labelled after hole filling, so a filled hole can
    join clusters that only touched it. No cell above the threshold gives
    an empty set.
    """
    if not rho0 > 0:
        raise UsageError(f"threshold density must be positive, got {rho0}")
    above = above_threshold(grid, rho0)
    filled = ndimage.binary_fill_holes(above, structure=ROOK)
    raw, n = ndimage.label(filled, structure=structure(connectivity))
    bset = assemble_boundary_set(grid, rho0, connectivity, raw, above)
    logger.info(
        "threshold %.4g per km2: %d clusters, %d cells above, %d holes filled",
        rho0,
        n,
        int(above.sum()),
        int((filled & ~above).sum()),
    )
    return bset
