"""Grid geometry (``GridSpec``) and the immutable mass raster (``DensityGrid``)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from vpbounds.grid.geodesy import row_areas_km2

if TYPE_CHECKING:
    from numpy.typing import NDArray

# Slack for extents that land on ±90° after floating-point accumulation.
_LAT_SLACK = 1e-9

# A point within this many cell widths of an edge is treated as lying on it.
EDGE_EPS = 1e-9


class GridSpec(BaseModel):
    """Regular lat/lon raster geometry.

    Cell ``(i, j)`` spans ``[lat_min + i·cell_size, lat_min + (i+1)·cell_size]``
    by ``[lon_min + j·cell_size, lon_min + (j+1)·cell_size]``. Row 0 is the
    southernmost row.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    lat_min: float
    lon_min: float
    cell_size: float = Field(default=0.01, gt=0)
    n_rows: int = Field(ge=1)
    n_cols: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_latitudes(self) -> GridSpec:
        if self.lat_min < -90.0 - _LAT_SLACK or self.lat_max > 90.0 + _LAT_SLACK:
            raise ValueError(
                f"grid latitudes [{self.lat_min}, {self.lat_max}] leave [-90, 90]"
            )
        return self

    @classmethod
    def covering(
        cls,
        lat_min: float,
        lon_min: float,
        lat_max: float,
        lon_max: float,
        cell_size: float = 0.01,
    ) -> GridSpec:
        """Smallest grid aligned to multiples of ``cell_size`` covering a box."""
        lat0 = math.floor(lat_min / cell_size) * cell_size
        lon0 = math.floor(lon_min / cell_size) * cell_size
        n_rows = max(1, math.ceil((lat_max - lat0) / cell_size - 1e-9))
        n_cols = max(1, math.ceil((lon_max - lon0) / cell_size - 1e-9))
        return cls(lat_min=lat0, lon_min=lon0, cell_size=cell_size, n_rows=n_rows, n_cols=n_cols)

    @property
    def lat_max(self) -> float:
        return self.lat_min + self.n_rows * self.cell_size

    @property
    def lon_max(self) -> float:
        return self.lon_min + self.n_cols * self.cell_size

    @property
    def mid_latitude(self) -> float:
        """Latitude used for the local equirectangular overlap approximation."""
        return 0.5 * (self.lat_min + self.lat_max)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def lat_centers(self) -> NDArray[np.float64]:
        return self.lat_min + (np.arange(self.n_rows) + 0.5) * self.cell_size

    def lon_centers(self) -> NDArray[np.float64]:
        return self.lon_min + (np.arange(self.n_cols) + 0.5) * self.cell_size

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (
            self.lat_min + (row + 0.5) * self.cell_size,
            self.lon_min + (col + 0.5) * self.cell_size,
        )

    def cell_bounds(self, row: int, col: int) -> tuple[float, float, float, float]:
        """``(lat_bottom, lon_left, lat_top, lon_right)`` of one cell."""
        return (
            self.lat_min + row * self.cell_size,
            self.lon_min + col * self.cell_size,
            self.lat_min + (row + 1) * self.cell_size,
            self.lon_min + (col + 1) * self.cell_size,
        )

    def locate(self, lat: float, lon: float) -> tuple[int, int] | None:
        """Cell containing a point (edge points go to the larger index)."""
        row = math.floor((lat - self.lat_min) / self.cell_size + EDGE_EPS)
        col = math.floor((lon - self.lon_min) / self.cell_size + EDGE_EPS)
        if 0 <= row < self.n_rows and 0 <= col < self.n_cols:
            return row, col
        return None

    def sub(self, row0: int, col0: int, n_rows: int, n_cols: int) -> GridSpec:
        return GridSpec(
            lat_min=self.lat_min + row0 * self.cell_size,
            lon_min=self.lon_min + col0 * self.cell_size,
            cell_size=self.cell_size,
            n_rows=n_rows,
            n_cols=n_cols,
        )


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Nonnegative mass per cell on a ``GridSpec``; immutable after construction.

    ``total_mass`` is an exactly rounded sum (``math.fsum``), so it does not
    depend on how the mass array was accumulated.
    """

    spec: GridSpec
    mass: NDArray[np.float64]
    points_outside: int = 0
    total_mass: float = field(init=False)

    def __post_init__(self) -> None:
        mass = np.array(self.mass, dtype=np.float64, copy=True)
        if mass.shape != self.spec.shape:
            raise ValueError(f"mass shape {mass.shape} does not match grid {self.spec.shape}")
        if not np.all(np.isfinite(mass)):
            raise ValueError("mass contains non-finite values")
        if np.any(mass < 0):
            raise ValueError("mass contains negative values")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "total_mass", math.fsum(mass.ravel().tolist()))

    # ------------------------------------------------------------------
    # Derived quantities
    # ------------------------------------------------------------------

    def cell_areas(self) -> NDArray[np.float64]:
        """Cell area per row in km², shape ``(n_rows,)``."""
        return row_areas_km2(self.spec)

    def density(self) -> NDArray[np.float64]:
        """Mass per km² for every cell."""
        return self.mass / self.cell_areas()[:, None]

    def cell_centers(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Center latitude and longitude of every cell, each of grid shape."""
        return np.meshgrid(self.spec.lat_centers(), self.spec.lon_centers(), indexing="ij")

    def nonzero_cells(
        self, min_mass: float = 0.0
    ) -> tuple[NDArray[np.intp], NDArray[np.intp], NDArray[np.float64]]:
        """Rows, columns and masses of cells with ``mass > min_mass`` in row-major order."""
        rows, cols = np.nonzero(self.mass > min_mass)
        return rows, cols, self.mass[rows, cols]

    # ------------------------------------------------------------------
    # Derived grids
    # ------------------------------------------------------------------

    def crop(self, row0: int, row1: int, col0: int, col1: int) -> DensityGrid:
        """Sub-grid of rows ``[row0, row1)`` and columns ``[col0, col1)``."""
        row0, col0 = max(0, row0), max(0, col0)
        row1, col1 = min(self.spec.n_rows, row1), min(self.spec.n_cols, col1)
        if row1 <= row0 or col1 <= col0:
            raise ValueError("crop window does not intersect the grid")
        spec = self.spec.sub(row0, col0, row1 - row0, col1 - col0)
        return DensityGrid(spec=spec, mass=self.mass[row0:row1, col0:col1])

    def decimate(self, factor: int) -> DensityGrid:
        """Block-sum ``factor × factor`` cells into one; edges are zero-padded."""
        if factor < 1:
            raise ValueError("decimation factor must be >= 1")
        if factor == 1:
            return self
        n_rows = -(-self.spec.n_rows // factor)
        n_cols = -(-self.spec.n_cols // factor)
        padded = np.zeros((n_rows * factor, n_cols * factor))
        padded[: self.spec.n_rows, : self.spec.n_cols] = self.mass
        blocks = padded.reshape(n_rows, factor, n_cols, factor).sum(axis=(1, 3))
        spec = GridSpec(
            lat_min=self.spec.lat_min,
            lon_min=self.spec.lon_min,
            cell_size=self.spec.cell_size * factor,
            n_rows=n_rows,
            n_cols=n_cols,
        )
        return DensityGrid(spec=spec, mass=blocks)

    def with_mass(self, mass: NDArray[np.float64]) -> DensityGrid:
        return DensityGrid(spec=self.spec, mass=mass)
