from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

from vpbounds.solver import VpCircle


class GridResponse(BaseModel):
    grid_id: str
    lat_min: float
    lon_min: float
    cell_size: float
    n_rows: int
    n_cols: int
    total_mass: float


class CircleRequest(BaseModel):
    f: float = Field(..., gt=0, le=1, description="Target fraction of the grid mass")
    center: tuple[float, float] | None = Field(
        default=None, description="Center of the admissible region"
    )
    max_distance_km: float | None = Field(default=None, gt=0)
    min_cell_mass: float = Field(default=0.0, ge=0)
    coarse_factor: int = Field(default=1, ge=1)


class CircleResponse(BaseModel):
    f: float
    radius_km: float
    center_lat: float
    center_lon: float
    achieved_fraction: float
    cells_included: int

    @classmethod
    def of(cls, c: VpCircle) -> CircleResponse:
        return cls(
            f=c.target_fraction,
            radius_km=c.radius_km,
            center_lat=c.center[0],
            center_lon=c.center[1],
            achieved_fraction=c.achieved_fraction,
            cells_included=c.cells_included,
        )


class ProfileRequest(BaseModel):
    fractions: list[float] | None = Field(
        default=None, description="Defaults to a geometric ladder ending at 1"
    )
    n_fractions: int | None = Field(default=None, ge=2)
    center: tuple[float, float] | None = None
    max_distance_km: float | None = Field(default=None, gt=0)
    coarse_factor: int = Field(default=1, ge=1)


class ProfileResponse(BaseModel):
    total_mass: float
    entries: list[CircleResponse]


class CityBoundaryRequest(BaseModel):
    approx_center: tuple[float, float]
    box_side_km: float = 30.0
    search_radius_km: float = 5.0
    n_breakpoints: int = 2
    connectivity: Literal[4, 8] = 4
    side: Literal["inner", "outer"] = "inner"
    mask_min_cells: int | None = None
    n_fractions: int | None = None
    seed: int | None = None
    restarts: int | None = Field(default=None, ge=1)


class CityBoundaryResponse(BaseModel):
    threshold_density: float
    principal_label: int | None
    rings: list[dict[str, float]]
    breakpoints_f: list[float]
    rss: float
    boundary: dict[str, Any]
