"""Boundary value types and the validated parameter sets of the city workflows."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from vpbounds.grid.spec import GridSpec

Connectivity = Literal[4, 8]


@dataclass(frozen=True)
class Cluster:
    """One hole-free connected set of cells."""

    label: int
    cells: tuple[tuple[int, int], ...]
    mass: float
    area_km2: float
    holes_filled: bool
    centroid: tuple[float, float]

    @property
    def n_cells(self) -> int:
        return len(self.cells)


@dataclass(frozen=True, eq=False)
class BoundarySet:
    """Clusters of cells whose density exceeds ``threshold_density``.

    ``labels`` holds the cluster label of every cell of ``spec`` (0 outside
    all clusters). ``origin`` is the offset of ``spec`` inside the grid the
    analysis started from, so cropped results can be mapped back.
    """

    threshold_density: float
    clusters: tuple[Cluster, ...]
    connectivity: int
    labels: np.ndarray
    spec: GridSpec
    origin: tuple[int, int] = (0, 0)
    principal_label: int | None = None
    provenance: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.clusters)

    def cluster(self, label: int) -> Cluster:
        return self.clusters[label - 1]

    @property
    def principal(self) -> Cluster | None:
        return None if self.principal_label is None else self.cluster(self.principal_label)

    def mask(self, label: int | None = None) -> np.ndarray:
        """Cells of one cluster, or of all clusters when ``label`` is None."""
        return self.labels > 0 if label is None else self.labels == label


class CitySearch(BaseModel):
    """Where to look for one city and how to fit its profile."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    approx_center: tuple[float, float]
    box_side_km: float = Field(default=30.0, gt=0)
    search_radius_km: float = Field(default=5.0, gt=0)
    n_breakpoints: int = Field(default=2, ge=1)
    connectivity: Connectivity = 4
    side: Literal["inner", "outer"] = "inner"
    mask_min_cells: int | None = Field(default=None, ge=1)
    n_fractions: int | None = Field(default=None, ge=2)

    @model_validator(mode="after")
    def _box_holds_search(self) -> CitySearch:
        if self.box_side_km <= 2 * self.search_radius_km:
            raise ValueError(
                f"box_side_km ({self.box_side_km}) must exceed twice search_radius_km "
                f"({self.search_radius_km})"
            )
        return self


_STEPS = (-0.01, 0.0, 0.01)


class FuzzSpec(BaseModel):
    """Perturbations applied around one ``CitySearch``: the full cross product runs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    center_offsets_deg: tuple[tuple[float, float], ...] = tuple(product(_STEPS, _STEPS))
    search_radii_km: tuple[float, ...] = (2.0, 5.0, 8.0)
    box_sides_km: tuple[float, ...] = (40.0, 50.0, 60.0)

    @model_validator(mode="after")
    def _non_empty(self) -> FuzzSpec:
        if not (self.center_offsets_deg and self.search_radii_km and self.box_sides_km):
            raise ValueError("every perturbation axis needs at least one value")
        return self

    @property
    def n_runs(self) -> int:
        return len(self.center_offsets_deg) * len(self.search_radii_km) * len(self.box_sides_km)


@dataclass(frozen=True)
class OverlapReport:
    jaccard: float
    area_a_km2: float
    area_b_km2: float
    area_intersection_km2: float
    cells_a: int
    cells_b: int
    cells_intersection: int
