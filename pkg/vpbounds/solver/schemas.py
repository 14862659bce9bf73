"""Value types of the circle search: circles, profiles and search constraints."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


def mass_tolerance(n_cells: int, total: float) -> float:
    """Bound on the round-off of a running float sum of ``n_cells`` masses.

    A running sum within this bound of a target is settled with an exactly
    rounded sum before a circle is accepted.
    """
    return 4.0 * max(n_cells, 1) * float(np.finfo(float).eps) * total


def holds_fraction(masses, total: float, f: float) -> bool:
    """Whether ``masses`` hold at least ``f`` of ``total`` (``math.fsum``)."""
    return math.fsum(masses) / total >= f


class SearchConstraint(BaseModel):
    """Which cell centers may serve as circle centers."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    center: tuple[float, float] | None = None
    max_distance_km: float | None = Field(default=None, gt=0)
    min_cell_mass: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _region_complete(self) -> SearchConstraint:
        if (self.center is None) != (self.max_distance_km is None):
            raise ValueError("center and max_distance_km must be given together")
        return self

    @property
    def has_region(self) -> bool:
        return self.center is not None


@dataclass(frozen=True)
class VpCircle:
    """Smallest circle holding at least ``target_fraction`` of the mass.

    ``radius_km`` is the distance from ``center`` to the farthest included
    cell center; ``cells_included`` counts nonzero-mass cells inside.
    """

    center: tuple[float, float]
    radius_km: float
    target_fraction: float
    achieved_fraction: float
    cells_included: int
    row: int | None = None
    col: int | None = None


@dataclass(frozen=True)
class VpProfile:
    """VP circles over an increasing sweep of fractions."""

    entries: tuple[VpCircle, ...]
    total_mass: float
    masked_below: float | None = None
    masked_count: int = 0

    def __post_init__(self) -> None:
        fs = self.fractions()
        if np.any(np.diff(fs) <= 0):
            raise ValueError("profile fractions must be strictly increasing")
        if np.any(np.diff(self.radii()) < 0):
            raise ValueError("profile radii must be nondecreasing in f")

    def __len__(self) -> int:
        return len(self.entries)

    def fractions(self) -> np.ndarray:
        return np.array([e.target_fraction for e in self.entries], dtype=np.float64)

    def radii(self) -> np.ndarray:
        return np.array([e.radius_km for e in self.entries], dtype=np.float64)

    def cells(self) -> np.ndarray:
        return np.array([e.cells_included for e in self.entries], dtype=np.int64)
