"""Parameter sets of the synthetic city generators."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from vpbounds.grid.spec import GridSpec


class RingCitySpec(BaseModel):
    """A monocentric city whose density follows concentric power-law rings.

    ``rings`` lists ``(outer_radius_km, exponent)`` from the center out.
    ``density_form="continuous"`` chains the ring coefficients so density is
    continuous; ``"profile"`` instead makes the mass fraction inside radius
    r an exact power of r within every ring, which puts a clean kink in the
    log-log profile at each ring radius (density jumps there).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    center: tuple[float, float]
    rings: tuple[tuple[float, float], ...]
    total_mass: float = Field(gt=0)
    grid: GridSpec
    noise_sigma: float = Field(default=0.0, ge=0)
    density_form: Literal["continuous", "profile"] = "continuous"

    @model_validator(mode="after")
    def _rings_valid(self) -> RingCitySpec:
        if not self.rings:
            raise ValueError("a ring city needs at least one ring")
        radii = [r for r, _ in self.rings]
        if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("ring radii must be positive and strictly increasing")
        if any(a <= 0 for _, a in self.rings):
            raise ValueError("ring exponents must be positive")
        return self

    @property
    def outer_radius_km(self) -> float:
        return self.rings[-1][0]


class Disc(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    center: tuple[float, float]
    radius_km: float = Field(gt=0)
    density: float = Field(gt=0)
    # optional band just outside the disc with its own density
    rim_width_km: float = Field(default=0.0, ge=0)
    rim_density: float = Field(default=0.0, ge=0)


class DiscCitySpec(BaseModel):
    """Uniform discs on a uniform plain; densities in mass per km²."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    grid: GridSpec
    discs: tuple[Disc, ...]
    plain_density: float = Field(default=0.0, ge=0)
