"""Concentric-ring power-law density model.

Inside ring j the density is ``c_j · r^(a_j − 2)``, so the mass inside radius
r grows like ``r^a_j`` there and ``log r`` is linear in ``log f`` with slope
``1/a_j``. Coefficients are chained so the density is continuous at every
shared radius and scaled so the model holds the total mass ``P``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.special import logsumexp

from vpbounds.core.errors import (
    DensityDomainError,
    ModelInvariantError,
    NonPositiveSlopeError,
    RingIndexError,
)
from vpbounds.fit.schemas import RingFit
from vpbounds.solver.schemas import VpProfile

logger = logging.getLogger(__name__)

MIN_SLOPE = 1e-6
INVARIANT_RTOL = 1e-9

Side = Literal["inner", "outer"]


@dataclass(frozen=True)
class Ring:
    r_inner_km: float
    r_outer_km: float
    a: float
    c: float

    def density(self, r_km: float) -> float:
        return self.c * r_km ** (self.a - 2.0)

    def mass_between(self, r0: float, r1: float) -> float:
        return 2.0 * math.pi * self.c / self.a * (r1**self.a - r0**self.a)


@dataclass(frozen=True)
class RingModel:
    rings: tuple[Ring, ...]
    total_mass: float
    outer_radius_km: float
    # log f distance the last segment was extrapolated to reach f = 1
    extrapolated_logf: float = 0.0

    @property
    def n_rings(self) -> int:
        return len(self.rings)

    def radii(self) -> np.ndarray:
        return np.array([r.r_outer_km for r in self.rings])

    def exponents(self) -> np.ndarray:
        return np.array([r.a for r in self.rings])

    def coefficients(self) -> np.ndarray:
        return np.array([r.c for r in self.rings])


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def check_invariants(model: RingModel) -> None:
    """Raise ModelInvariantError unless density continuity and mass closure hold."""
    rings = model.rings
    for left, right in zip(rings[:-1], rings[1:]):
        r = left.r_outer_km
        err = _rel(left.density(r), right.density(r))
        if err > INVARIANT_RTOL:
            raise ModelInvariantError(f"density continuity at r={r:g} km", err)
    mass = math.fsum(g.mass_between(g.r_inner_km, g.r_outer_km) for g in rings)
    err = _rel(mass, model.total_mass)
    if err > INVARIANT_RTOL:
        raise ModelInvariantError("mass closure", err)


def ring_model_from_rings(
    radii: Sequence[float],
    exponents: Sequence[float],
    total_mass: float,
    *,
    extrapolated_logf: float = 0.0,
) -> RingModel:
    """Build a model from ring outer radii (the last is the outer radius) and exponents.

    The chain ``c_{j+1} = c_j · r_j^(a_j − 2) / r_j^(a_{j+1} − 2)`` is run in
    log space from ``c_1 = 1`` and the whole chain is then scaled so the rings
    hold ``total_mass``.
    """
    radii = [float(r) for r in radii]
    exponents = [float(a) for a in exponents]
    if len(radii) != len(exponents) or not radii:
        raise ValueError("need one exponent per ring radius")
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("ring radii must be positive and strictly increasing")
    if any(a <= 0 for a in exponents):
        raise ValueError("ring exponents must be positive")
    if not total_mass > 0:
        raise ValueError("total mass must be positive")

    log_c = [0.0]
    for j in range(len(radii) - 1):
        log_c.append(log_c[j] + (exponents[j] - exponents[j + 1]) * math.log(radii[j]))

    inner = [0.0, *radii[:-1]]
    log_terms = [
        math.log(2.0 * math.pi / a)
        + lc
        + a * math.log(r1)
        + (math.log1p(-math.exp(a * (math.log(r0) - math.log(r1)))) if r0 > 0 else 0.0)
        for lc, a, r0, r1 in zip(log_c, exponents, inner, radii)
    ]
    log_scale = math.log(total_mass) - float(logsumexp(log_terms))
    rings = tuple(
        Ring(r_inner_km=r0, r_outer_km=r1, a=a, c=math.exp(lc + log_scale))
        for lc, a, r0, r1 in zip(log_c, exponents, inner, radii)
    )
    model = RingModel(
        rings=rings,
        total_mass=float(total_mass),
        outer_radius_km=radii[-1],
        extrapolated_logf=extrapolated_logf,
    )
    check_invariants(model)
    return model


def model_from_fit(
    fit: RingFit,
    profile: VpProfile | None = None,
    *,
    total_mass: float | None = None,
) -> RingModel:
    """Ring model implied by a fit: ``a_j = 1/slope_j``, radii from the fitted line.

    The outer radius is the fitted radius at f = 1, extrapolating the last
    segment when the profile stops short of f = 1.

    Raises:
        NonPositiveSlopeError: a slope is not above ``MIN_SLOPE``.
    """
    if total_mass is None:
        if profile is None:
            raise ValueError("model_from_fit needs a profile or an explicit total_mass")
        total_mass = profile.total_mass
    for j, s in enumerate(fit.slopes):
        if s <= MIN_SLOPE:
            raise NonPositiveSlopeError(j, s)
    radii = [fit.radius_at(b) for b in fit.breakpoints_logf]
    radii.append(fit.radius_at(0.0))
    extrapolated = 0.0 - fit.fit_range_logf[1]
    if extrapolated > 0:
        logger.warning(
            "outer radius extrapolated %.4f in log f beyond the last profile entry", extrapolated
        )
    model = ring_model_from_rings(
        radii,
        [1.0 / s for s in fit.slopes],
        total_mass,
        extrapolated_logf=max(0.0, extrapolated),
    )
    logger.info(
        "ring model: %d rings, a=%s, outer radius %.3f km",
        model.n_rings,
        [round(g.a, 4) for g in model.rings],
        model.outer_radius_km,
    )
    return model


def _ring_index(model: RingModel, r_km: float) -> int:
    # outer-edge convention: a shared radius belongs to the inner ring
    return int(np.searchsorted(model.radii(), r_km, side="left"))


def model_density(model: RingModel, r_km: float) -> float:
    """Model density (mass per km²) at ``r_km``.

    Raises:
        DensityDomainError: ``r_km`` is outside ``(0, outer_radius_km]``.
    """
    if not 0.0 < r_km <= model.outer_radius_km:
        raise DensityDomainError(r_km, model.outer_radius_km)
    return model.rings[_ring_index(model, r_km)].density(r_km)


def cumulative_fraction(model: RingModel, r_km: float) -> float:
    """Fraction of the model mass inside radius ``r_km`` (1 beyond the outer radius)."""
    if r_km <= 0.0:
        return 0.0
    if r_km >= model.outer_radius_km:
        return 1.0
    j = _ring_index(model, r_km)
    mass = math.fsum(g.mass_between(g.r_inner_km, g.r_outer_km) for g in model.rings[:j])
    g = model.rings[j]
    mass += g.mass_between(g.r_inner_km, r_km)
    return mass / model.total_mass


def default_threshold_ring(model: RingModel) -> int:
    """The ring just inside the last breakpoint (ring 0 for a single-ring model)."""
    return max(0, model.n_rings - 2)


def threshold_density(
    model: RingModel,
    ring_index: int | None = None,
    side: Side = "inner",
) -> float:
    """Boundary threshold ``ρ0 = (c_b / a_b) · r_b^(a_b − 2)``.

    ``r_b`` is the outer radius of ring ``b``. ``side="inner"`` takes ``(a, c)``
    from ring ``b`` itself; ``side="outer"`` takes them from ring ``b + 1``.

    Raises:
        RingIndexError: ``b`` (or ``b + 1`` for the outer side) is not a ring.
    """
    b = default_threshold_ring(model) if ring_index is None else ring_index
    if not 0 <= b < model.n_rings:
        raise RingIndexError(b, model.n_rings)
    r_b = model.rings[b].r_outer_km
    if side == "inner":
        ring = model.rings[b]
    elif side == "outer":
        if b + 1 >= model.n_rings:
            raise RingIndexError(b + 1, model.n_rings)
        ring = model.rings[b + 1]
    else:
        raise ValueError(f"side must be 'inner' or 'outer', got {side!r}")
    rho0 = ring.c / ring.a * r_b ** (ring.a - 2.0)
    if not rho0 > 0:
        raise ModelInvariantError("threshold positivity", 1.0)
    if ring.a > 1.0 and not rho0 < ring.density(r_b):
        raise ModelInvariantError("threshold ordering rho0 < density(r_b)", 0.0)
    return rho0
