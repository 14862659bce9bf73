"""Model report JSON."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from vpbounds.core.errors import DataError, RingIndexError, UsageError
from vpbounds.model.rings import (
    RingModel,
    Side,
    default_threshold_ring,
    ring_model_from_rings,
    threshold_density,
)


def model_report(
    model: RingModel, ring_index: int | None = None, side: Side = "inner"
) -> dict[str, Any]:
    """Rings, P and the threshold; the other-side threshold is reported when defined."""
    b = default_threshold_ring(model) if ring_index is None else ring_index
    rho0 = threshold_density(model, b, side)
    other: Side = "outer" if side == "inner" else "inner"
    try:
        alternative = threshold_density(model, b, other)
    except RingIndexError:
        alternative = None
    return {
        "total_mass": model.total_mass,
        "outer_radius_km": model.outer_radius_km,
        "rings": [
            {"r_inner_km": g.r_inner_km, "r_outer_km": g.r_outer_km, "a": g.a, "c": g.c}
            for g in model.rings
        ],
        "threshold": {
            "rho0": rho0,
            "ring_index": b,
            "side": side,
            "alternative_side": other,
            "alternative_rho0": alternative,
        },
        "extrapolated_logf": model.extrapolated_logf,
    }


def model_from_report(doc: dict[str, Any]) -> RingModel:
    """Rebuild the model from its radii and exponents (coefficients are re-derived)."""
    try:
        rings = doc["rings"]
        return ring_model_from_rings(
            [float(g["r_outer_km"]) for g in rings],
            [float(g["a"]) for g in rings],
            float(doc["total_mass"]),
            extrapolated_logf=float(doc.get("extrapolated_logf", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed model report: {exc}") from None


def write_model_json(
    path: str | Path, model: RingModel, ring_index: int | None = None, side: Side = "inner"
) -> None:
    Path(path).write_text(json.dumps(model_report(model, ring_index, side), indent=2) + "\n")


def read_model_json(path: str | Path) -> RingModel:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"model report not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"model report {path} is not valid JSON: {exc}") from None
    return model_from_report(doc)
