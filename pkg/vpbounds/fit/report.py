"""Fit report JSON."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from vpbounds.core.errors import DataError, UsageError
from vpbounds.fit.schemas import RingFit


def fit_report(fit: RingFit) -> dict[str, Any]:
    """Readable summary plus the exact parameters needed to rebuild the fit."""
    segments = [
        {"slope": s, "logf_range": [lo, hi]}
        for s, (lo, hi) in zip(fit.slopes, fit.segment_ranges())
    ]
    breakpoints = [
        {"logf": b, "f": math.exp(b), "r_km": fit.radius_at(b)} for b in fit.breakpoints_logf
    ]
    return {
        "n_segments": fit.n_segments,
        "segments": segments,
        "breakpoints": breakpoints,
        "rss": fit.rss,
        "intercept": fit.intercept,
        "fit_range_logf": list(fit.fit_range_logf),
        "n_points": fit.n_points,
        "mask": {"excluded_low_f": fit.excluded_low_f, "excluded_count": fit.excluded_count},
        "seed": fit.seed,
    }


def fit_from_report(doc: dict[str, Any]) -> RingFit:
    try:
        return RingFit(
            breakpoints_logf=tuple(float(b["logf"]) for b in doc["breakpoints"]),
            slopes=tuple(float(s["slope"]) for s in doc["segments"]),
            intercept=float(doc["intercept"]),
            rss=float(doc["rss"]),
            fit_range_logf=(float(doc["fit_range_logf"][0]), float(doc["fit_range_logf"][1])),
            n_points=int(doc["n_points"]),
            excluded_low_f=doc.get("mask", {}).get("excluded_low_f"),
            excluded_count=int(doc.get("mask", {}).get("excluded_count", 0)),
            seed=doc.get("seed"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed fit report: {exc}") from None


def write_fit_json(path: str | Path, fit: RingFit) -> None:
    Path(path).write_text(json.dumps(fit_report(fit), indent=2) + "\n")


def read_fit_json(path: str | Path) -> RingFit:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"fit report not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"fit report {path} is not valid JSON: {exc}") from None
    return fit_from_report(doc)
