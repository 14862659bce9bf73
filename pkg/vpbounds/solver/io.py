"""Profile CSV files and their JSON metadata sidecar."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from vpbounds.core.errors import DataError, UsageError
from vpbounds.grid.io import fmt_float
from vpbounds.solver.schemas import VpCircle, VpProfile

PROFILE_COLUMNS = (
    "f",
    "radius_km",
    "center_lat",
    "center_lon",
    "achieved_fraction",
    "cells_included",
)


def meta_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_circles_csv(path: str | Path, circles: Iterable[VpCircle]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROFILE_COLUMNS)
        for e in circles:
            writer.writerow(
                [
                    fmt_float(e.target_fraction),
                    fmt_float(e.radius_km),
                    fmt_float(e.center[0]),
                    fmt_float(e.center[1]),
                    fmt_float(e.achieved_fraction),
                    e.cells_included,
                ]
            )


def write_profile_csv(path: str | Path, profile: VpProfile) -> None:
    """Write one row per fraction plus ``<path>.meta.json`` with the total mass."""
    write_circles_csv(path, profile.entries)
    meta = {
        "total_mass": profile.total_mass,
        "masked_below": profile.masked_below,
        "masked_count": profile.masked_count,
        "n_entries": len(profile),
    }
    meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_profile_csv(path: str | Path) -> VpProfile:
    """Inverse of :func:`write_profile_csv`.

    The ``.meta.json`` sidecar is required: it carries the total mass that
    models and fit reports need.
    """
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise UsageError(f"profile file not found: {path}") from None
    entries: list[VpCircle] = []
    with fh:
        reader = csv.DictReader(fh)
        missing = [c for c in PROFILE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"profile CSV {path} lacks columns: {', '.join(missing)}")
        for n, row in enumerate(reader):
            try:
                entries.append(
                    VpCircle(
                        center=(float(row["center_lat"]), float(row["center_lon"])),
                        radius_km=float(row["radius_km"]),
                        target_fraction=float(row["f"]),
                        achieved_fraction=float(row["achieved_fraction"]),
                        cells_included=int(row["cells_included"]),
                    )
                )
            except ValueError as exc:
                raise DataError(f"profile CSV {path} row {n}: {exc}") from None

    meta = _read_meta(path)
    try:
        return VpProfile(
            entries=tuple(entries),
            total_mass=float(meta["total_mass"]),
            masked_below=meta.get("masked_below"),
            masked_count=int(meta.get("masked_count", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise DataError(f"profile CSV {path}: {exc}") from None


def _read_meta(path: str | Path) -> dict:
    sidecar = meta_path(path)
    try:
        meta = json.loads(sidecar.read_text())
    except FileNotFoundError:
        raise DataError(
            f"profile CSV {path} has no {sidecar.name} sidecar; the total mass is unknown"
        ) from None
    except json.JSONDecodeError as exc:
        raise DataError(f"profile metadata {sidecar} is not valid JSON: {exc}") from None
    if not isinstance(meta, dict):
        raise DataError(f"profile metadata {sidecar} must be a JSON object")
    try:
        total = float(meta["total_mass"])
    except (KeyError, TypeError, ValueError):
        raise DataError(f"profile metadata {sidecar} lacks a numeric total_mass") from None
    if not total > 0:
        raise DataError(f"profile metadata {sidecar}: total_mass must be positive, got {total}")
    return meta
