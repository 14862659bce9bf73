"""Cluster outlines as GeoJSON, plus the per-cell CSV views of a boundary set."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np
import shapely
from shapely.geometry import MultiPolygon, Polygon, mapping
from shapely.geometry.polygon import orient
from shapely.ops import unary_union

from vpbounds.boundary.schemas import BoundarySet, Cluster
from vpbounds.grid.io import fmt_float
from vpbounds.grid.spec import GridSpec


def _cell_outline(cluster: Cluster) -> Polygon | MultiPolygon:
    # Unit squares in (col, row) corner coordinates: the union is exact.
    rows = np.fromiter((r for r, _ in cluster.cells), dtype=np.float64)
    cols = np.fromiter((c for _, c in cluster.cells), dtype=np.float64)
    merged = unary_union(shapely.box(cols, rows, cols + 1.0, rows + 1.0))
    return merged.simplify(0.0)


def _to_lonlat(geom, spec: GridSpec):
    cs = spec.cell_size
    return shapely.transform(
        geom,
        lambda xy: np.column_stack((spec.lon_min + xy[:, 0] * cs, spec.lat_min + xy[:, 1] * cs)),
    )


def _oriented(geom) -> Polygon | MultiPolygon:
    if isinstance(geom, MultiPolygon):
        return MultiPolygon([orient(p, sign=1.0) for p in geom.geoms])
    return orient(geom, sign=1.0)


def cluster_geometry(cluster: Cluster, spec: GridSpec) -> Polygon | MultiPolygon:
    """Rectilinear outline of a cluster in lon/lat, exterior rings counterclockwise."""
    return _oriented(_to_lonlat(_cell_outline(cluster), spec))


def polygonize(bset: BoundarySet, spec: GridSpec | None = None) -> list[dict[str, Any]]:
    """One GeoJSON feature per cluster.

    Clusters joined only through cell corners (8-connectivity) come out as
    MultiPolygons.
    """
    spec = spec or bset.spec
    features = []
    for cl in bset.clusters:
        features.append(
            {
                "type": "Feature",
                "geometry": mapping(cluster_geometry(cl, spec)),
                "properties": {
                    "label": cl.label,
                    "mass": cl.mass,
                    "area_km2": cl.area_km2,
                    "threshold": bset.threshold_density,
                    "is_principal": cl.label == bset.principal_label,
                    "holes_filled": cl.holes_filled,
                    "n_cells": cl.n_cells,
                },
            }
        )
    return features


def boundary_geojson(bset: BoundarySet) -> dict[str, Any]:
    return {"type": "FeatureCollection", "features": polygonize(bset)}


def write_boundary_geojson(path: str | Path, bset: BoundarySet) -> None:
    Path(path).write_text(json.dumps(boundary_geojson(bset), indent=2) + "\n")


def write_labels_csv(path: str | Path, bset: BoundarySet) -> None:
    """``row,col,lat_center,lon_center,label`` for every clustered cell."""
    spec = bset.spec
    lats, lons = spec.lat_centers(), spec.lon_centers()
    r0, c0 = bset.origin
    rows, cols = np.nonzero(bset.labels)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "col", "lat_center", "lon_center", "label"])
        for r, c in zip(rows.tolist(), cols.tolist()):
            writer.writerow(
                [r + r0, c + c0, fmt_float(lats[r]), fmt_float(lons[c]), int(bset.labels[r, c])]
            )
