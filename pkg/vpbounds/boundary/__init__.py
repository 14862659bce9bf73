from vpbounds.boundary.clusters import assemble_boundary_set, cluster_above
from vpbounds.boundary.compare import cell_mask, compare_boundaries, load_boundary_geojson
from vpbounds.boundary.fuzz import FuzzResult, FuzzRun, fuzz_boundary, write_fuzz_outputs
from vpbounds.boundary.polygons import (
    boundary_geojson,
    polygonize,
    write_boundary_geojson,
    write_labels_csv,
)
from vpbounds.boundary.schemas import BoundarySet, CitySearch, Cluster, FuzzSpec, OverlapReport
from vpbounds.boundary.workflow import (
    CityResult,
    RegionResult,
    boundary_from_model,
    city_boundary,
    city_profile,
    crop_box,
    region_boundaries,
)

__all__ = [
    "BoundarySet",
    "CityResult",
    "CitySearch",
    "Cluster",
    "FuzzResult",
    "FuzzRun",
    "FuzzSpec",
    "OverlapReport",
    "RegionResult",
    "assemble_boundary_set",
    "boundary_from_model",
    "boundary_geojson",
    "cell_mask",
    "city_boundary",
    "city_profile",
    "cluster_above",
    "compare_boundaries",
    "crop_box",
    "fuzz_boundary",
    "load_boundary_geojson",
    "polygonize",
    "region_boundaries",
    "write_boundary_geojson",
    "write_fuzz_outputs",
    "write_labels_csv",
]
