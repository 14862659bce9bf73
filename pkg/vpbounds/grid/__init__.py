"""Grids: rasters, rasterization and geodesic primitives."""

from vpbounds.grid.geodesy import cell_area_km2, haversine_km, haversine_km_array
from vpbounds.grid.io import load_csv, load_geojson, read_grid, read_grid_binary, write_grid
from vpbounds.grid.rasterize import ValuedPolygon, rasterize_points, rasterize_polygons
from vpbounds.grid.spec import DensityGrid, GridSpec

__all__ = [
    "DensityGrid",
    "GridSpec",
    "ValuedPolygon",
    "cell_area_km2",
    "haversine_km",
    "haversine_km_array",
    "load_csv",
    "load_geojson",
    "rasterize_points",
    "rasterize_polygons",
    "read_grid",
    "read_grid_binary",
    "write_grid",
]
