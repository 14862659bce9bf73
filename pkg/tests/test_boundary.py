"""Tests for threshold clustering, outlines, overlap and the city workflow pieces."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest
from scipy import ndimage
from shapely.geometry import MultiPolygon, Polygon

from vpbounds.boundary import (
    CityResult,
    CitySearch,
    FuzzSpec,
    boundary_from_model,
    boundary_geojson,
    cell_mask,
    cluster_above,
    compare_boundaries,
    crop_box,
    fuzz_boundary,
    write_fuzz_outputs,
    write_labels_csv,
)
from vpbounds.boundary import fuzz as fuzz_module
from vpbounds.boundary.clusters import ROOK, above_threshold, structure
from vpbounds.boundary.polygons import cluster_geometry
from vpbounds.core.errors import BoxTooSmallError, EmptyBoundaryError, EmptyBoxError, UsageError
from vpbounds.grid import DensityGrid, GridSpec, haversine_km_array
from vpbounds.model import ring_model_from_rings
from vpbounds.synth import Disc, DiscCitySpec, brute_force_clusters, generate_disc_city

CITY_CENTER = (12.0, 30.0)


def _grid(density: np.ndarray, cell: float = 0.01) -> DensityGrid:
    n_rows, n_cols = density.shape
    spec = GridSpec(lat_min=0.0, lon_min=0.0, cell_size=cell, n_rows=n_rows, n_cols=n_cols)
    grid = DensityGrid(spec=spec, mass=np.zeros(density.shape))
    return grid.with_mass(density * grid.cell_areas()[:, None])


def _two_blocks() -> DensityGrid:
    """Low plain with a heavy block (rows 2-9) and a lighter block (rows 20-23)."""
    rho = np.full((30, 30), 10.0)
    rho[2:10, 2:10] = 1000.0
    rho[20:24, 20:24] = 1000.0
    return _grid(rho)


# ---------------------------------------------------------------------------
# Clustering
# ---------------------------------------------------------------------------


class TestClusterAbove:
    @pytest.mark.parametrize("connectivity", [4, 8])
    def test_matches_flood_fill_on_random_grids(self, random_grid, connectivity):
        for seed in range(50):
            grid = random_grid(seed, n_rows=20, n_cols=20, zero_share=0.2)
            rho0 = float(np.median(grid.density()))
            fast = cluster_above(grid, rho0, connectivity)
            slow = brute_force_clusters(grid, rho0, connectivity)
            np.testing.assert_array_equal(fast.labels, slow.labels)
            assert fast.clusters == slow.clusters

    def test_clusters_are_hole_free(self, random_grid):
        for seed in range(20):
            grid = random_grid(seed, n_rows=20, n_cols=20, zero_share=0.2)
            bset = cluster_above(grid, float(np.median(grid.density())))
            for cl in bset.clusters:
                mask = bset.mask(cl.label)
                filled = ndimage.binary_fill_holes(mask, structure=ROOK)
                np.testing.assert_array_equal(filled, mask)

    def test_raising_the_threshold_never_grows_a_cluster(self, random_grid):
        for seed in range(20):
            grid = random_grid(seed, n_rows=20, n_cols=20, zero_share=0.2)
            rho = grid.density()
            low_rho, high_rho = float(np.quantile(rho, 0.4)), float(np.quantile(rho, 0.7))
            low, high = cluster_above(grid, low_rho), cluster_above(grid, high_rho)
            above_low = above_threshold(grid, low_rho)
            above_high = above_threshold(grid, high_rho)
            for cl in high.clusters:
                core = high.mask(cl.label) & above_high
                labels = np.unique(low.labels[core])
                assert labels.size == 1 and labels[0] > 0
                assert np.all((low.mask(int(labels[0])) & above_low)[core])

    def test_reclustering_a_cluster_returns_it(self, random_grid):
        for seed in range(20):
            grid = random_grid(seed, n_rows=20, n_cols=20, zero_share=0.2)
            rho0 = float(np.median(grid.density()))
            bset = cluster_above(grid, rho0)
            for cl in bset.clusters[:3]:
                mask = bset.mask(cl.label)
                alone = cluster_above(grid.with_mass(np.where(mask, grid.mass, 0.0)), rho0)
                assert len(alone) == 1
                np.testing.assert_array_equal(alone.mask(1), mask)

    def test_enclosed_low_cells_join_the_cluster(self):
        rho = np.full((7, 7), 1.0)
        rho[1:6, 1:6] = 100.0
        rho[3, 3] = 1.0
        bset = cluster_above(_grid(rho), 50.0)
        assert len(bset) == 1
        assert bset.clusters[0].n_cells == 25
        assert bset.clusters[0].holes_filled

    def test_labels_run_by_descending_mass(self):
        bset = cluster_above(_two_blocks(), 100.0)
        assert [cl.n_cells for cl in bset.clusters] == [64, 16]
        assert bset.clusters[0].mass > bset.clusters[1].mass
        assert bset.labels[5, 5] == 1
        assert bset.labels[21, 21] == 2

    def test_diagonal_neighbours_merge_only_under_8_connectivity(self):
        rho = np.full((4, 4), 1.0)
        rho[1, 1] = rho[2, 2] = 100.0
        assert len(cluster_above(_grid(rho), 50.0, 4)) == 2
        queen = cluster_above(_grid(rho), 50.0, 8)
        assert len(queen) == 1
        feature = boundary_geojson(queen)["features"][0]
        assert feature["geometry"]["type"] == "MultiPolygon"

    def test_threshold_is_strict(self):
        grid = _grid(np.full((3, 3), 10.0))
        top = float(grid.density().max())
        assert len(cluster_above(grid, top)) == 0
        assert len(cluster_above(grid, 0.999 * top)) == 1

    def test_cluster_area_and_mass(self):
        bset = cluster_above(_two_blocks(), 100.0)
        small = bset.cluster(2)
        grid = _two_blocks()
        assert small.area_km2 == pytest.approx(grid.cell_areas()[20:24].sum() * 4, rel=1e-12)
        assert small.mass == pytest.approx(1000.0 * small.area_km2, rel=1e-12)

    def test_invalid_arguments(self):
        with pytest.raises(UsageError):
            structure(6)
        with pytest.raises(UsageError):
            cluster_above(_two_blocks(), 0.0)


# ---------------------------------------------------------------------------
# Outlines
# ---------------------------------------------------------------------------


class TestPolygons:
    def test_outline_area_matches_the_cells(self, random_grid):
        grid = random_grid(17, n_rows=20, n_cols=20, zero_share=0.2)
        bset = cluster_above(grid, float(np.median(grid.density())))
        cs = grid.spec.cell_size
        for cl in bset.clusters:
            geom = cluster_geometry(cl, grid.spec)
            assert geom.area == pytest.approx(cl.n_cells * cs * cs, rel=1e-9)

    def test_exteriors_are_counterclockwise_without_holes(self, random_grid):
        grid = random_grid(21, n_rows=20, n_cols=20, zero_share=0.2)
        bset = cluster_above(grid, float(np.median(grid.density())))
        for cl in bset.clusters:
            geom = cluster_geometry(cl, grid.spec)
            parts = geom.geoms if isinstance(geom, MultiPolygon) else [geom]
            for part in parts:
                assert isinstance(part, Polygon)
                assert part.exterior.is_ccw
                assert len(part.interiors) == 0

    def test_feature_properties(self):
        bset = cluster_above(_two_blocks(), 100.0)
        doc = boundary_geojson(bset)
        assert doc["type"] == "FeatureCollection"
        props = doc["features"][0]["properties"]
        assert props["label"] == 1
        assert props["n_cells"] == 64
        assert props["threshold"] == 100.0
        assert props["is_principal"] is False

    def test_outline_covers_exactly_the_cluster_cells(self):
        bset = cluster_above(_two_blocks(), 100.0)
        mask = cell_mask(boundary_geojson(bset), bset.spec)
        np.testing.assert_array_equal(mask, bset.mask())

    def test_labels_csv(self, tmp_path):
        bset = cluster_above(_two_blocks(), 100.0)
        write_labels_csv(tmp_path / "labels.csv", bset)
        lines = (tmp_path / "labels.csv").read_text().splitlines()
        assert lines[0] == "row,col,lat_center,lon_center,label"
        assert len(lines) == 1 + 64 + 16


# ---------------------------------------------------------------------------
# Overlap
# ---------------------------------------------------------------------------


class TestCompare:
    def test_identical_boundaries(self):
        bset = cluster_above(_two_blocks(), 100.0)
        report = compare_boundaries(bset, boundary_geojson(bset), bset.spec)
        assert report.jaccard == 1.0
        assert report.cells_a == report.cells_b == report.cells_intersection == 80

    def test_disjoint_boundaries(self):
        bset = cluster_above(_two_blocks(), 100.0)
        report = compare_boundaries(bset.mask(1), bset.mask(2), bset.spec)
        assert report.jaccard == 0.0
        assert report.area_intersection_km2 == 0.0

    def test_random_masks(self, rng):
        spec = GridSpec(lat_min=40.0, lon_min=0.0, cell_size=0.05, n_rows=15, n_cols=15)
        areas = DensityGrid(spec=spec, mass=np.zeros(spec.shape)).cell_areas()[:, None]
        for _ in range(20):
            a = rng.random(spec.shape) < 0.5
            b = rng.random(spec.shape) < 0.5
            report = compare_boundaries(a, b, spec)
            inter = (areas * (a & b)).sum()
            union = (areas * (a | b)).sum()
            assert report.jaccard == pytest.approx(inter / union, rel=1e-12)
            assert 0.0 <= report.jaccard <= 1.0

    def test_empty_boundary(self):
        spec = _two_blocks().spec
        with pytest.raises(EmptyBoundaryError):
            compare_boundaries(np.zeros(spec.shape, dtype=bool), np.ones(spec.shape, bool), spec)

    def test_mask_shape_mismatch(self):
        spec = _two_blocks().spec
        with pytest.raises(UsageError):
            cell_mask(np.ones((2, 2), dtype=bool), spec)


# ---------------------------------------------------------------------------
# Workflow pieces
# ---------------------------------------------------------------------------


class TestCropBox:
    def test_box_is_centered_and_sized(self, disc_city):
        grid, _ = disc_city
        box, (r0, c0) = crop_box(grid, CITY_CENTER, 10.0)
        lat_c = box.spec.lat_centers()
        lon_c = box.spec.lon_centers()
        assert lat_c[0] < CITY_CENTER[0] < lat_c[-1]
        assert lon_c[0] < CITY_CENTER[1] < lon_c[-1]
        assert (lat_c[-1] - lat_c[0]) * 111.195 <= 10.0
        np.testing.assert_array_equal(
            box.mass, grid.mass[r0 : r0 + box.spec.n_rows, c0 : c0 + box.spec.n_cols]
        )

    def test_box_outside_the_grid(self, disc_city):
        grid, _ = disc_city
        with pytest.raises(EmptyBoxError):
            crop_box(grid, (CITY_CENTER[0] + 5.0, CITY_CENTER[1]), 10.0)

    def test_box_without_mass(self):
        rho = np.zeros((40, 40))
        rho[0, 0] = 1.0
        with pytest.raises(EmptyBoxError):
            crop_box(_grid(rho), (0.3, 0.3), 5.0)


class TestBoundaryFromModel:
    # a single uniform ring puts the threshold at P / (2·π·r²) = 100 per km²
    MODEL = ring_model_from_rings([5.0], [2.0], 5000.0 * math.pi)

    def test_principal_is_the_cluster_under_the_center(self):
        grid = _two_blocks()
        search = CitySearch(
            approx_center=grid.spec.cell_center(21, 21), box_side_km=20.0, search_radius_km=2.0
        )
        bset = boundary_from_model(grid, self.MODEL, search)
        assert bset.threshold_density == pytest.approx(100.0)
        assert len(bset) == 2
        assert bset.principal_label == 2
        assert bset.provenance["threshold_ring"] == 0
        assert bset.provenance["exponents"] == [2.0]

    def test_principal_falls_back_to_the_nearest_centroid(self):
        grid = _two_blocks()
        search = CitySearch(
            approx_center=grid.spec.cell_center(14, 14), box_side_km=20.0, search_radius_km=2.0
        )
        bset = boundary_from_model(grid, self.MODEL, search)
        assert bset.labels[14, 14] == 0
        assert bset.principal_label == 2

    def test_box_too_small(self):
        model = ring_model_from_rings([6.0, 20.0], [1.5, 0.5], 1e5)
        search = CitySearch(approx_center=(0.1, 0.1), box_side_km=11.0, search_radius_km=2.0)
        with pytest.raises(BoxTooSmallError) as info:
            boundary_from_model(_two_blocks(), model, search)
        assert info.value.half_side_km == 5.5

    def test_search_box_must_hold_the_search_radius(self):
        with pytest.raises(ValueError):
            CitySearch(approx_center=(0.0, 0.0), box_side_km=10.0, search_radius_km=5.0)


class TestFuzz:
    SEARCH = CitySearch(
        approx_center=CITY_CENTER, box_side_km=20.0, search_radius_km=3.0, n_breakpoints=1
    )

    def test_single_run_gives_zero_one_frequencies(self, small_city):
        spec = FuzzSpec(
            center_offsets_deg=((0.0, 0.0),), search_radii_km=(3.0,), box_sides_km=(20.0,)
        )
        result = fuzz_boundary(small_city, self.SEARCH, spec, seed=0, restarts=2)
        assert result.n_success == 1
        assert set(np.unique(result.frequency).tolist()) <= {0.0, 1.0}
        assert result.frequency[small_city.spec.locate(*CITY_CENTER)] == 1.0

    def test_rim_straddling_the_threshold_gets_a_fractional_frequency(
        self, square_spec, monkeypatch
    ):
        disc = Disc(
            center=CITY_CENTER,
            radius_km=4.0,
            density=10000.0,
            rim_width_km=2.0,
            rim_density=5000.0,
        )
        city = DiscCitySpec(
            grid=square_spec(CITY_CENTER, 14.0, 0.01), discs=(disc,), plain_density=200.0
        )
        grid = generate_disc_city(city)
        # threshold per box side: the rim clears it only in the 20 km box
        levels = {20.0: 4000.0, 24.0: 6000.0, 28.0: 6000.0}

        def fixed_threshold_city(grid, search, **_):
            box, origin = crop_box(grid, search.approx_center, search.box_side_km)
            rho0 = levels[search.box_side_km]
            # one uniform ring: threshold P / (2·π·r²)
            model = ring_model_from_rings([5.0], [2.0], 2.0 * math.pi * 25.0 * rho0)
            return CityResult(None, None, model, boundary_from_model(box, model, search, origin))

        monkeypatch.setattr(fuzz_module, "city_boundary", fixed_threshold_city)
        spec = FuzzSpec(
            center_offsets_deg=((0.0, 0.0),), search_radii_km=(2.0,), box_sides_km=tuple(levels)
        )
        result = fuzz_boundary(grid, self.SEARCH, spec)
        assert result.n_success == 3

        lat, lon = grid.cell_centers()
        d = haversine_km_array(CITY_CENTER[0], CITY_CENTER[1], lat.ravel(), lon.ravel())
        d = d.reshape(grid.spec.shape)
        rim = (d > 4.1) & (d < 5.9)
        assert rim.any()
        assert np.all(result.frequency[d < 3.9] == 1.0)
        np.testing.assert_allclose(result.frequency[rim], 1.0 / 3.0)
        assert np.all(result.frequency[d > 6.1] == 0.0)

    def test_failed_runs_are_recorded(self, small_city, tmp_path):
        spec = FuzzSpec(
            center_offsets_deg=((0.0, 0.0),), search_radii_km=(3.0,), box_sides_km=(5.0, 20.0)
        )
        result = fuzz_boundary(small_city, self.SEARCH, spec, seed=0, restarts=2)
        assert [run.ok for run in result.runs] == [False, True]
        assert "search_radius_km" in result.runs[0].error
        written = write_fuzz_outputs(tmp_path / "fuzz", small_city, result)
        assert [p.name for p in written] == ["inclusion.csv", "run_001.geojson"]
        doc = json.loads(written[1].read_text())
        assert doc["type"] == "FeatureCollection"
        rows = written[0].read_text().splitlines()
        assert len(rows) == 1 + small_city.spec.n_rows * small_city.spec.n_cols
