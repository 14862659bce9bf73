"""End-to-end tests of the ``vpbounds`` command line."""

from __future__ import annotations

import configparser
import json
from pathlib import Path

import pytest

from vpbounds.cli import RunConfig, run
from vpbounds.grid import read_grid
from vpbounds.solver import read_profile_csv

CITY = ["--center", "12", "30", "--box-side-km", "20", "--search-radius-km", "3"]
FIT = ["--breakpoints", "1", "--restarts", "2", "--seed", "7"]


@pytest.fixture(scope="module")
def city_grid(tmp_path_factory) -> Path:
    """A 4 km disc on a plain, written by the ``synth`` subcommand."""
    path = tmp_path_factory.mktemp("synth") / "city.bin"
    code = run(
        [
            "synth",
            "--kind", "disc",
            "--center", "12", "30",
            "--radius-km", "4",
            "--cell-size", "0.01",
            "--extent-km", "14",
            "--out", str(path),
        ]
    )  # fmt: skip
    assert code == 0
    return path


@pytest.fixture(scope="module")
def integrated(city_grid, tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("integrated") / "city.geojson"
    assert run(["boundary", "--grid", str(city_grid), *CITY, *FIT, "--out", str(out)]) == 0
    return out


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.name + suffix)


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------


class TestPipelines:
    def test_synth_writes_a_grid(self, city_grid):
        grid = read_grid(city_grid)
        assert grid.total_mass > 0
        assert grid.spec.cell_size == 0.01

    def test_integrated_boundary_writes_every_stage(self, integrated):
        doc = json.loads(integrated.read_text())
        assert doc["type"] == "FeatureCollection"
        assert any(f["properties"]["is_principal"] for f in doc["features"])
        for suffix in (".profile.csv", ".fit.json", ".model.json", ".config.ini", ".manifest.json"):
            assert _sibling(integrated, suffix).is_file()

    def test_stage_by_stage_chain_matches_the_integrated_run(self, city_grid, integrated, tmp_path):
        grid = str(city_grid)
        profile = tmp_path / "p.csv"
        fit = tmp_path / "f.json"
        model = tmp_path / "m.json"
        out = tmp_path / "b.geojson"
        assert run(["profile", "--grid", grid, *CITY, "--out", str(profile)]) == 0
        assert run(["fit", "--profile", str(profile), *FIT, "--out", str(fit)]) == 0
        assert run(
            ["model", "--fit", str(fit), "--profile", str(profile), "--out", str(model)]
        ) == 0
        assert run(
            ["boundary", "--grid", grid, "--model", str(model), *CITY, "--out", str(out)]
        ) == 0
        assert fit.read_bytes() == _sibling(integrated, ".fit.json").read_bytes()
        assert model.read_bytes() == _sibling(integrated, ".model.json").read_bytes()
        assert out.read_bytes() == integrated.read_bytes()

    def test_circle_and_profile(self, city_grid, tmp_path):
        circle = tmp_path / "c.csv"
        assert run(["circle", "--grid", str(city_grid), "--f", "0.5", "--out", str(circle)]) == 0
        header, row = circle.read_text().splitlines()
        assert header.startswith("f,radius_km")
        assert row.startswith("0.5,")

        profile = tmp_path / "p.csv"
        assert run(
            ["profile", "--grid", str(city_grid), "--n-fractions", "12", "--out", str(profile)]
        ) == 0
        assert len(read_profile_csv(profile)) <= 12
        assert read_profile_csv(profile).total_mass == read_grid(city_grid).total_mass

    def test_thread_count_does_not_change_outputs(self, city_grid, tmp_path):
        one, many = tmp_path / "one.csv", tmp_path / "many.csv"
        base = ["profile", "--grid", str(city_grid), "--n-fractions", "40"]
        assert run([*base, "--threads", "1", "--out", str(one)]) == 0
        assert run([*base, "--threads", "8", "--out", str(many)]) == 0
        assert one.read_bytes() == many.read_bytes()

    def test_thread_count_does_not_change_the_boundary(self, city_grid, integrated, tmp_path):
        out = tmp_path / "b.geojson"
        code = run(
            ["boundary", "--grid", str(city_grid), *CITY, *FIT, "--threads", "8", "--out", str(out)]
        )
        assert code == 0
        assert out.read_bytes() == integrated.read_bytes()
        for suffix in (".profile.csv", ".fit.json", ".model.json"):
            assert _sibling(out, suffix).read_bytes() == _sibling(integrated, suffix).read_bytes()

    def test_fit_sweep_prints_an_rss_table(self, integrated, tmp_path, capsys):
        profile = _sibling(integrated, ".profile.csv")
        out = tmp_path / "f.json"
        code = run(["fit", "--profile", str(profile), "--sweep", "1", *FIT, "--out", str(out)])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "breakpoints\trss"
        assert [line.split("\t")[0] for line in lines[1:]] == ["0", "1"]

    def test_region(self, city_grid, tmp_path):
        out = tmp_path / "region.json"
        code = run(
            ["region", "--grid", str(city_grid), "--breakpoints", "1", "--restarts", "2",
             "--out", str(out)]
        )  # fmt: skip
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["fit"]["n_segments"] == 2
        assert len(doc["circles"]) == 1
        assert _sibling(out, ".profile.csv").is_file()

    def test_compare_a_boundary_with_itself(self, city_grid, integrated, tmp_path):
        out = tmp_path / "overlap.json"
        code = run(
            ["compare", "--a", str(integrated), "--b", str(integrated), "--grid", str(city_grid),
             "--out", str(out)]
        )  # fmt: skip
        assert code == 0
        assert json.loads(out.read_text())["jaccard"] == 1.0

    def test_rasterize_points(self, tmp_path):
        src = tmp_path / "points.csv"
        src.write_text("lat,lon,weight\n10.01,20.01,2\n10.25,20.35,3.5\n10.05,20.02,1\n")
        out = tmp_path / "grid.bin"
        assert run(["rasterize", "--input", str(src), "--cell-size", "0.1", "--out", str(out)]) == 0
        assert read_grid(out).total_mass == 6.5


# ---------------------------------------------------------------------------
# Configuration and manifests
# ---------------------------------------------------------------------------


class TestConfig:
    def test_config_replay_reproduces_the_output(self, city_grid, tmp_path):
        first = tmp_path / "first.csv"
        assert run(
            ["circle", "--grid", str(city_grid), "--f", "0.3", "--min-cell-mass", "100",
             "--seed", "4", "--out", str(first)]
        ) == 0  # fmt: skip
        ini = _sibling(first, ".config.ini")
        second = tmp_path / "second.csv"
        assert run(["circle", "--config", str(ini), "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        replayed = RunConfig.from_ini(_sibling(second, ".config.ini"))
        assert replayed.seed == 4
        assert replayed.params["min_cell_mass"] == 100.0

    def test_ini_layout(self, city_grid, tmp_path):
        out = tmp_path / "c.csv"
        assert run(["circle", "--grid", str(city_grid), "--f", "0.5", "--out", str(out)]) == 0
        parser = configparser.ConfigParser(interpolation=None)
        parser.read(_sibling(out, ".config.ini"))
        section = parser["vpbounds"]
        assert section["subcommand"] == "circle"
        assert json.loads(section["f"]) == 0.5
        assert json.loads(section["center"]) is None

    def test_config_for_another_subcommand(self, city_grid, tmp_path):
        out = tmp_path / "c.csv"
        assert run(["circle", "--grid", str(city_grid), "--f", "0.5", "--out", str(out)]) == 0
        code = run(["profile", "--config", str(_sibling(out, ".config.ini")), "--out", "x.csv"])
        assert code == 1

    def test_config_with_unknown_options(self, tmp_path):
        ini = tmp_path / "bad.ini"
        RunConfig(subcommand="circle", params={"colour": "red"}).to_ini(ini)
        assert run(["circle", "--config", str(ini)]) == 1

    def test_manifest_records_inputs_and_config(self, city_grid, tmp_path):
        out = tmp_path / "c.csv"
        assert run(["circle", "--grid", str(city_grid), "--f", "0.5", "--out", str(out)]) == 0
        manifest = json.loads(_sibling(out, ".manifest.json").read_text())
        assert manifest["subcommand"] == "circle"
        assert list(manifest["inputs"]) == [str(city_grid)]
        assert len(manifest["inputs"][str(city_grid)]) == 64
        assert manifest["outputs"] == [str(out)]
        assert manifest["config"]["params"]["f"] == 0.5
        assert "solve" in manifest["timings_s"]
        assert "numpy" in manifest["versions"]


# ---------------------------------------------------------------------------
# Exit status
# ---------------------------------------------------------------------------


class TestExitStatus:
    def test_missing_grid_file(self, tmp_path):
        assert run(["circle", "--grid", str(tmp_path / "absent.bin"), "--f", "0.5",
                    "--out", str(tmp_path / "c.csv")]) == 1  # fmt: skip

    def test_unknown_flag(self):
        assert run(["circle", "--no-such-flag"]) == 1

    def test_unknown_subcommand(self):
        assert run(["triangulate"]) == 1

    def test_missing_required_option(self, city_grid):
        assert run(["circle", "--grid", str(city_grid)]) == 1

    def test_center_without_distance(self, city_grid, tmp_path):
        code = run(["circle", "--grid", str(city_grid), "--f", "0.5", "--center", "12", "30",
                    "--out", str(tmp_path / "c.csv")])  # fmt: skip
        assert code == 1

    def test_fraction_out_of_range(self, city_grid, tmp_path):
        code = run(["circle", "--grid", str(city_grid), "--f", "1.5",
                    "--out", str(tmp_path / "c.csv")])  # fmt: skip
        assert code == 1

    def test_model_without_total_mass(self, integrated, tmp_path):
        fit = _sibling(integrated, ".fit.json")
        assert run(["model", "--fit", str(fit), "--out", str(tmp_path / "m.json")]) == 1

    def test_profile_without_its_sidecar_is_a_data_error(self, city_grid, integrated, tmp_path):
        profile = tmp_path / "p.csv"
        assert run(["profile", "--grid", str(city_grid), *CITY, "--out", str(profile)]) == 0
        _sibling(profile, ".meta.json").unlink()
        fit = _sibling(integrated, ".fit.json")
        out = tmp_path / "m.json"
        code = run(["model", "--fit", str(fit), "--profile", str(profile), "--out", str(out)])
        assert code == 2

    def test_corrupt_profile_sidecar_is_a_data_error(self, city_grid, tmp_path):
        profile = tmp_path / "p.csv"
        assert run(["profile", "--grid", str(city_grid), *CITY, "--out", str(profile)]) == 0
        _sibling(profile, ".meta.json").write_text("{not json")
        code = run(["fit", "--profile", str(profile), *FIT, "--out", str(tmp_path / "f.json")])
        assert code == 2

    @pytest.mark.parametrize(
        "flag,value",
        [
            ("--breakpoints", "-1"),
            ("--restarts", "0"),
            ("--sweep", "-2"),
            ("--mask-min-cells", "-5"),
        ],
    )
    def test_fit_options_out_of_range(self, integrated, tmp_path, flag, value):
        profile = _sibling(integrated, ".profile.csv")
        code = run(
            ["fit", "--profile", str(profile), flag, value, "--out", str(tmp_path / "f.json")]
        )
        assert code == 1

    def test_negative_box_side(self, city_grid, tmp_path):
        code = run(
            ["boundary", "--grid", str(city_grid), "--center", "12", "30", "--box-side-km", "-20",
             "--out", str(tmp_path / "b.geojson")]
        )  # fmt: skip
        assert code == 1

    def test_corrupt_grid_is_a_data_error(self, tmp_path):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"NOTAGRID" + b"\x00" * 64)
        code = run(["circle", "--grid", str(bad), "--f", "0.5", "--out", str(tmp_path / "c.csv")])
        assert code == 2

