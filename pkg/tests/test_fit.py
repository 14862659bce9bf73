"""Tests for the piecewise log-log fit, artifact masking and fit reports."""

from __future__ import annotations

import json
import logging
import math

import numpy as np
import pytest

from vpbounds.core.errors import (
    AllMaskedError,
    DataError,
    NegativeSlopeError,
    TooFewPointsError,
    UsageError,
)
from vpbounds.fit import (
    RingFit,
    breakpoints_as_fractions,
    fit_piecewise,
    fit_points,
    fit_report,
    mask_artifacts,
    read_fit_json,
    rss_sweep,
    write_fit_json,
)
from vpbounds.solver.schemas import VpCircle, VpProfile

TRUE_BREAK = -2.0
SLOPES = (0.5, 1.0)


def _hinge(x: np.ndarray, intercept: float = 1.0) -> np.ndarray:
    return intercept + SLOPES[0] * (x - x[0]) + (SLOPES[1] - SLOPES[0]) * np.maximum(
        0.0, x - TRUE_BREAK
    )


def _points(n: int = 60) -> tuple[np.ndarray, np.ndarray]:
    x = np.linspace(-5.0, 0.0, n)
    return x, _hinge(x)


def _profile(fractions, radii, cells=None, total_mass: float = 100.0) -> VpProfile:
    cells = cells if cells is not None else [50] * len(fractions)
    entries = tuple(
        VpCircle(
            center=(0.0, 0.0),
            radius_km=float(r),
            target_fraction=float(f),
            achieved_fraction=float(f),
            cells_included=int(n),
        )
        for f, r, n in zip(fractions, radii, cells)
    )
    return VpProfile(entries=entries, total_mass=total_mass)


# ---------------------------------------------------------------------------
# fit_points
# ---------------------------------------------------------------------------


class TestFitPoints:
    def test_recovers_an_exact_hinge(self):
        x, y = _points()
        fit = fit_points(x, y, 1, seed=3, restarts=2)
        assert fit.breakpoints_logf[0] == pytest.approx(TRUE_BREAK, abs=1e-4)
        assert fit.slopes == pytest.approx(SLOPES, abs=1e-4)
        assert fit.rss < 1e-8
        assert fit.n_points == 60
        assert fit.fit_range_logf == (-5.0, 0.0)

    def test_zero_breakpoints_is_ordinary_least_squares(self):
        x = np.linspace(-3.0, 0.0, 10)
        y = 0.25 * x + 2.0
        fit = fit_points(x, y, 0)
        assert fit.breakpoints_logf == ()
        assert fit.slopes[0] == pytest.approx(0.25, abs=1e-12)
        assert fit.predict(0.0) == pytest.approx(2.0, abs=1e-12)

    def test_point_order_does_not_matter(self):
        x, y = _points(40)
        perm = np.random.default_rng(0).permutation(x.size)
        a = fit_points(x, y, 1, seed=1, restarts=2)
        b = fit_points(x[perm], y[perm], 1, seed=1, restarts=2)
        assert a == b

    def test_same_seed_same_fit(self):
        x, y = _points(40)
        y = y + np.random.default_rng(8).normal(0.0, 0.02, size=x.size)
        assert fit_points(x, y, 2, seed=5, restarts=3) == fit_points(x, y, 2, seed=5, restarts=3)

    def test_thread_count_does_not_change_the_fit(self):
        x, y = _points(40)
        y = y + np.random.default_rng(9).normal(0.0, 0.02, size=x.size)
        one = fit_points(x, y, 2, seed=5, restarts=4, threads=1)
        many = fit_points(x, y, 2, seed=5, restarts=4, threads=4)
        assert one == many

    def test_segments_keep_three_points(self):
        x, y = _points(30)
        fit = fit_points(x, y, 2, seed=0, restarts=2)
        edges = np.searchsorted(np.sort(x), fit.breakpoints_logf, side="right")
        counts = np.diff(np.concatenate(([0], edges, [x.size])))
        assert counts.min() >= 3

    def test_too_few_points(self):
        x = np.linspace(-1.0, 0.0, 5)
        with pytest.raises(TooFewPointsError) as info:
            fit_points(x, x * 0.5, 1)
        assert info.value.n_points == 5
        assert info.value.n_breakpoints == 1

    def test_negative_slope(self):
        x = np.linspace(-2.0, 0.0, 10)
        with pytest.raises(NegativeSlopeError) as info:
            fit_points(x, -x, 0)
        assert info.value.segment == 0
        assert info.value.slope == pytest.approx(-1.0)

    def test_negative_breakpoint_count(self):
        x, y = _points(10)
        with pytest.raises(ValueError):
            fit_points(x, y, -1)

    def test_errors_are_data_errors(self):
        assert issubclass(TooFewPointsError, DataError)
        assert issubclass(NegativeSlopeError, DataError)

    @pytest.mark.slow
    def test_noisy_hinge_recovery(self):
        x, clean = _points(80)
        hits = 0
        for seed in range(20):
            y = clean + np.random.default_rng(seed).normal(0.0, 0.01, size=x.size)
            fit = fit_points(x, y, 1, seed=seed, restarts=4)
            hits += abs(fit.breakpoints_logf[0] - TRUE_BREAK) < 0.2
        assert hits >= 18


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


class TestFitPiecewise:
    def test_zero_radius_entries_are_excluded(self):
        fs = np.geomspace(0.01, 1.0, 30)
        rs = np.exp(_hinge(np.log(fs)))
        rs[:4] = 0.0
        fit = fit_piecewise(_profile(fs, rs), 1, seed=0, restarts=2)
        assert fit.n_points == 26
        assert fit.excluded_count == 4
        assert fit.excluded_low_f == pytest.approx(fs[3])

    def test_mask_low_f(self):
        fs = np.geomspace(0.01, 1.0, 30)
        rs = np.exp(_hinge(np.log(fs)))
        fit = fit_piecewise(_profile(fs, rs), 0, mask_low_f=0.1)
        assert fit.fit_range_logf[0] >= math.log(0.1)
        assert fit.excluded_count == int(np.sum(fs < 0.1))

    def test_masked_profile_prefix_is_carried_onto_the_fit(self):
        fs = np.geomspace(0.01, 1.0, 30)
        rs = np.exp(_hinge(np.log(fs)))
        cells = [5] * 6 + [40] * 24
        masked = mask_artifacts(_profile(fs, rs, cells), min_cells=20)
        fit = fit_piecewise(masked, 1, seed=0, restarts=2)
        assert fit.excluded_count == 6
        assert fit.excluded_low_f == pytest.approx(fs[5])


class TestRssSweep:
    def test_rss_never_increases_with_more_breakpoints(self):
        fs = np.geomspace(0.005, 1.0, 50)
        noise = np.random.default_rng(4).normal(0.0, 0.03, size=fs.size)
        rs = np.sort(np.exp(_hinge(np.log(fs)) + noise))
        fits = rss_sweep(_profile(fs, rs), max_breakpoints=3, seed=2, restarts=2)
        assert [f.n_breakpoints for f in fits] == [0, 1, 2, 3]
        rss = [f.rss for f in fits]
        assert all(b <= a + 1e-12 for a, b in zip(rss, rss[1:]))

    def test_stops_when_points_run_out(self):
        fs = np.geomspace(0.1, 1.0, 7)
        rs = np.exp(0.5 * np.log(fs))
        fits = rss_sweep(_profile(fs, rs), max_breakpoints=4, seed=0, restarts=1)
        assert [f.n_breakpoints for f in fits] == [0, 1]


class TestMaskArtifacts:
    def _profile(self, cells):
        fs = np.linspace(0.1, 1.0, len(cells))
        return _profile(fs, np.linspace(1.0, 5.0, len(cells)), cells)

    def test_drops_the_leading_sparse_entries(self):
        profile = self._profile([1, 2, 5, 30, 50])
        masked = mask_artifacts(profile, min_cells=20)
        assert len(masked) == 2
        assert masked.masked_count == 3
        assert masked.masked_below == profile.entries[2].target_fraction
        assert masked.total_mass == profile.total_mass

    def test_nothing_to_mask_returns_the_profile(self):
        profile = self._profile([30, 40, 50])
        assert mask_artifacts(profile, min_cells=20) is profile

    def test_only_the_leading_run_is_masked(self):
        masked = mask_artifacts(self._profile([1, 30, 5, 50]), min_cells=20)
        assert masked.cells().tolist() == [30, 5, 50]

    def test_everything_masked(self):
        with pytest.raises(AllMaskedError) as info:
            mask_artifacts(self._profile([1, 2, 3]), min_cells=20)
        assert info.value.min_cells == 20

    def test_min_cells_must_be_positive(self):
        with pytest.raises(ValueError):
            mask_artifacts(self._profile([1, 2, 3]), min_cells=0)


# ---------------------------------------------------------------------------
# RingFit and reports
# ---------------------------------------------------------------------------


class TestRingFit:
    def _fit(self) -> RingFit:
        return RingFit(
            breakpoints_logf=(-2.0,),
            slopes=(0.5, 1.0),
            intercept=1.0,
            rss=0.0,
            fit_range_logf=(-5.0, 0.0),
            n_points=60,
        )

    def test_predict_is_continuous_at_the_breakpoint(self):
        fit = self._fit()
        left, right = fit.predict([-2.0 - 1e-9, -2.0 + 1e-9])
        assert left == pytest.approx(right, abs=1e-8)
        assert fit.predict(-2.0) == pytest.approx(1.0 + 0.5 * 3.0)

    def test_breakpoints_as_fractions(self):
        fit = self._fit()
        [(f, r)] = breakpoints_as_fractions(fit)
        assert f == pytest.approx(math.exp(-2.0))
        assert r == pytest.approx(math.exp(2.5))

    def test_breakpoints_do_not_depend_on_the_profile(self, caplog):
        caplog.set_level(logging.WARNING, logger="vpbounds")
        fit = self._fit()
        x = np.linspace(-5.0, 0.0, 30)
        source = _profile(np.exp(x), np.exp(_hinge(x)))
        assert breakpoints_as_fractions(fit, source) == breakpoints_as_fractions(fit)
        assert not caplog.records

        short = _profile(np.exp(x[15:]), np.exp(_hinge(x)[15:]))
        assert breakpoints_as_fractions(fit, short) == breakpoints_as_fractions(fit)
        assert "outside the profile" in caplog.text

    def test_segment_ranges(self):
        assert self._fit().segment_ranges() == [(-5.0, -2.0), (-2.0, 0.0)]

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"slopes": (0.5,)},
            {"breakpoints_logf": (-1.0, -3.0), "slopes": (0.5, 1.0, 1.5)},
            {"breakpoints_logf": (-6.0,)},
        ],
    )
    def test_invalid_shapes(self, kwargs):
        base = dict(
            breakpoints_logf=(-2.0,),
            slopes=(0.5, 1.0),
            intercept=1.0,
            rss=0.0,
            fit_range_logf=(-5.0, 0.0),
            n_points=60,
        )
        with pytest.raises(ValueError):
            RingFit(**{**base, **kwargs})


class TestFitReport:
    def test_report_fields(self):
        x, y = _points(30)
        doc = fit_report(fit_points(x, y, 1, seed=0, restarts=2))
        assert doc["n_segments"] == 2
        assert len(doc["segments"]) == 2
        assert doc["breakpoints"][0]["f"] == pytest.approx(math.exp(doc["breakpoints"][0]["logf"]))
        assert doc["seed"] == 0
        assert set(doc["mask"]) == {"excluded_low_f", "excluded_count"}

    def test_written_fit_predicts_identically(self, tmp_path):
        x, y = _points(30)
        fit = fit_points(x, y, 1, seed=0, restarts=2)
        write_fit_json(tmp_path / "fit.json", fit)
        back = read_fit_json(tmp_path / "fit.json")
        assert back == fit
        np.testing.assert_array_equal(back.predict(x), fit.predict(x))

    def test_malformed_report(self, tmp_path):
        (tmp_path / "fit.json").write_text(json.dumps({"segments": []}))
        with pytest.raises(DataError):
            read_fit_json(tmp_path / "fit.json")

    def test_invalid_json(self, tmp_path):
        (tmp_path / "fit.json").write_text("{")
        with pytest.raises(DataError):
            read_fit_json(tmp_path / "fit.json")

    def test_missing_report(self, tmp_path):
        with pytest.raises(UsageError):
            read_fit_json(tmp_path / "absent.json")
