"""Breakpoint search for continuous piecewise-linear least squares.

For fixed breakpoints b_1 < ... < b_k the best continuous fit is linear
least squares in the hinge basis ``1, x - x0, max(0, x - b_k)``. The
breakpoints themselves are found by a seeded differential-evolution run per
restart, polished with Nelder-Mead; the best restart under the total order
(rss, breakpoints) wins.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Sequence

import numpy as np
from scipy.optimize import differential_evolution, minimize

from vpbounds.core.config import resolve_threads, settings
from vpbounds.core.errors import AllMaskedError, NegativeSlopeError, TooFewPointsError
from vpbounds.fit.schemas import RingFit
from vpbounds.solver.schemas import VpProfile

logger = logging.getLogger(__name__)

MIN_POINTS_PER_SEGMENT = 3
SLOPE_TOL = -1e-9

_DE_OPTIONS = dict(maxiter=200, popsize=15, tol=1e-10, mutation=(0.5, 1.0), recombination=0.7)
_NM_OPTIONS = dict(xatol=1e-13, fatol=1e-22, maxiter=4000, maxfev=8000)


# ---------------------------------------------------------------------------
# Inner problem
# ---------------------------------------------------------------------------


def _design(x: np.ndarray, breakpoints: np.ndarray) -> np.ndarray:
    cols = [np.ones_like(x), x - x[0]]
    cols.extend(np.maximum(0.0, x - b) for b in breakpoints)
    return np.column_stack(cols)


def _segment_counts(x: np.ndarray, breakpoints: np.ndarray) -> np.ndarray:
    edges = np.searchsorted(x, breakpoints, side="right")
    return np.diff(np.concatenate(([0], edges, [x.size])))


def _solve_hinge(x: np.ndarray, y: np.ndarray, breakpoints: np.ndarray):
    beta, *_ = np.linalg.lstsq(_design(x, breakpoints), y, rcond=None)
    slopes = np.cumsum(beta[1:])
    return float(beta[0]), slopes


class _Objective:
    """RSS as a function of an (unsorted) breakpoint vector, with a penalty
    for positions that leave a segment with too few points."""

    def __init__(self, x: np.ndarray, y: np.ndarray) -> None:
        self.x = x
        self.y = y
        self.penalty = 1e3 * (float(np.sum((y - y.mean()) ** 2)) + 1.0)

    def feasible(self, b: np.ndarray) -> bool:
        b = np.sort(b)
        return bool(
            np.all(b > self.x[0])
            and np.all(b < self.x[-1])
            and np.all(_segment_counts(self.x, b) >= MIN_POINTS_PER_SEGMENT)
        )

    def rss(self, b: np.ndarray) -> float:
        b = np.sort(np.asarray(b, dtype=np.float64))
        intercept, slopes = _solve_hinge(self.x, self.y, b)
        fit = _evaluate(self.x, intercept, slopes, b)
        return float(np.sum((fit - self.y) ** 2))

    def __call__(self, b: np.ndarray) -> float:
        b = np.sort(np.asarray(b, dtype=np.float64))
        counts = _segment_counts(self.x, b)
        short = np.maximum(0, MIN_POINTS_PER_SEGMENT - counts).sum()
        outside = np.maximum(0.0, self.x[0] - b).sum() + np.maximum(0.0, b - self.x[-1]).sum()
        if short or np.any(b <= self.x[0]) or np.any(b >= self.x[-1]):
            return self.penalty * (1.0 + short + outside)
        return self.rss(b)


def _evaluate(x, intercept, slopes, breakpoints) -> np.ndarray:
    y = intercept + slopes[0] * (x - x[0])
    for k, b in enumerate(breakpoints):
        y = y + (slopes[k + 1] - slopes[k]) * np.maximum(0.0, x - b)
    return y


# ---------------------------------------------------------------------------
# Outer problem
# ---------------------------------------------------------------------------


def _best_insertion(obj: _Objective, base: np.ndarray) -> np.ndarray | None:
    """Feasible breakpoint set ``base ∪ {t}`` with the lowest RSS, if any.

    Adding a hinge can only lower the RSS, so seeding a k+1 search with
    this point keeps fits with more breakpoints at least as good.
    """
    x = obj.x
    mids = np.unique(0.5 * (x[1:] + x[:-1]))
    best, best_rss = None, math.inf
    for t in mids:
        if np.any(base == t):
            continue
        cand = np.sort(np.append(base, t))
        if not obj.feasible(cand):
            continue
        r = obj.rss(cand)
        if r < best_rss:
            best, best_rss = cand, r
    return best


def _polish(obj: _Objective, b0: np.ndarray) -> tuple[np.ndarray, float]:
    b, f = np.sort(b0), obj(b0)
    for _ in range(2):
        res = minimize(obj, b, method="Nelder-Mead", options=_NM_OPTIONS)
        cand = np.sort(res.x)
        fc = obj(cand)
        if fc < f:
            b, f = cand, fc
    return b, f


def _restart(
    obj: _Objective,
    k: int,
    seed: np.random.SeedSequence,
    x0: np.ndarray | None,
) -> tuple[float, tuple[float, ...]]:
    bounds = [(float(obj.x[0]), float(obj.x[-1]))] * k
    res = differential_evolution(
        obj,
        bounds,
        seed=np.random.default_rng(seed),
        polish=False,
        init="latinhypercube",
        x0=x0,
        **_DE_OPTIONS,
    )
    b, f = _polish(obj, np.asarray(res.x))
    return f, tuple(float(v) for v in b)


def _prepare(logf: np.ndarray, logr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(logf, dtype=np.float64)
    y = np.asarray(logr, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("log f and log r must be 1-D arrays of equal length")
    order = np.lexsort((y, x))
    return x[order], y[order]


def fit_points(
    logf: Sequence[float] | np.ndarray,
    logr: Sequence[float] | np.ndarray,
    n_breakpoints: int,
    *,
    seed: int | None = None,
    restarts: int | None = None,
    threads: int | None = None,
    init: Sequence[float] | None = None,
) -> RingFit:
    """Fit a continuous piecewise-linear function to ``(logf, logr)`` points.

    Input order does not matter; points are sorted internally.

    Args:
        logf: natural log of the fractions.
        logr: natural log of the radii.
        n_breakpoints: number of interior breakpoints (>= 0).
        seed: root seed of the restarts (default ``settings.seed``).
        restarts: number of independent global searches (default
            ``settings.fit_restarts``).
        threads: worker cap; the result does not depend on it.
        init: a feasible breakpoint set every restart starts from.

    Raises:
        TooFewPointsError: fewer than three points per segment are possible.
        NegativeSlopeError: a fitted slope is negative beyond tolerance.
    """
    if n_breakpoints < 0:
        raise ValueError("n_breakpoints must be >= 0")
    seed = settings.seed if seed is None else seed
    restarts = settings.fit_restarts if restarts is None else max(1, restarts)
    x, y = _prepare(logf, logr)
    k = n_breakpoints
    if x.size < MIN_POINTS_PER_SEGMENT * (k + 1):
        raise TooFewPointsError(int(x.size), k)

    obj = _Objective(x, y)
    if k == 0:
        best_b: tuple[float, ...] = ()
        best_rss = obj.rss(np.empty(0))
    else:
        x0 = None
        if init is not None and obj.feasible(np.asarray(init, dtype=np.float64)):
            x0 = np.sort(np.asarray(init, dtype=np.float64))
        children = np.random.SeedSequence(seed).spawn(restarts)
        with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
            results = list(pool.map(lambda s: _restart(obj, k, s, x0), children))
        if x0 is not None:
            results.append((obj(x0), tuple(float(v) for v in x0)))
        for i, (f, b) in enumerate(results):
            logger.debug("fit k=%d restart %d: rss=%.6g breakpoints=%s", k, i, f, b)
        best_rss, best_b = min(results)
        if best_rss >= obj.penalty:
            raise TooFewPointsError(int(x.size), k)

    b_arr = np.asarray(best_b, dtype=np.float64)
    intercept, slopes = _solve_hinge(x, y, b_arr)
    for j, s in enumerate(slopes):
        if s < SLOPE_TOL:
            raise NegativeSlopeError(j, float(s))
    fit = RingFit(
        breakpoints_logf=tuple(float(v) for v in b_arr),
        slopes=tuple(float(s) for s in slopes),
        intercept=intercept,
        rss=0.0,
        fit_range_logf=(float(x[0]), float(x[-1])),
        n_points=int(x.size),
        seed=seed,
    )
    rss = float(np.sum((fit.predict(x) - y) ** 2))
    logger.info("fit k=%d: rss=%.6g breakpoints(log f)=%s", k, rss, fit.breakpoints_logf)
    return replace(fit, rss=rss)


def _profile_points(profile: VpProfile, mask_low_f: float | None):
    fs = profile.fractions()
    rs = profile.radii()
    keep = rs > 0
    if mask_low_f is not None:
        keep &= fs >= mask_low_f
    dropped = fs[~keep]
    excluded = float(dropped.max()) if dropped.size else None
    if profile.masked_below is not None:
        excluded = profile.masked_below if excluded is None else max(excluded, profile.masked_below)
    return np.log(fs[keep]), np.log(rs[keep]), excluded, int(dropped.size) + profile.masked_count


def fit_piecewise(
    profile: VpProfile,
    n_breakpoints: int,
    mask_low_f: float | None = None,
    **kwargs,
) -> RingFit:
    """Fit log r against log f for a profile.

    Zero-radius entries (single-cell circles) and entries below
    ``mask_low_f`` are excluded; the excluded prefix is recorded on the fit.
    Keyword arguments are forwarded to :func:`fit_points`.
    """
    x, y, excluded, n_excluded = _profile_points(profile, mask_low_f)
    fit = fit_points(x, y, n_breakpoints, **kwargs)
    return replace(fit, excluded_low_f=excluded, excluded_count=n_excluded)


def rss_sweep(
    profile: VpProfile,
    max_breakpoints: int = 6,
    mask_low_f: float | None = None,
    **kwargs,
) -> list[RingFit]:
    """Fits for k = 0..max_breakpoints, each seeded with the previous optimum.

    Stops early when the data cannot support more segments. The caller picks
    k; nothing here selects a model.
    """
    x, y, excluded, n_excluded = _profile_points(profile, mask_low_f)
    fits: list[RingFit] = []
    prev: tuple[float, ...] | None = None
    for k in range(max_breakpoints + 1):
        if x.size < MIN_POINTS_PER_SEGMENT * (k + 1):
            break
        init = None
        if prev is not None:
            xs, ys = _prepare(x, y)
            init = _best_insertion(_Objective(xs, ys), np.asarray(prev))
            if init is None:
                break
        try:
            fit = fit_points(x, y, k, init=init, **kwargs)
        except TooFewPointsError:
            break
        if fits and fit.rss > fits[-1].rss:
            logger.warning("rss rose from k=%d to k=%d", k - 1, k)
        fits.append(replace(fit, excluded_low_f=excluded, excluded_count=n_excluded))
        prev = fit.breakpoints_logf
    return fits


# ---------------------------------------------------------------------------
# Profile helpers
# ---------------------------------------------------------------------------


def mask_artifacts(profile: VpProfile, min_cells: int | None = None) -> VpProfile:
    """Drop the leading entries whose circles hold fewer than ``min_cells`` cells.

    Raises:
        AllMaskedError: every entry falls below ``min_cells``.
    """
    min_cells = settings.mask_min_cells if min_cells is None else min_cells
    if min_cells < 1:
        raise ValueError("min_cells must be >= 1")
    cut = 0
    for e in profile.entries:
        if e.cells_included >= min_cells:
            break
        cut += 1
    if cut == len(profile.entries):
        raise AllMaskedError(min_cells)
    if cut == 0:
        return profile
    logger.info("masked %d low-f entries below %d cells", cut, min_cells)
    return VpProfile(
        entries=profile.entries[cut:],
        total_mass=profile.total_mass,
        masked_below=profile.entries[cut - 1].target_fraction,
        masked_count=profile.masked_count + cut,
    )


def breakpoints_as_fractions(
    fit: RingFit, profile: VpProfile | None = None
) -> list[tuple[float, float]]:
    """``(f, r_km)`` at every interior breakpoint of the fit.

    The fit alone determines the result. ``profile``, when given, should be
    the one the fit came from; a fit range outside its fractions is logged.
    """
    if profile is not None and len(profile):
        logf = np.log(profile.fractions())
        lo, hi = fit.fit_range_logf
        if lo < logf[0] - 1e-12 or hi > logf[-1] + 1e-12:
            logger.warning(
                "fit range [%.4f, %.4f] lies outside the profile's log f range [%.4f, %.4f]",
                lo,
                hi,
                logf[0],
                logf[-1],
            )
    return [(math.exp(b), fit.radius_at(b)) for b in fit.breakpoints_logf]
