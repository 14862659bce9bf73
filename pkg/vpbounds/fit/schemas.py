"""The continuous piecewise-linear fit of log r against log f."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RingFit:
    """Continuous piecewise-linear function on ``fit_range_logf``.

    The function is stored by its value at the left data edge, the slope of
    every segment and the interior breakpoints; everything else is derived
    from those, so a fit read back from JSON predicts identically.
    """

    breakpoints_logf: tuple[float, ...]
    slopes: tuple[float, ...]
    intercept: float
    rss: float
    fit_range_logf: tuple[float, float]
    n_points: int
    excluded_low_f: float | None = None
    excluded_count: int = 0
    seed: int | None = None

    def __post_init__(self) -> None:
        if len(self.slopes) != len(self.breakpoints_logf) + 1:
            raise ValueError("a fit with k breakpoints needs k + 1 slopes")
        b = np.asarray(self.breakpoints_logf, dtype=np.float64)
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        lo, hi = self.fit_range_logf
        if b.size and (b[0] <= lo or b[-1] >= hi):
            raise ValueError("breakpoints must lie strictly inside the fit range")

    @property
    def n_segments(self) -> int:
        return len(self.slopes)

    @property
    def n_breakpoints(self) -> int:
        return len(self.breakpoints_logf)

    def predict(self, logf) -> np.ndarray:
        """Fitted log r at ``logf`` (extrapolates along the end segments)."""
        x = np.asarray(logf, dtype=np.float64)
        y = self.intercept + self.slopes[0] * (x - self.fit_range_logf[0])
        for k, b in enumerate(self.breakpoints_logf):
            y = y + (self.slopes[k + 1] - self.slopes[k]) * np.maximum(0.0, x - b)
        return y

    def radius_at(self, logf: float) -> float:
        """Fitted radius in km at ``logf``."""
        return float(np.exp(self.predict(logf)))

    def segment_ranges(self) -> list[tuple[float, float]]:
        edges = (self.fit_range_logf[0], *self.breakpoints_logf, self.fit_range_logf[1])
        return list(zip(edges[:-1], edges[1:]))
