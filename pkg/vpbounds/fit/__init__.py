from vpbounds.fit.piecewise import (
    breakpoints_as_fractions,
    fit_piecewise,
    fit_points,
    mask_artifacts,
    rss_sweep,
)
from vpbounds.fit.report import fit_report, read_fit_json, write_fit_json
from vpbounds.fit.schemas import RingFit

__all__ = [
    "RingFit",
    "breakpoints_as_fractions",
    "fit_piecewise",
    "fit_points",
    "fit_report",
    "mask_artifacts",
    "read_fit_json",
    "rss_sweep",
    "write_fit_json",
]
