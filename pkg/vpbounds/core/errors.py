"""Named errors raised across the vpbounds pipeline.

``UsageError`` covers bad invocations (CLI exit status 1); ``DataError``
covers inputs that parse but cannot be processed (exit status 2).
"""

from __future__ import annotations


class VpBoundsError(Exception):
    """Base class for every error raised by vpbounds."""


class UsageError(VpBoundsError):
    """Raised for invalid flags, missing files and bad parameter values."""


class DataError(VpBoundsError):
    """Raised when the input data cannot support the requested operation."""


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------


class GeometryError(DataError):
    """A feature's geometry is malformed or of an unsupported type."""

    def __init__(self, feature_index: int, reason: str) -> None:
        super().__init__(f"feature {feature_index}: {reason}")
        self.feature_index = feature_index
        self.reason = reason


class DegeneratePolygonError(GeometryError):
    """A polygon has zero planar area."""

    def __init__(self, feature_index: int) -> None:
        super().__init__(feature_index, "degenerate polygon (zero area)")


class FieldError(DataError):
    """The value field is missing or non-numeric on a feature or row."""

    def __init__(self, feature_index: int, field: str, reason: str) -> None:
        super().__init__(f"feature {feature_index}: field {field!r} {reason}")
        self.feature_index = feature_index
        self.field = field
        self.reason = reason


class GridFormatError(DataError):
    """A serialized grid is truncated or carries the wrong magic."""


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


class NoCandidateError(DataError):
    """No cell center passes the search constraint."""


class UnreachableMassError(DataError):
    """The requested mass fraction exceeds what any circle can contain."""

    def __init__(self, f: float, target: float, reachable: float) -> None:
        super().__init__(
            f"fraction {f!r} needs mass {target!r} but only {reachable!r} is reachable"
        )
        self.f = f
        self.target = target
        self.reachable = reachable


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


class TooFewPointsError(DataError):
    """A segment of the fit would cover fewer than three profile points."""

    def __init__(self, n_points: int, n_breakpoints: int) -> None:
        super().__init__(
            f"{n_points} profile points cannot support {n_breakpoints} breakpoints "
            "with at least 3 points per segment; try fewer breakpoints"
        )
        self.n_points = n_points
        self.n_breakpoints = n_breakpoints


class NegativeSlopeError(DataError):
    """A fitted log-log segment decreases (radius profiles never do)."""

    def __init__(self, segment: int, slope: float) -> None:
        super().__init__(f"segment {segment} has negative slope {slope!r}")
        self.segment = segment
        self.slope = slope


class AllMaskedError(DataError):
    """Artifact masking removed every profile entry."""

    def __init__(self, min_cells: int) -> None:
        super().__init__(f"every profile entry includes fewer than {min_cells} cells")
        self.min_cells = min_cells


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------


class NonPositiveSlopeError(DataError):
    """A segment slope cannot be inverted into a positive ring exponent."""

    def __init__(self, segment: int, slope: float) -> None:
        super().__init__(
            f"segment {segment} slope {slope!r} is not positive; "
            "the ring density would not integrate"
        )
        self.segment = segment
        self.slope = slope


class ModelInvariantError(DataError):
    """A constructed ring model broke continuity or mass closure."""

    def __init__(self, what: str, rel_error: float) -> None:
        super().__init__(f"ring model {what} violated (relative error {rel_error:.3e})")
        self.what = what
        self.rel_error = rel_error


class DensityDomainError(DataError):
    """A model density was requested outside (0, outer_radius]."""

    def __init__(self, r_km: float, outer_km: float) -> None:
        super().__init__(f"radius {r_km!r} km outside (0, {outer_km!r}]")
        self.r_km = r_km
        self.outer_km = outer_km


class RingIndexError(DataError):
    """A ring index does not name a usable ring."""

    def __init__(self, index: int, n_rings: int) -> None:
        super().__init__(f"ring index {index} invalid for a model with {n_rings} rings")
        self.index = index
        self.n_rings = n_rings


# ---------------------------------------------------------------------------
# boundary
# ---------------------------------------------------------------------------


class EmptyBoxError(DataError):
    """The bounding box around the city holds no mass."""


class BoxTooSmallError(DataError):
    """The last breakpoint lies outside the bounding box."""

    def __init__(self, r_break_km: float, half_side_km: float) -> None:
        super().__init__(
            f"last breakpoint radius {r_break_km:.3f} km exceeds the box half-side "
            f"{half_side_km:.3f} km; use a larger box"
        )
        self.r_break_km = r_break_km
        self.half_side_km = half_side_km


class EmptyBoundaryError(DataError):
    """A boundary set used for comparison covers no cells."""


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


class OuterRingError(DataError):
    """The generated city does not fit inside its grid."""

    def __init__(self, outer_km: float, reach_km: float) -> None:
        super().__init__(
            f"outer ring radius {outer_km:.3f} km exceeds the grid reach {reach_km:.3f} km"
        )
        self.outer_km = outer_km
        self.reach_km = reach_km


class OracleGuardError(DataError):
    """The brute-force oracle refuses grids that would take too long."""

    def __init__(self, n_cells: int, limit: int) -> None:
        super().__init__(f"{n_cells} nonzero cells exceed the oracle limit of {limit}")
        self.n_cells = n_cells
        self.limit = limit
