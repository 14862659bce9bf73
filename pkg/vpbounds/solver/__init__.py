from vpbounds.solver.io import read_profile_csv, write_circles_csv, write_profile_csv
from vpbounds.solver.schemas import SearchConstraint, VpCircle, VpProfile, mass_tolerance
from vpbounds.solver.search import default_fractions, nonzero_cell_table, vp_circle, vp_profile

__all__ = [
    "SearchConstraint",
    "VpCircle",
    "VpProfile",
    "default_fractions",
    "mass_tolerance",
    "nonzero_cell_table",
    "read_profile_csv",
    "vp_circle",
    "vp_profile",
    "write_circles_csv",
    "write_profile_csv",
]
