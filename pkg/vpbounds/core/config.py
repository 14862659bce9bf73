from __future__ import annotations

import os
from dataclasses import dataclass

# IUGG mean Earth radius; every km figure in the package derives from it.
EARTH_RADIUS_KM = 6371.0088


@dataclass(frozen=True)
class Settings:
    threads: int = int(os.getenv("VPBOUNDS_THREADS", "1"))
    cell_size_deg: float = float(os.getenv("VPBOUNDS_CELL_SIZE", "0.01"))
    n_fractions: int = int(os.getenv("VPBOUNDS_N_FRACTIONS", "256"))
    fit_restarts: int = int(os.getenv("VPBOUNDS_FIT_RESTARTS", "16"))
    mask_min_cells: int = int(os.getenv("VPBOUNDS_MASK_MIN_CELLS", "20"))
    seed: int = int(os.getenv("VPBOUNDS_SEED", "0"))
    # Fixed chunk size for the candidate search; worker count must not
    # influence the reduction order.
    candidate_block: int = int(os.getenv("VPBOUNDS_CANDIDATE_BLOCK", "256"))
    log_level: str = os.getenv("VPBOUNDS_LOG_LEVEL", "INFO")


settings = Settings()


def resolve_threads(threads: int | None) -> int:
    """Return an explicit worker count, falling back to ``settings.threads``."""
    n = settings.threads if threads is None else threads
    return max(1, int(n))
