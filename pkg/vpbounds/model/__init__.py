from vpbounds.model.report import model_report, read_model_json, write_model_json
from vpbounds.model.rings import (
    Ring,
    RingModel,
    cumulative_fraction,
    default_threshold_ring,
    model_density,
    model_from_fit,
    ring_model_from_rings,
    threshold_density,
)

__all__ = [
    "Ring",
    "RingModel",
    "cumulative_fraction",
    "default_threshold_ring",
    "model_density",
    "model_from_fit",
    "model_report",
    "read_model_json",
    "ring_model_from_rings",
    "threshold_density",
    "write_model_json",
]
