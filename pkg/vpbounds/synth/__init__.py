from vpbounds.synth.generate import (
    disc_mask,
    generate_disc_city,
    generate_ring_city,
    generate_two_disc_city,
    grid_reach_km,
    two_disc_spec,
)
from vpbounds.synth.oracle import (
    brute_force_clusters,
    brute_force_vp_circle,
    brute_force_vp_circle_by_mask,
)
from vpbounds.synth.schemas import Disc, DiscCitySpec, RingCitySpec

__all__ = [
    "Disc",
    "DiscCitySpec",
    "RingCitySpec",
    "brute_force_clusters",
    "brute_force_vp_circle",
    "brute_force_vp_circle_by_mask",
    "disc_mask",
    "generate_disc_city",
    "generate_ring_city",
    "generate_two_disc_city",
    "grid_reach_km",
    "two_disc_spec",
]
