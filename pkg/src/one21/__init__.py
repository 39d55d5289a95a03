"""Approximate capacity and relay placement for full-duplex 1-2-1 networks."""

from .capacity import approx_capacity_cutset, approx_capacity_p1
from .model import Mode, PropagationParams, Topology, gain_matrix, link_capacity

__all__ = [
    "Mode",
    "PropagationParams",
    "Topology",
    "approx_capacity_cutset",
    "approx_capacity_p1",
    "gain_matrix",
    "link_capacity",
]
__version__ = "0.1.0"
