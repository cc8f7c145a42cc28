"""Linear network coding over time-varying LEO inter-satellite networks."""
from .gf import GF
from .graph import MultiGraph, find_paths, max_flow, prune
from .plg import PLG, CyclicPLGError, build_plg, topo_order
from .code import NetworkCode, construct_multicast, verify_multicast
from .pipeline import build_code

__all__ = [
    "GF", "MultiGraph", "find_paths", "max_flow", "prune", "PLG", "CyclicPLGError",
    "build_plg", "topo_order", "NetworkCode", "construct_multicast", "verify_multicast", "build_code",
]
