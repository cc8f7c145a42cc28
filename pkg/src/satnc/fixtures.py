"""Small reference networks, written with 1-based node labels and converted to
0-based multigraphs."""
from __future__ import annotations

from .graph import MultiGraph

BUTTERFLY_EDGES = [(1, 2), (1, 3), (2, 4), (3, 4), (4, 5), (5, 6), (5, 7), (2, 6), (3, 7)]

# Greedy shortest-path trap: 1-2-3-10 is the unique shortest path and uses the
# first hop of one disjoint route and the last hop of the other.
TRAP_EDGES = [
    (1, 2), (2, 3), (3, 10),
    (2, 4), (4, 5), (5, 9), (9, 10),
    (1, 6), (6, 7), (7, 8), (8, 3),
]

# Max-flow 2 to both sinks {6, 7} needs both 4->6 and 6->4; the path set is unique.
GENERALIZED_ACYCLIC_EDGES = [
    (1, 2), (1, 3), (2, 6), (3, 4), (4, 6), (6, 4), (4, 8), (8, 7), (3, 5), (5, 7),
]

# Parent relation consistent with the upstream-to-downstream order example:
# 1..7 valid in three orders, and 5 is a parent of 7.
ORDER_EXAMPLE_ARCS = [(1, 2), (1, 3), (2, 4), (4, 5), (3, 6), (3, 7), (5, 7)]

# Butterfly with numbered edges for the two-snapshot example.
NUMBERED_BUTTERFLY = {
    1: (1, 2), 2: (1, 3), 3: (2, 4), 4: (3, 4), 5: (2, 6),
    6: (3, 7), 7: (4, 5), 8: (5, 6), 9: (5, 7),
}


def graph(edges, n: int | None = None) -> MultiGraph:
    return MultiGraph.from_edges(edges, n=n, base=1)


def butterfly() -> MultiGraph:
    return graph(BUTTERFLY_EDGES)


def trap() -> MultiGraph:
    return graph(TRAP_EDGES)


def generalized_acyclic() -> MultiGraph:
    return graph(GENERALIZED_ACYCLIC_EDGES)


def time_varying_butterfly() -> list[MultiGraph]:
    """t=1 lacks edges #4 and #5; t=2 is the full butterfly."""
    t1 = [e for k, e in NUMBERED_BUTTERFLY.items() if k not in (4, 5)]
    t2 = list(NUMBERED_BUTTERFLY.values())
    return [graph(t1, n=7), graph(t2, n=7)]


def edge_numbers(path_nodes_1based: list[int]) -> list[int]:
    """Translate a 1-based node path of the numbered butterfly into edge numbers."""
    lookup = {e: k for k, e in NUMBERED_BUTTERFLY.items()}
    return [lookup[(a, b)] for a, b in zip(path_nodes_1based, path_nodes_1based[1:])]


# Random 8-node instance, sinks {8, 7}: the default path search yields paths
# that traverse the 2-4-5-3 loop in both directions, so the PLG has a cycle.
CYCLIC_EDGES = [
    (1, 3), (1, 4), (1, 6), (2, 3), (2, 4), (2, 8), (3, 5), (3, 7), (4, 2), (4, 6), (4, 8),
    (5, 4), (5, 6), (5, 7), (6, 1), (6, 2), (6, 3), (6, 4), (6, 7), (6, 8), (7, 4), (8, 1),
]
CYCLIC_SINKS = (8, 7)


def cyclic() -> MultiGraph:
    return graph(CYCLIC_EDGES, n=8)
