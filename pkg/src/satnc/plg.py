"""Paths line-graph: nodes are the source, the sinks and every edge copy of the
pruned graph; arcs follow only the transitions the chosen paths make."""
from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from .graph import MultiGraph, PathSet

Label = tuple


class PLGConsistencyError(ValueError):
    pass


class CyclicPLGError(RuntimeError):
    """The paths line-graph has a directed cycle; a convolutional code would be needed."""

    def __init__(self, cycle: list[Label]):
        self.cycle = cycle
        shown = " -> ".join(format_label(x) for x in cycle + cycle[:1])
        super().__init__(f"CNC required: paths line-graph is cyclic ({shown})")


def format_label(label: Label) -> str:
    if label[0] == "s":
        return "src"
    if label[0] == "t":
        return "sink"
    _, i, j, c = label
    return f"edge({i + 1},{j + 1},{c})"


def _sort_key(label: Label):
    return ({"s": 0, "e": 1, "t": 2}[label[0]],) + tuple(label[1:])


@dataclass
class PLG:
    labels: list[Label]
    arcs: list[tuple[int, int]]
    source: int
    sink_nodes: dict[int, int]
    paths: dict[int, list[list[int]]] = field(repr=False)
    succ: list[list[int]] = field(init=False, repr=False)
    pred: list[list[int]] = field(init=False, repr=False)

    def __post_init__(self):
        self.succ = [[] for _ in self.labels]
        self.pred = [[] for _ in self.labels]
        for u, v in self.arcs:
            self.succ[u].append(v)
            self.pred[v].append(u)
        self.index = {lab: k for k, lab in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def is_edge(self, k: int) -> bool:
        return self.labels[k][0] == "e"

    def edge_nodes(self) -> list[int]:
        return [k for k, lab in enumerate(self.labels) if lab[0] == "e"]

    def origin(self, k: int) -> tuple[int, int, int]:
        """The (i, j, copy) edge copy behind a PLG node."""
        lab = self.labels[k]
        if lab[0] != "e":
            raise KeyError(f"{lab} is not an edge copy")
        return lab[1], lab[2], lab[3]

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["from", "to"])
            for u, v in self.arcs:
                w.writerow([self.display(u), self.display(v)])

    def display(self, k: int) -> str:
        lab = self.labels[k]
        if lab[0] == "t":
            return f"sink({lab[1] + 1})"
        return format_label(lab)


def build_plg(pruned: MultiGraph, s: int, sinks: Sequence[int], p: PathSet) -> PLG:
    labels: list[Label] = [("s",)]
    for i, j, m in pruned.edges():
        labels.extend(("e", i, j, c) for c in range(m))
    labels.extend(("t", t) for t in sinks)
    labels.sort(key=_sort_key)
    index = {lab: k for k, lab in enumerate(labels)}

    arcs: set[tuple[int, int]] = set()
    src = index[("s",)]
    sink_nodes = {t: index[("t", t)] for t in sinks}
    for k, lab in enumerate(labels):
        if lab[0] != "e":
            continue
        if lab[1] == s:
            arcs.add((src, k))
        if lab[2] in sink_nodes:
            arcs.add((k, sink_nodes[lab[2]]))

    paths: dict[int, list[list[int]]] = {}
    for t, sink_paths in p.paths.items():
        if t not in sink_nodes:
            raise PLGConsistencyError(f"paths given for node {t + 1}, which is not a listed sink")
        paths[t] = []
        for path in sink_paths:
            ids = []
            for hop in path:
                key = ("e",) + tuple(hop)
                if key not in index:
                    raise PLGConsistencyError(f"path hop {format_label(key)} is not in the pruned graph")
                ids.append(index[key])
            if ids and (labels[ids[0]][1] != s or labels[ids[-1]][2] != t):
                raise PLGConsistencyError(f"path for sink {t + 1} does not run from the source to the sink")
            arcs.update(zip(ids, ids[1:]))
            paths[t].append(ids)
    return PLG(labels, sorted(arcs), src, sink_nodes, paths)


def find_cycle(succ: Sequence[Sequence[int]]) -> list[int] | None:
    """A directed cycle (as a node list) or None, via iterative DFS."""
    n = len(succ)
    color = [0] * n
    parent = [-1] * n
    for root in range(n):
        if color[root]:
            continue
        stack = [(root, iter(sorted(succ[root])))]
        color[root] = 1
        while stack:
            u, it = stack[-1]
            v = next(it, None)
            if v is None:
                color[u] = 2
                stack.pop()
                continue
            if color[v] == 1:
                cyc = [u]
                while cyc[-1] != v:
                    cyc.append(parent[cyc[-1]])
                return cyc[::-1]
            if color[v] == 0:
                color[v] = 1
                parent[v] = u
                stack.append((v, iter(sorted(succ[v]))))
    return None


def is_generalized_acyclic(plg: PLG) -> bool:
    return find_cycle(plg.succ) is None


def topo_order(plg: PLG) -> list[int]:
    """Upstream-to-downstream order of PLG node ids; ties go to the smallest id."""
    order = _kahn(len(plg), plg.succ, plg.pred)
    if order is None:
        cyc = find_cycle(plg.succ)
        raise CyclicPLGError([plg.labels[k] for k in cyc])
    return order


def _kahn(n: int, succ, pred) -> list[int] | None:
    indeg = [len(p) for p in pred]
    heap = [k for k in range(n) if indeg[k] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    return order if len(order) == n else None


def is_valid_order(arcs: Iterable[tuple[Hashable, Hashable]], order: Sequence[Hashable], nodes=None) -> bool:
    """True iff order lists every node once and every arc points forward."""
    pos = {}
    for k, x in enumerate(order):
        if x in pos:
            return False
        pos[x] = k
    arcs = list(arcs)
    wanted = set(nodes) if nodes is not None else {x for a in arcs for x in a}
    if not wanted <= pos.keys() or (nodes is not None and len(pos) != len(wanted)):
        return False
    return all(pos[u] < pos[v] for u, v in arcs)


def plg_walks(plg: PLG) -> dict[int, list[list[int]]]:
    """Each path as a PLG walk from the source marker to its sink marker."""
    return {
        t: [[plg.source] + ids + [plg.sink_nodes[t]] for ids in ps]
        for t, ps in plg.paths.items()
    }
