"""Unit-capacity directed multigraphs: max-flow, edge-disjoint paths, pruning.

A multigraph is a dense integer matrix ``mult[i, j]`` counting parallel unit
edges i -> j. Opposite directions are independent bundles. A path is a tuple of
hops ``(i, j, copy)``; per sink, copies of an edge are numbered 0, 1, ... in the
order its paths use them.
"""
from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

Hop = tuple[int, int, int]
Path_ = tuple[Hop, ...]


@dataclass(frozen=True)
class MultiGraph:
    mult: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.mult, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("multiplicity matrix must be square")
        if (m < 0).any():
            raise ValueError("negative multiplicity")
        if np.diagonal(m).any():
            raise ValueError("self-loops are not allowed")
        m.setflags(write=False)
        object.__setattr__(self, "mult", m)

    @property
    def n(self) -> int:
        return self.mult.shape[0]

    @classmethod
    def empty(cls, n: int) -> "MultiGraph":
        return cls(np.zeros((n, n), dtype=np.int64))

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[int]], n: int | None = None, base: int = 0) -> "MultiGraph":
        """Build from (i, j) or (i, j, mult) tuples; labels start at ``base``."""
        edges = [tuple(e) for e in edges]
        if n is None:
            n = max((max(e[0], e[1]) for e in edges), default=base - 1) - base + 1
        m = np.zeros((n, n), dtype=np.int64)
        for e in edges:
            m[e[0] - base, e[1] - base] += e[2] if len(e) > 2 else 1
        return cls(m)

    def edges(self) -> list[tuple[int, int, int]]:
        ii, jj = np.nonzero(self.mult)
        return [(int(i), int(j), int(self.mult[i, j])) for i, j in zip(ii, jj)]

    def num_edge_copies(self) -> int:
        return int(self.mult.sum())

    def successors(self, u: int) -> list[int]:
        return np.nonzero(self.mult[u])[0].tolist()

    def is_acyclic(self) -> bool:
        indeg = (self.mult > 0).sum(axis=0)
        queue = deque(np.nonzero(indeg == 0)[0].tolist())
        seen = 0
        while queue:
            u = queue.popleft()
            seen += 1
            for v in self.successors(u):
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        return seen == self.n

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["i", "j", "mult"])
            for i, j, m in self.edges():
                w.writerow([i + 1, j + 1, m])

    @classmethod
    def from_csv(cls, path: str | Path, n: int | None = None) -> "MultiGraph":
        with Path(path).open(newline="") as fh:
            rows = [(int(r["i"]), int(r["j"]), int(r["mult"])) for r in csv.DictReader(fh)]
        return cls.from_edges(rows, n=n, base=1)


@dataclass(frozen=True)
class PathSet:
    source: int
    paths: dict[int, tuple[Path_, ...]]
    fallback: frozenset[int] = frozenset()
    unreachable: frozenset[int] = frozenset()

    @property
    def sinks(self) -> list[int]:
        return list(self.paths)

    @property
    def h_per_sink(self) -> dict[int, int]:
        return {t: len(p) for t, p in self.paths.items()}

    def trimmed(self, r: int) -> "PathSet":
        """Keep the first r paths of every sink that has at least r."""
        kept = {t: p[:r] for t, p in self.paths.items() if len(p) >= r}
        return PathSet(self.source, kept, self.fallback & kept.keys(), frozenset())


def path_nodes(path: Path_) -> list[int]:
    if not path:
        return []
    return [path[0][0]] + [h[1] for h in path]


def number_copies(node_paths: Iterable[Sequence[int]]) -> tuple[Path_, ...]:
    """Attach per-edge copy indices to node sequences belonging to one sink."""
    used: dict[tuple[int, int], int] = {}
    out = []
    for nodes in node_paths:
        hops = []
        for i, j in zip(nodes, nodes[1:]):
            c = used.get((i, j), 0)
            used[(i, j)] = c + 1
            hops.append((i, j, c))
        out.append(tuple(hops))
    return tuple(out)


def check_disjoint(g: MultiGraph, source: int, sink: int, paths: Sequence[Path_]) -> None:
    """Raise ValueError unless the paths are valid and pairwise edge-disjoint in g."""
    seen: set[Hop] = set()
    for p in paths:
        nodes = path_nodes(p)
        if not p or nodes[0] != source or nodes[-1] != sink:
            raise ValueError(f"path {nodes} does not run {source} -> {sink}")
        for a, b in zip(p, p[1:]):
            if a[1] != b[0]:
                raise ValueError(f"path {nodes} is not contiguous")
        for hop in p:
            i, j, c = hop
            if c >= g.mult[i, j]:
                raise ValueError(f"hop {hop} exceeds multiplicity {g.mult[i, j]}")
            if hop in seen:
                raise ValueError(f"edge copy {hop} used twice")
            seen.add(hop)


def max_flow(g: MultiGraph, s: int, t: int) -> int:
    return max_flow_matrix(g.mult, s, t)


def max_flow_matrix(mult: np.ndarray, s: int, t: int) -> int:
    """Max-flow value on a raw multiplicity matrix."""
    if s == t:
        raise ValueError("source equals sink")
    if not mult[s].any() or not mult[:, t].any():
        return 0
    cap = csr_matrix(np.asarray(mult, dtype=np.int32))
    return int(maximum_flow(cap, s, t, method="dinic").flow_value)


def _bfs_dist(adj: list[list[int]], mult: list[list[int]], start: int, reverse: bool = False) -> list[int]:
    n = len(adj)
    dist = [-1] * n
    dist[start] = 0
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            ok = mult[v][u] if reverse else mult[u][v]
            if ok > 0 and dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _shortest_lex_path(mult: list[list[int]], s: int, t: int) -> list[int] | None:
    """Fewest-hop s -> t path, lexicographically smallest among ties."""
    n = len(mult)
    nodes = list(range(n))
    to_t = _bfs_dist([nodes] * n, mult, t, reverse=True)
    if to_t[s] < 0:
        return None
    path = [s]
    u = s
    while u != t:
        u = next(v for v in range(n) if mult[u][v] > 0 and to_t[v] == to_t[u] - 1)
        path.append(u)
    return path


def dijkstra_paths(g: MultiGraph, s: int, t: int, k: int) -> tuple[Path_, ...]:
    """Greedy shortest-path search: take a hop-count shortest path, drop one
    unit of multiplicity along it, repeat up to k times."""
    if k < 1:
        raise ValueError("k must be at least 1")
    mult = g.mult.tolist()
    found: list[list[int]] = []
    for _ in range(k):
        p = _shortest_lex_path(mult, s, t)
        if p is None:
            break
        for i, j in zip(p, p[1:]):
            mult[i][j] -= 1
        found.append(p)
    return number_copies(found)


def _augment_max_flow(g: MultiGraph, s: int, t: int) -> list[list[int]]:
    """Edmonds-Karp on the multigraph; returns the net flow matrix."""
    n = g.n
    cap = g.mult.tolist()
    flow = [[0] * n for _ in range(n)]
    adj = [sorted(set(np.nonzero(g.mult[u])[0].tolist()) | set(np.nonzero(g.mult[:, u])[0].tolist())) for u in range(n)]
    while True:
        parent = [-1] * n
        parent[s] = s
        queue = deque([s])
        while queue and parent[t] < 0:
            u = queue.popleft()
            for v in adj[u]:
                if parent[v] < 0 and cap[u][v] - flow[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if parent[t] < 0:
            return flow
        v = t
        while v != s:
            u = parent[v]
            flow[u][v] += 1
            flow[v][u] -= 1
            v = u


def ford_fulkerson_paths(g: MultiGraph, s: int, t: int) -> tuple[Path_, ...]:
    """Exactly max_flow(g, s, t) edge-disjoint paths from an integral max flow."""
    if s == t:
        return ()
    flow = _augment_max_flow(g, s, t)
    n = g.n
    pos = [[max(f, 0) for f in row] for row in flow]
    found: list[list[int]] = []
    while any(pos[s]):
        walk = [s]
        where = {s: 0}
        u = s
        while u != t:
            v = next(x for x in range(n) if pos[u][x] > 0)
            pos[u][v] -= 1
            if v in where:
                # drop the circulation
                cut = where[v]
                for x in walk[cut + 1 :]:
                    del where[x]
                walk = walk[: cut + 1]
            else:
                where[v] = len(walk)
                walk.append(v)
            u = v
        found.append(walk)
    found.sort(key=lambda p: (len(p), p))
    return number_copies(found)


def find_paths(g: MultiGraph, s: int, sinks: Sequence[int]) -> PathSet:
    """Greedy shortest paths per sink, with an augmenting-path fallback for any
    sink where the greedy search falls short of the max-flow."""
    paths: dict[int, tuple[Path_, ...]] = {}
    fallback, unreachable = set(), set()
    for t in sinks:
        if t == s:
            raise ValueError("a sink cannot be the source")
        h = max_flow(g, s, t)
        if h == 0:
            paths[t] = ()
            unreachable.add(t)
            continue
        p = dijkstra_paths(g, s, t, h)
        if len(p) < h:
            p = ford_fulkerson_paths(g, s, t)
            fallback.add(t)
        paths[t] = p
    return PathSet(s, paths, frozenset(fallback), frozenset(unreachable))


def prune(g: MultiGraph, p: PathSet) -> MultiGraph:
    """Keep only edge copies carried by some path (max usage over sinks)."""
    out = np.zeros_like(g.mult)
    for sink_paths in p.paths.values():
        use = np.zeros_like(g.mult)
        for path in sink_paths:
            for i, j, _ in path:
                use[i, j] += 1
        np.maximum(out, use, out=out)
    if (out > g.mult).any():
        raise ValueError("path set uses more copies than the graph holds")
    return MultiGraph(out)
