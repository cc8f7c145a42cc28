"""Single-snapshot coding pipeline: paths -> prune -> PLG -> code -> verify."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .code import NetworkCode, SinkReport, construct_multicast, verify_multicast
from .gf import GF, smallest_field_exceeding
from .graph import MultiGraph, PathSet, find_paths, prune
from .plg import PLG, build_plg, find_cycle, topo_order


@dataclass
class CodingResult:
    paths: PathSet
    r: int
    pruned: MultiGraph
    plg: PLG
    cycle: list | None = None
    code: NetworkCode | None = None
    report: SinkReport | None = None
    retries_used: int = 0

    @property
    def cyclic(self) -> bool:
        return self.cycle is not None


def _relabelled_paths(g: MultiGraph, s: int, sinks: Sequence[int], rng: np.random.Generator) -> PathSet:
    """Path search under a random node relabelling (randomised tie-breaking)."""
    perm = rng.permutation(g.n)
    inv = np.argsort(perm)
    h = MultiGraph(g.mult[np.ix_(inv, inv)])
    ps = find_paths(h, int(perm[s]), [int(perm[t]) for t in sinks])
    back = {
        int(inv[t]): tuple(tuple((int(inv[i]), int(inv[j]), c) for i, j, c in p) for p in paths)
        for t, paths in ps.paths.items()
    }
    return PathSet(s, back, frozenset(int(inv[t]) for t in ps.fallback), frozenset(int(inv[t]) for t in ps.unreachable))


def _assemble(g: MultiGraph, s: int, sinks: Sequence[int], ps: PathSet):
    flows = [h for h in ps.h_per_sink.values() if h > 0]
    r = min(flows) if flows else 0
    kept = ps.trimmed(r) if r else PathSet(s, {})
    pruned = prune(g, kept)
    plg = build_plg(pruned, s, sinks, kept)
    return r, pruned, plg


def build_code(
    g: MultiGraph,
    source: int,
    sinks: Sequence[int],
    field: GF | None = None,
    min_field: bool = False,
    retry_paths: int = 0,
    seed: int = 0,
) -> CodingResult:
    """Run the whole construction on one multigraph.

    The rate is the smallest positive per-sink max-flow; sinks below it are
    left undesignated. A cyclic PLG is returned with ``cycle`` set and no code.
    """
    ps = find_paths(g, source, sinks)
    r, pruned, plg = _assemble(g, source, sinks, ps)
    cycle = find_cycle(plg.succ)
    used = 0
    rng = np.random.default_rng(seed)
    while cycle is not None and used < retry_paths:
        used += 1
        cand = _relabelled_paths(g, source, sinks, rng)
        r2, pruned2, plg2 = _assemble(g, source, sinks, cand)
        cyc2 = find_cycle(plg2.succ)
        if cyc2 is None and r2 == r:
            ps, pruned, plg, cycle = cand, pruned2, plg2, None
    result = CodingResult(ps, r, pruned, plg, retries_used=used)
    if cycle is not None:
        result.cycle = [plg.labels[k] for k in cycle]
        return result
    if r == 0:
        return result
    designated = sum(1 for t in sinks if ps.h_per_sink.get(t, 0) >= r)
    if min_field:
        field = smallest_field_exceeding(designated)
    elif field is None:
        field = GF(8)
    code = construct_multicast(plg, topo_order(plg), r, field)
    result.code = code
    result.report = verify_multicast(code, sinks, r)
    return result
