"""Linear multicast construction on a paths line-graph.

Every PLG node (= edge copy of the graph) holds one global encoding kernel
(GEK) in F^r. The sweep follows the PLG topological order and keeps, for every
designated sink, the r vectors currently at the front of its r paths linearly
independent, tracking the inverse of that frontier matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gf import GF
from .plg import PLG, format_label

Hop = tuple[int, int, int]


class FieldExhaustedError(RuntimeError):
    def __init__(self, sinks: Sequence[int], node: str, field: GF):
        self.sinks = list(sinks)
        names = ", ".join(str(t + 1) for t in self.sinks)
        super().__init__(f"field exhausted: no vector in {field} for {node} keeps sinks {{{names}}} independent")


class InvariantError(RuntimeError):
    pass


@dataclass
class LocalKernel:
    """Mixing matrix of one node: rows follow ``inputs``, columns ``outputs``.
    Inputs are edge copies, or ``("imag", k)`` for the source's imaginary links."""

    inputs: list[tuple]
    outputs: list[Hop]
    matrix: np.ndarray


@dataclass
class NetworkCode:
    field: GF
    r: int
    plg: PLG = field(repr=False)
    designated: list[int]
    gek: dict[Hop, np.ndarray] = field(repr=False)
    lek: dict[int, LocalKernel] = field(default_factory=dict, repr=False)

    def vector(self, k: int) -> np.ndarray:
        return self.gek[self.plg.origin(k)]


@dataclass
class SinkResult:
    sink: int
    matrix: np.ndarray
    rank: int
    decodable: bool


@dataclass
class SinkReport:
    r: int
    sinks: dict[int, SinkResult]

    @property
    def all_decodable(self) -> bool:
        return all(s.decodable for s in self.sinks.values())


def _first_valid(field: GF, forms: list[list[int]], n: int) -> tuple[int, ...] | None:
    """Lexicographically first nonzero coefficient tuple in F^n on which every
    linear form in ``forms`` is nonzero."""
    mul = field.mul
    for c in itertools.product(range(field.order), repeat=n):
        if not any(c):
            continue
        ok = True
        for a in forms:
            acc = 0
            for ci, ai in zip(c, a):
                if ci and ai:
                    acc ^= mul(ci, ai)
            if acc == 0:
                ok = False
                break
        if ok:
            return c
    return None


def construct_multicast(plg: PLG, order: Sequence[int], r: int, field: GF) -> NetworkCode:
    """Assign one GEK per PLG node so that every sink with at least r paths
    receives r independent vectors; raises FieldExhaustedError if the field is
    too small for the greedy choice."""
    if r < 1:
        raise ValueError("rate must be positive")
    designated = [t for t in plg.sink_nodes if len(plg.paths.get(t, ())) >= r]

    # per sink: path index of each PLG node on its first r paths, paths ranked by first hop
    slot: dict[int, dict[int, int]] = {}
    for t in designated:
        ps = sorted(plg.paths[t][:r], key=lambda ids: ids[0])
        slot[t] = {k: j for j, ids in enumerate(ps) for k in ids}
    binv = {t: np.eye(r, dtype=np.int64) for t in designated}
    unit = np.eye(r, dtype=np.int64)

    vec: dict[int, np.ndarray] = {}
    for k in order:
        if not plg.is_edge(k):
            continue
        users = [(t, slot[t][k]) for t in designated if k in slot[t]]
        if not users:
            vec[k] = np.zeros(r, dtype=np.int64)
            continue
        # candidate parents: each user's predecessor on its path
        parents: list[np.ndarray] = []
        keys: list = []
        for t, j in users:
            ids = next(ids for ids in plg.paths[t] if k in ids)
            pos = ids.index(k)
            key = ("imag", j) if pos == 0 else ids[pos - 1]
            if key not in keys:
                keys.append(key)
                parents.append(unit[j] if pos == 0 else vec[key])
        forms = [[field.dot(binv[t][j], p) for p in parents] for t, j in users]
        c = _first_valid(field, forms, len(parents))
        if c is None:
            raise FieldExhaustedError([t for t, _ in users], format_label(plg.labels[k]), field)
        v = field.combine(c, parents)
        vec[k] = v
        for t, j in users:
            b = binv[t]
            w = field.matvec(b, v)
            row = field.vmul(b[j], field.inv(int(w[j])))
            b ^= field.vmul(w[:, None], row[None, :])
            b[j] = row

    gek = {plg.origin(k): v for k, v in vec.items()}
    code = NetworkCode(field, r, plg, designated, gek)
    code.lek = extract_lek(code)
    return code


def _in_edges(plg: PLG) -> tuple[dict[int, list[int]], dict[int, list[int]]]:
    ins: dict[int, list[int]] = {}
    outs: dict[int, list[int]] = {}
    for k in plg.edge_nodes():
        i, j, _ = plg.origin(k)
        outs.setdefault(i, []).append(k)
        ins.setdefault(j, []).append(k)
    return ins, outs


def extract_lek(code: NetworkCode) -> dict[int, LocalKernel]:
    """Local kernels reproducing every GEK from the GEKs entering its tail node.

    Each outgoing copy mixes only the copies that feed it in the PLG (other
    coefficients are zero); among solutions the one with free coefficients set
    to zero is returned."""
    plg, f, r = code.plg, code.field, code.r
    ins, outs = _in_edges(plg)
    src_node = None
    for k in plg.succ[plg.source]:
        src_node = plg.origin(k)[0]
        break
    kernels: dict[int, LocalKernel] = {}
    for x in sorted(outs):
        out_ids = outs[x]
        if x == src_node:
            in_keys: list = [("imag", q) for q in range(r)]
            in_vecs = list(np.eye(r, dtype=np.int64))
        else:
            in_keys = list(ins.get(x, []))
            in_vecs = [code.vector(d) for d in in_keys]
        mat = np.zeros((len(in_keys), len(out_ids)), dtype=np.int64)
        for col, e in enumerate(out_ids):
            fe = code.vector(e)
            if x == src_node:
                allowed = list(range(r))
            else:
                feeders = set(plg.pred[e])
                allowed = [row for row, d in enumerate(in_keys) if d in feeders]
            if not fe.any():
                continue
            a = np.stack([in_vecs[row] for row in allowed], axis=1) if allowed else np.zeros((r, 0), dtype=np.int64)
            sol = f.solve(a, fe) if allowed else None
            if sol is None:
                raise InvariantError(f"no local kernel reproduces the GEK of {format_label(plg.labels[e])}")
            for row, coef in zip(allowed, sol):
                mat[row, col] = coef
        labels_in = [k if isinstance(k, tuple) else plg.origin(k) for k in in_keys]
        kernels[x] = LocalKernel(labels_in, [plg.origin(e) for e in out_ids], mat)
    return kernels


def verify_multicast(code: NetworkCode, sinks: Sequence[int] | None = None, r: int | None = None) -> SinkReport:
    plg, f = code.plg, code.field
    r = code.r if r is None else r
    sinks = list(plg.sink_nodes) if sinks is None else list(sinks)
    out = {}
    for t in sinks:
        feeders = [k for k in plg.pred[plg.sink_nodes[t]] if plg.is_edge(k)]
        if feeders:
            mat = np.stack([code.vector(k) for k in feeders], axis=1)
        else:
            mat = np.zeros((r, 0), dtype=np.int64)
        rank = f.rank(mat)
        out[t] = SinkResult(t, mat, rank, rank == r)
    return SinkReport(r, out)


def edge_symbols(code: NetworkCode, message: Sequence[int]) -> dict[Hop, int]:
    """Symbols on every edge copy, computed node by node from the local kernels."""
    plg, f = code.plg, code.field
    msg = [int(x) for x in message]
    if len(msg) != code.r:
        raise ValueError(f"message must hold {code.r} symbols")
    y: dict[Hop, int] = {}
    from .plg import topo_order

    for k in topo_order(plg):
        if not plg.is_edge(k):
            continue
        e = plg.origin(k)
        ker = code.lek.get(e[0])
        if ker is None:
            y[e] = 0
            continue
        col = ker.outputs.index(e)
        acc = 0
        for row, src in enumerate(ker.inputs):
            coef = int(ker.matrix[row, col])
            if coef:
                val = msg[src[1]] if src[0] == "imag" else y[src]
                acc ^= f.mul(coef, val)
        y[e] = acc
    return y


def transmit(code: NetworkCode, message: Sequence[int]) -> dict[int, list[int] | None]:
    """Push one message through the network; each sink returns the decoded
    message, or None when its incoming kernels do not span F^r."""
    plg, f = code.plg, code.field
    y = edge_symbols(code, message)
    decoded: dict[int, list[int] | None] = {}
    for t, node in plg.sink_nodes.items():
        feeders = [k for k in plg.pred[node] if plg.is_edge(k)]
        if not feeders:
            decoded[t] = None
            continue
        kern = np.stack([code.vector(k) for k in feeders], axis=0)
        _, piv = f.row_reduce(kern.T)
        if len(piv) < code.r:
            decoded[t] = None
            continue
        sel = piv[: code.r]
        obs = np.array([y[plg.origin(feeders[q])] for q in sel], dtype=np.int64)
        decoded[t] = f.matvec(f.inverse(kern[sel]), obs).tolist()
    return decoded


def format_code(code: NetworkCode) -> str:
    """Stable text dump: field, rate, GEKs as hex vectors, LEK matrices."""
    f = code.field
    width = max(1, (f.m + 3) // 4)

    def hx(v) -> str:
        return ",".join(f"{int(x):0{width}x}" for x in v)

    def name(x) -> str:
        if x[0] == "imag":
            return f"imag{x[1] + 1}"
        return f"({x[0] + 1},{x[1] + 1})#{x[2]}"

    lines = [
        f"field GF(2^{f.m}) poly 0x{f.poly:x}",
        f"rate {code.r}",
        "designated " + " ".join(str(t + 1) for t in sorted(code.designated)),
        "[gek]",
    ]
    for e in sorted(code.gek):
        lines.append(f"{name(e)} {hx(code.gek[e])}")
    lines.append("[lek]")
    for x in sorted(code.lek):
        ker = code.lek[x]
        lines.append(f"node {x + 1} in {' '.join(name(d) for d in ker.inputs)} out {' '.join(name(e) for e in ker.outputs)}")
        for row in ker.matrix:
            lines.append("  " + hx(row))
    return "\n".join(lines) + "\n"
