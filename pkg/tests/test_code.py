import numpy as np
import pytest

from satnc import fixtures
from satnc.code import (
    FieldExhaustedError,
    construct_multicast,
    edge_symbols,
    format_code,
    transmit,
    verify_multicast,
)
from satnc.gf import GF
from satnc.graph import find_paths, prune
from satnc.plg import build_plg, is_generalized_acyclic, topo_order
from satnc.pipeline import build_code
from conftest import random_multigraph


def butterfly_code(m=1):
    g = fixtures.butterfly()
    ps = find_paths(g, 0, [5, 6])
    plg = build_plg(prune(g, ps), 0, [5, 6], ps)
    return construct_multicast(plg, topo_order(plg), 2, GF(m))


def lek_identity_holds(code) -> bool:
    """Every GEK equals the LEK-weighted sum of the kernels entering its tail."""
    r = code.r
    f = code.field
    for x, ker in code.lek.items():
        ins = [np.eye(r, dtype=np.int64)[d[1]] if d[0] == "imag" else code.gek[d] for d in ker.inputs]
        for col, e in enumerate(ker.outputs):
            acc = np.zeros(r, dtype=np.int64)
            for row, v in enumerate(ins):
                acc ^= f.vmul(int(ker.matrix[row, col]), v)
            if not (acc == code.gek[e]).all():
                return False
    return True


def random_instance(rng, field):
    """A random generalized-acyclic instance with 1 <= r <= 3, or None."""
    n = int(rng.integers(4, 11))
    g = random_multigraph(rng, n, density=0.35, max_mult=2)
    k = int(rng.integers(1, 4))
    sinks = [int(x) for x in rng.choice(np.arange(1, n), size=min(k, n - 1), replace=False)]
    ps = find_paths(g, 0, sinks)
    flows = [h for h in ps.h_per_sink.values() if h > 0]
    if not flows:
        return None
    r = min(min(flows), 3)
    ps = ps.trimmed(r)
    plg = build_plg(prune(g, ps), 0, sinks, ps)
    if not is_generalized_acyclic(plg):
        return None
    return construct_multicast(plg, topo_order(plg), r, field)


def test_butterfly_xor():
    code = butterfly_code()
    assert code.gek[(3, 4, 0)].tolist() == [1, 1]
    assert code.gek[(0, 1, 0)].tolist() == [1, 0]
    assert code.gek[(0, 2, 0)].tolist() == [0, 1]
    ker = code.lek[3]
    assert ker.matrix[:, 0].tolist() == [1, 1]
    rep = verify_multicast(code)
    assert rep.all_decodable and {s.rank for s in rep.sinks.values()} == {2}


def test_butterfly_transmit_exhaustive_gf2():
    code = butterfly_code()
    for a in range(2):
        for b in range(2):
            out = transmit(code, [a, b])
            assert out == {5: [a, b], 6: [a, b]}
            assert edge_symbols(code, [a, b])[(3, 4, 0)] == a ^ b


def test_zero_message_decodes_to_zero():
    code = butterfly_code(8)
    assert transmit(code, [0, 0]) == {5: [0, 0], 6: [0, 0]}


def test_lek_identity_on_butterfly():
    assert lek_identity_holds(butterfly_code())


def test_lek_mutation_breaks_identity():
    code = butterfly_code(4)
    ker = code.lek[3]
    ker.matrix[0, 0] ^= 1
    assert not lek_identity_holds(code)


def test_dependent_gek_breaks_decodability():
    code = butterfly_code(4)
    # make sink 6's feeders carry the same vector
    code.gek[(1, 5, 0)] = code.gek[(4, 5, 0)].copy()
    rep = verify_multicast(code)
    assert not rep.sinks[5].decodable and rep.sinks[5].rank == 1
    assert rep.sinks[6].decodable


def test_undesignated_sink_is_reported_not_raised():
    g1, _ = fixtures.time_varying_butterfly()
    res = build_code(g1, 0, [5, 6], field=GF(4))
    assert res.r == 1
    assert res.report.all_decodable
    ps = find_paths(g1, 0, [5, 6]).trimmed(1)
    plg = build_plg(prune(g1, ps), 0, [5, 6], ps)
    code = construct_multicast(plg, topo_order(plg), 1, GF(4))
    rep = verify_multicast(code, r=2)
    assert not rep.sinks[5].decodable


EXHAUSTING_EDGES = [
    (1, 3), (1, 4), (1, 5), (3, 4), (4, 3), (4, 6), (4, 7), (5, 2), (5, 3),
    (5, 4), (6, 4), (6, 5), (6, 7), (7, 1), (7, 2), (7, 4), (7, 6),
]


def test_field_exhaustion_is_explicit():
    g = fixtures.graph(EXHAUSTING_EDGES, n=7)
    with pytest.raises(FieldExhaustedError, match=r"GF\(2\^1\).*sinks \{5, 6, 7\}"):
        build_code(g, 0, [4, 5, 6], field=GF(1))
    assert build_code(g, 0, [4, 5, 6], field=GF(2)).report.all_decodable
    assert build_code(g, 0, [4, 5, 6], min_field=True).report.all_decodable


def test_gek_columns_match_unit_messages():
    code = butterfly_code(8)
    for j in range(code.r):
        msg = [0] * code.r
        msg[j] = 1
        ys = edge_symbols(code, msg)
        for e, v in code.gek.items():
            assert ys[e] == v[j]


def test_random_generalized_acyclic_multicast():
    rng = np.random.default_rng(99)
    field = GF(4)
    done = 0
    while done < 100:
        code = random_instance(rng, field)
        if code is None:
            continue
        done += 1
        rep = verify_multicast(code, code.designated)
        assert rep.all_decodable
        assert lek_identity_holds(code)
        for _ in range(5):
            msg = field.random(rng, code.r).tolist()
            out = transmit(code, msg)
            for t in code.designated:
                assert out[t] == msg


def test_transmit_many_random_messages():
    code = butterfly_code(8)
    rng = np.random.default_rng(5)
    for msg in rng.integers(0, 256, size=(1000, 2)):
        assert transmit(code, msg.tolist()) == {5: msg.tolist(), 6: msg.tolist()}


def test_format_code_is_stable():
    text = format_code(butterfly_code())
    assert text == format_code(butterfly_code())
    lines = text.splitlines()
    assert lines[:4] == ["field GF(2^1) poly 0x3", "rate 2", "designated 6 7", "[gek]"]
    assert "(4,5)#0 1,1" in lines


def test_rate_must_be_positive():
    code = butterfly_code()
    with pytest.raises(ValueError):
        construct_multicast(code.plg, topo_order(code.plg), 0, GF(1))
