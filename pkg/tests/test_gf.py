import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satnc.gf import GF, PRIMITIVE_POLYS, FieldError, smallest_field_exceeding


def _clmul_mod(a: int, b: int, m: int, poly: int) -> int:
    """Schoolbook carry-less multiply then reduce; independent of the tables."""
    acc = 0
    for i in range(m):
        if b >> i & 1:
            acc ^= a << i
    for i in range(2 * m - 2, m - 1, -1):
        if acc >> i & 1:
            acc ^= poly << (i - m)
    return acc


@pytest.mark.parametrize("m", range(1, 9))
def test_tables_match_schoolbook_multiplication(m):
    f = GF(m)
    for a in range(f.order):
        for b in range(f.order):
            assert f.mul(a, b) == _clmul_mod(a, b, m, PRIMITIVE_POLYS[m])


@pytest.mark.parametrize("m", range(1, 9))
def test_field_axioms_exhaustive(m):
    f = GF(m)
    q = f.order
    a = np.arange(q)
    table = f.vmul(a[:, None], a[None, :])
    assert (table == table.T).all()
    assert (table[1] == a).all() and (table[0] == 0).all()
    for x in range(1, q):
        assert f.mul(x, f.inv(x)) == 1
        # every nonzero row is a permutation of the nonzero elements
        assert sorted(table[x, 1:]) == list(range(1, q))
    if q <= 16:
        for x, y, z in itertools.product(range(q), repeat=3):
            assert f.mul(x, f.mul(y, z)) == f.mul(f.mul(x, y), z)
            assert f.mul(x, y ^ z) == f.mul(x, y) ^ f.mul(x, z)


def test_primitive_polynomials_generate_the_full_group():
    for m in range(1, 17):
        f = GF(m)
        if m == 1:
            continue
        seen, x = set(), 1
        for _ in range(f.order - 1):
            seen.add(x)
            x = f.mul(x, 2)
        assert len(seen) == f.order - 1


def test_inverse_of_zero_raises():
    with pytest.raises(FieldError):
        GF(8).inv(0)


def test_gf256_known_products():
    f = GF(8)
    assert f.mul(0x53, 0xCA) == _clmul_mod(0x53, 0xCA, 8, 0x11D)
    assert f.mul(2, 0x80) == 0x1D


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_inverse_matrix_roundtrip(m, n, seed):
    f = GF(m)
    rng = np.random.default_rng(seed)
    a = f.random(rng, (n, n))
    if f.rank(a) < n:
        with pytest.raises(FieldError):
            f.inverse(a)
        return
    assert (f.matmul(a, f.inverse(a)) == np.eye(n, dtype=np.int64)).all()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_solve_returns_a_solution_when_consistent(m, rows, cols, seed):
    f = GF(m)
    rng = np.random.default_rng(seed)
    a = f.random(rng, (rows, cols))
    x = f.random(rng, cols)
    b = f.matvec(a, x)
    sol = f.solve(a, b)
    assert sol is not None
    assert (f.matvec(a, sol) == b).all()


def test_solve_inconsistent_returns_none():
    f = GF(2)
    a = np.array([[1, 1], [1, 1]])
    assert f.solve(a, np.array([1, 0])) is None


def test_rank_of_butterfly_sink_matrix_gf2():
    f = GF(1)
    assert f.rank(np.array([[1, 1], [0, 1]])) == 2
    assert f.rank(np.array([[1, 1], [1, 1]])) == 1


@pytest.mark.parametrize("count,m", [(0, 1), (1, 1), (2, 2), (3, 2), (4, 3), (200, 8)])
def test_smallest_field_exceeding(count, m):
    assert smallest_field_exceeding(count).m == m
