"""Table-based arithmetic over GF(2^m), scalar and numpy-vectorised."""
from __future__ import annotations

import numpy as np

# Primitive reduction polynomials, bit i = coefficient of x^i.
PRIMITIVE_POLYS = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


class FieldError(ArithmeticError):
    pass


class GF:
    """The field GF(2^m) with exp/log lookup tables.

    Elements are the integers 0 .. 2^m - 1 (polynomial basis). Addition is XOR.
    """

    def __init__(self, m: int = 8):
        if m not in PRIMITIVE_POLYS:
            raise ValueError(f"unsupported extension degree m={m}, need 1..16")
        self.m = m
        self.order = 1 << m
        self.poly = PRIMITIVE_POLYS[m]
        n = self.order - 1
        self.exp = np.zeros(2 * n + 1, dtype=np.int64)
        self.log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(n):
            self.exp[i] = x
            self.log[x] = i
            x <<= 1
            if x & self.order:
                x ^= self.poly
        self.exp[n : 2 * n] = self.exp[:n]
        self.exp[2 * n] = self.exp[0]
        self._exp = self.exp.tolist()
        self._log = self.log.tolist()

    def __repr__(self) -> str:
        return f"GF(2^{self.m})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.m == self.m

    def __hash__(self) -> int:
        return hash(("GF", self.m))

    @property
    def bits(self) -> int:
        return self.m

    # scalar ops

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("inverse of zero")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    # vectorised ops

    def vmul(self, a, b) -> np.ndarray:
        """Elementwise product of broadcastable integer arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def dot(self, a, b) -> int:
        prod = self.vmul(a, b)
        return int(np.bitwise_xor.reduce(prod, axis=None)) if prod.size else 0

    def matvec(self, mat, vec) -> np.ndarray:
        mat = np.asarray(mat, dtype=np.int64)
        if mat.shape[1] == 0:
            return np.zeros(mat.shape[0], dtype=np.int64)
        return np.bitwise_xor.reduce(self.vmul(mat, np.asarray(vec)[None, :]), axis=1)

    def matmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for k in range(a.shape[1]):
            out ^= self.vmul(a[:, k : k + 1], b[k : k + 1, :])
        return out

    def combine(self, coeffs, vectors) -> np.ndarray:
        """Sum of coeffs[i] * vectors[i] (vectors stacked as rows)."""
        vectors = np.asarray(vectors, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=np.int64)
        return np.bitwise_xor.reduce(self.vmul(coeffs[:, None], vectors), axis=0)

    # linear algebra

    def row_reduce(self, mat) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and its pivot columns."""
        a = np.array(mat, dtype=np.int64, copy=True)
        rows, cols = a.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                continue
            p = r + int(nz[0])
            if p != r:
                a[[r, p]] = a[[p, r]]
            a[r] = self.vmul(a[r], self.inv(int(a[r, c])))
            col = a[:, c].copy()
            col[r] = 0
            hit = np.nonzero(col)[0]
            if hit.size:
                a[hit] ^= self.vmul(col[hit][:, None], a[r][None, :])
            pivots.append(c)
            r += 1
        return a, pivots

    def rank(self, mat) -> int:
        mat = np.asarray(mat)
        if mat.size == 0:
            return 0
        return len(self.row_reduce(mat)[1])

    def solve(self, a, b) -> np.ndarray | None:
        """A solution x of a @ x = b, free variables set to zero; None if inconsistent."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        rows, cols = a.shape
        aug = np.concatenate([a, b.reshape(rows, 1)], axis=1)
        red, pivots = self.row_reduce(aug)
        if cols in pivots:
            return None
        x = np.zeros(cols, dtype=np.int64)
        for i, c in enumerate(pivots):
            x[c] = red[i, cols]
        return x

    def inverse(self, mat) -> np.ndarray:
        mat = np.asarray(mat, dtype=np.int64)
        n = mat.shape[0]
        if mat.shape != (n, n):
            raise FieldError("inverse of a non-square matrix")
        red, pivots = self.row_reduce(np.concatenate([mat, np.eye(n, dtype=np.int64)], axis=1))
        if pivots[:n] != list(range(n)):
            raise FieldError("singular matrix")
        return red[:, n:]

    def elements(self) -> range:
        return range(self.order)

    def random(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.order, size=size, dtype=np.int64)


def smallest_field_exceeding(count: int) -> GF:
    """Smallest GF(2^m) whose order is strictly greater than count."""
    m = 1
    while (1 << m) <= count:
        m += 1
    return GF(m)
