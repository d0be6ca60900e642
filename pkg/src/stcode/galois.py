"""Arithmetic in GF(2^w) for w in {8, 16}, plus small dense linear algebra.

Field elements are plain ints in ``[0, 2**w)``.  Matrices are lists of
rows.  Scalar operations go through log/antilog tables; the ``v*`` methods
accept numpy arrays and broadcast.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

DEFAULT_MODULI = {8: 0x11D, 16: 0x1100B}


class ZeroInverseError(ZeroDivisionError):
    pass


class SingularMatrixError(ValueError):
    def __init__(self, rank, size):
        super().__init__(f"matrix is singular (rank {rank} < {size})")
        self.rank = rank
        self.size = size


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2 over GF(2)."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for divisor in range(1 << d, 1 << (d + 1)):
            if _poly_mod(poly, divisor) == 0:
                return False
    return True


def naive_mul(a: int, b: int, w: int, modulus: int) -> int:
    """Shift-and-reduce multiplication; table-free reference."""
    out = 0
    top = 1 << w
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= modulus
    return out


class GF:
    """The field GF(2^w) reduced by ``modulus``.

    Construction validates the modulus and builds log/antilog tables
    around the smallest primitive element.
    """

    def __init__(self, w: int = 8, modulus: int | None = None):
        if w not in DEFAULT_MODULI:
            raise ValueError(f"unsupported field width w={w}; expected 8 or 16")
        if modulus is None:
            modulus = DEFAULT_MODULI[w]
        if modulus.bit_length() - 1 != w or not is_irreducible(modulus):
            raise ValueError(f"modulus {modulus:#x} is not irreducible of degree {w}")
        self.w = w
        self.modulus = modulus
        self.q = 1 << w
        self.order = self.q - 1
        self.dtype = np.uint8 if w == 8 else np.uint16
        self.generator = self._find_generator()
        self._build_tables()

    def _find_generator(self) -> int:
        # a generator must not have order dividing (q-1)/p for any prime p | q-1
        n = self.order
        factors, m, p = [], n, 2
        while p * p <= m:
            if m % p == 0:
                factors.append(p)
                while m % p == 0:
                    m //= p
            p += 1
        if m > 1:
            factors.append(m)
        for g in range(2, self.q):
            if all(self._slow_pow(g, n // f) != 1 for f in factors):
                return g
        raise ValueError("modulus has no primitive element")  # pragma: no cover

    def _slow_pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = naive_mul(out, a, self.w, self.modulus)
            a = naive_mul(a, a, self.w, self.modulus)
            e >>= 1
        return out

    def _build_tables(self):
        exp = [0] * (2 * self.order)
        log = [0] * self.q
        x = 1
        for i in range(self.order):
            exp[i] = x
            log[x] = i
            x = naive_mul(x, self.generator, self.w, self.modulus)
        for i in range(self.order, 2 * self.order):
            exp[i] = exp[i - self.order]
        self._exp = exp
        self._log = log
        # numpy copies; index 2*order is a sink for products with zero
        self._np_exp = np.array(exp + [0] * (2 * self.order + 1), dtype=np.int64)
        np_log = np.array(log, dtype=np.int64)
        np_log[0] = 2 * self.order
        self._np_log = np_log

    def __repr__(self):
        return f"GF(2^{self.w}, modulus={self.modulus:#x})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.w, self.modulus) == (other.w, other.modulus)

    def __hash__(self):
        return hash((self.w, self.modulus))

    # scalar ops

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroInverseError("zero has no multiplicative inverse")
        return self._exp[self.order - self._log[a]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroInverseError("division by zero")
        if a == 0:
            return 0
        return self._exp[self._log[a] - self._log[b] + self.order]

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[(self._log[a] * e) % self.order]

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of {self!r}")
        return a

    # vectorized ops

    def vmul(self, a, b):
        """Elementwise product of integer arrays (or scalars), broadcasting."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return self._np_exp[self._np_log[a] + self._np_log[b]]

    def vdot(self, coeffs, vectors):
        """Sum over i of coeffs[i] * vectors[i]; vectors is (m, ...) shaped."""
        vectors = np.asarray(vectors, dtype=np.int64)
        out = np.zeros(vectors.shape[1:], dtype=np.int64)
        for c, v in zip(coeffs, vectors):
            if c:
                out ^= self.vmul(c, v)
        return out

    def matmul(self, m, data):
        """Matrix (list of rows or 2-D array) times a (cols, ...) array."""
        data = np.asarray(data, dtype=np.int64)
        return np.stack([self.vdot(row, data) for row in m]) if len(m) else data[:0]


def identity(size: int) -> list[list[int]]:
    return [[int(i == j) for j in range(size)] for i in range(size)]


def mat_vec(field: GF, m, v) -> list[int]:
    out = []
    for row in m:
        acc = 0
        for a, b in zip(row, v):
            if a and b:
                acc ^= field.mul(a, b)
        out.append(acc)
    return out


def mat_mul(field: GF, a, b) -> list[list[int]]:
    cols = list(zip(*b))
    return [[_dot(field, row, col) for col in cols] for row in a]


def _dot(field: GF, u, v) -> int:
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc ^= field.mul(a, b)
    return acc


def transpose(m) -> list[list[int]]:
    return [list(col) for col in zip(*m)]


def _eliminate(field: GF, rows: list[list[int]], ncols: int):
    """In-place reduction to reduced row-echelon form over the first ncols.

    Pivot is the first nonzero entry at or below the current row.  Returns
    the pivot columns.
    """
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        pivot_row = rows[r]
        for i in range(len(rows)):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [x ^ field.mul(f, y) for x, y in zip(rows[i], pivot_row)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def gf_solve(field: GF, m, rhs) -> list[int]:
    """Solve ``m x = rhs`` for square, nonsingular ``m``."""
    size = len(m)
    if any(len(row) != size for row in m):
        raise ValueError("gf_solve needs a square matrix")
    if len(rhs) != size:
        raise ValueError(f"rhs has length {len(rhs)}, expected {size}")
    aug = [list(row) + [b] for row, b in zip(m, rhs)]
    pivots = _eliminate(field, aug, size)
    if len(pivots) < size:
        raise SingularMatrixError(len(pivots), size)
    return [row[size] for row in aug]


def gf_inverse(field: GF, m) -> list[list[int]]:
    size = len(m)
    aug = [list(row) + e for row, e in zip(m, identity(size))]
    pivots = _eliminate(field, aug, size)
    if len(pivots) < size:
        raise SingularMatrixError(len(pivots), size)
    return [row[size:] for row in aug]


def gf_rank(field: GF, m) -> int:
    if not m:
        return 0
    rows = [list(r) for r in m]
    return len(_eliminate(field, rows, len(rows[0])))


def batch_nonsingular(field: GF, mats) -> np.ndarray:
    """Which matrices in a (batch, m, m) stack are invertible.

    Forward elimination runs on the whole stack at once; a matrix is
    singular as soon as one column has no pivot left.
    """
    a = np.array(mats, dtype=np.int64)
    batch, m = a.shape[0], a.shape[1]
    ok = np.ones(batch, dtype=bool)
    idx = np.arange(batch)
    for c in range(m):
        nz = a[:, c:, c] != 0
        has = nz.any(axis=1)
        ok &= has
        p = c + nz.argmax(axis=1)
        if (p != c).any():
            top = a[idx, c].copy()
            a[idx, c] = a[idx, p]
            a[idx, p] = top
        piv = np.where(has, a[:, c, c], 1)
        inv = field._np_exp[field.order - field._np_log[piv]]
        factor = field.vmul(a[:, c + 1:, c], inv[:, None])
        if factor.any():
            a[:, c + 1:, c:] ^= field.vmul(factor[:, :, None], a[:, None, c, c:])
    return ok


def null_space(field: GF, m) -> list[list[int]]:
    """Basis of {h : m h = 0} for a list-of-rows matrix."""
    ncols = len(m[0])
    rows = [list(r) for r in m]
    pivots = _eliminate(field, rows, ncols)
    basis = []
    for f in (c for c in range(ncols) if c not in set(pivots)):
        h = [0] * ncols
        h[f] = 1
        for row, p in zip(rows, pivots):
            h[p] = row[f]  # -x == x in characteristic 2
        basis.append(h)
    return basis


def span_coefficients(field: GF, rows, target):
    """Coefficients c with sum_i c[i]*rows[i] == target, or None.

    Any solution is acceptable; free variables are set to zero.
    """
    nrows = len(rows)
    if nrows == 0:
        return None if any(target) else []
    # columns of the transposed system are the given rows
    aug = [[rows[i][c] for i in range(nrows)] + [target[c]] for c in range(len(target))]
    pivots = _eliminate(field, aug, nrows)
    if any(row[nrows] for row in aug[len(pivots):]):
        return None
    coeffs = [0] * nrows
    for row, p in zip(aug, pivots):
        coeffs[p] = row[nrows]
    return coeffs


@lru_cache(maxsize=None)
def field(w: int = 8, modulus: int | None = None) -> GF:
    """Shared, cached field instance."""
    return GF(w, modulus)
