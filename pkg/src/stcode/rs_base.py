"""Systematic (n, k) Reed-Solomon code used for each row instance."""

from __future__ import annotations

from dataclasses import dataclass

from .galois import GF, gf_inverse, gf_solve, mat_mul, mat_vec, transpose


class InsufficientSymbolsError(ValueError):
    pass


class InconsistentSymbolsError(ValueError):
    pass


@dataclass(frozen=True)
class RsCode:
    n: int
    k: int
    field: GF
    generator: tuple  # k rows of n entries, first k columns = identity

    @property
    def r(self):
        return self.n - self.k

    def column(self, j):
        return [row[j] for row in self.generator]


def evaluation_points(field: GF, n: int) -> list[int]:
    """0, 1, g, g^2, ... for the field's primitive element g."""
    return [0] + [field.pow(field.generator, i) for i in range(n - 1)]


def rs_make(n: int, k: int, field: GF) -> RsCode:
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n} k={k}")
    if n > field.q:
        raise ValueError(f"n={n} exceeds field order {field.q}")
    points = evaluation_points(field, n)
    vander = [[field.pow(p, i) if p else int(i == 0) for p in points] for i in range(k)]
    head = gf_inverse(field, [row[:k] for row in vander])
    gen = mat_mul(field, head, vander)
    return RsCode(n, k, field, tuple(tuple(row) for row in gen))


def rs_encode(code: RsCode, data) -> list[int]:
    if len(data) != code.k:
        raise ValueError(f"expected {code.k} data symbols, got {len(data)}")
    return mat_vec(code.field, transpose(code.generator), data)


def rs_erasure_decode(code: RsCode, known) -> list[int]:
    """Recover the full codeword from (position, value) pairs.

    The first k distinct positions determine the codeword; any extra
    positions are checked against it.
    """
    known = dict(known)
    if len(known) < code.k:
        raise InsufficientSymbolsError(f"need {code.k} symbols, got {len(known)}")
    positions = sorted(known)
    chosen = positions[: code.k]
    system = [code.column(j) for j in chosen]
    data = gf_solve(code.field, system, [known[j] for j in chosen])
    word = rs_encode(code, data)
    for j in positions[code.k:]:
        if word[j] != known[j]:
            raise InconsistentSymbolsError(f"symbol at position {j} disagrees with the decoded codeword")
    return word
