"""Single-node repair with download accounting.

A failed node ``t`` is rebuilt by RS-decoding its major row ``s`` and then
solving each failed symbol's coupling group.  Downloads fall in three sets:

* S1: k symbols of row s whose coupling can be stripped,
* S2: partners needed for that stripping,
* S3: partners needed to rebuild the failed symbols.

Coordinates are global 0-based ``(row, node)`` pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .galois import gf_inverse, span_coefficients


class RepairError(RuntimeError):
    pass


@dataclass(frozen=True)
class RepairPlan:
    failed_node: int
    major_row: int
    s1: tuple
    s2: tuple
    s3: tuple
    raw_downloads: int  # counting every needed partner, without sharing

    @property
    def downloads(self):
        return self.s1 + self.s2 + self.s3

    @property
    def total_downloads(self):
        return len(self.s1) + len(self.s2) + len(self.s3)


@dataclass(frozen=True)
class BandwidthReport:
    n: int
    k: int
    alpha: int
    mode: str
    counts: tuple
    raw_counts: tuple

    @property
    def total(self):
        return sum(self.counts)

    @property
    def average_ratio(self) -> Fraction:
        return Fraction(self.total, self.n * self.k * self.alpha)

    @property
    def raw_average_ratio(self) -> Fraction:
        return Fraction(sum(self.raw_counts), self.n * self.k * self.alpha)

    def node_ratio(self, t) -> Fraction:
        return Fraction(self.counts[t], self.k * self.alpha)


def major_row(desc, t: int) -> int:
    """Row whose diagonal set holds node t's symbol in that row."""
    plan, _, local = desc.locate(t)
    return plan.geometry.set_of_column(local)


def _knowledge(group, known_x, known_b):
    """Linear functionals (over the group's pre-transform symbols) that are known."""
    m = group.forward_matrix()
    size = len(group.cells)
    rows = [m[pos] for pos in known_x]
    rows += [[int(i == pos) for i in range(size)] for pos in known_b]
    return rows


def _min_partners(desc, group, cells, target, must, candidates, known_b, prefer=()):
    """Smallest partner subset making ``target`` computable.

    ``target`` is a functional over the group's pre-transform symbols; ``must``
    are positions downloaded anyway, ``known_b`` positions whose
    pre-transform value is known.  Returns partner positions or None.
    Subsets are ranked by new downloads (outside ``prefer``), size, then
    position order.
    """
    best = None
    for size in range(len(candidates) + 1):
        for extra in combinations(candidates, size):
            rows = _knowledge(group, list(must) + list(extra), known_b)
            if span_coefficients(desc.field, rows, target) is None:
                continue
            key = (sum(1 for p in extra if cells[p] not in prefer), size, [cells[p] for p in extra])
            if best is None or key < best[0]:
                best = (key, extra)
    return None if best is None else best[1]


def _unit(size, pos):
    return [int(i == pos) for i in range(size)]


def decoupling_partners(desc, cell, failed_node):
    """Partners needed to learn the pre-transform value of ``cell``, or None."""
    group, cells = desc.group_of_cell(cell)
    pos = cells.index(cell)
    # partners on the failed node are unavailable; original cells need none
    candidates = [p for p, c in enumerate(cells) if p != pos and c[1] != failed_node]
    found = _min_partners(desc, group, cells, _unit(len(cells), pos), [pos], candidates, [])
    return None if found is None else tuple(cells[p] for p in found)


def plan_repair(desc, t: int) -> RepairPlan:
    if not 0 <= t < desc.n:
        raise ValueError(f"node {t} out of range")
    s = major_row(desc, t)
    alpha, k = desc.alpha, desc.k

    costs = {}
    for j in range(desc.n):
        if j == t:
            continue
        partners = decoupling_partners(desc, (s, j), t)
        if partners is not None:
            costs[j] = partners
    if len(costs) < k:  # pragma: no cover - n - alpha >= k guarantees enough
        raise RepairError(f"only {len(costs)} eligible helpers in row {s}")
    chosen = sorted(costs, key=lambda j: (len(costs[j]), j))[:k]
    s1 = tuple((s, j) for j in sorted(chosen))
    downloaded = set(s1)
    s2 = []
    raw = len(s1)
    for cell in s1:
        raw += len(costs[cell[1]])
        for p in costs[cell[1]]:
            if p not in downloaded:
                downloaded.add(p)
                s2.append(p)

    s3 = []
    for i in range(alpha):
        if i == s:
            continue
        group, cells = desc.group_of_cell((i, t))
        pos = cells.index((i, t))
        known_b = [p for p, c in enumerate(cells) if c[0] == s]
        candidates = [p for p, c in enumerate(cells) if c[1] != t]
        target = group.forward_matrix()[pos]
        found = _min_partners(desc, group, cells, target, [], candidates, known_b, prefer=downloaded)
        if found is None:  # pragma: no cover - thetas outside {0, 1} make every group solvable
            raise RepairError(f"cannot rebuild {(i, t)} from its group")
        raw += len(found)
        for p in found:
            c = cells[p]
            if c not in downloaded:
                downloaded.add(c)
                s3.append(c)
    return RepairPlan(t, s, s1, tuple(s2), tuple(s3), raw)


def _read(columns, cell):
    row, node = cell
    try:
        return np.asarray(columns[node][row], dtype=np.int64)
    except (KeyError, IndexError) as exc:
        raise RepairError(f"missing coordinate row={row} node={node}") from exc


def _solve_in_group(desc, group, cells, target, values, known_b):
    """Evaluate functional ``target`` from downloaded values and known b's."""
    xs = [p for p, c in enumerate(cells) if c in values]
    bs = sorted(known_b)
    rows = _knowledge(group, xs, bs)
    coeffs = span_coefficients(desc.field, rows, target)
    if coeffs is None:
        raise RepairError(f"group {cells} is not solvable from the downloaded symbols")
    operands = [values[cells[p]] for p in xs] + [known_b[p] for p in bs]
    return desc.field.vdot(coeffs, np.stack(operands)) if operands else 0


def execute_repair(desc, plan: RepairPlan, columns):
    """Rebuild the failed node's alpha symbols.

    ``columns`` maps node -> sequence of alpha symbols; only the planned
    coordinates are read.  Symbols may be arrays (one entry per stripe).
    Returns an array of shape ``(alpha, ...)``.
    """
    t, s = plan.failed_node, plan.major_row
    values = {cell: _read(columns, cell) for cell in plan.downloads}

    # strip coupling from S1
    originals = {}
    for cell in plan.s1:
        group, cells = desc.group_of_cell(cell)
        pos = cells.index(cell)
        originals[cell[1]] = _solve_in_group(desc, group, cells, _unit(len(cells), pos), values, {})

    # decode the major row
    rs = desc.rs
    helpers = sorted(originals)
    inv = gf_inverse(desc.field, [rs.column(j) for j in helpers])
    data = desc.field.matmul(inv, np.stack([originals[j] for j in helpers]))
    gen_t = [list(col) for col in zip(*rs.generator)]
    row_s = desc.field.matmul(gen_t, data)

    out = [None] * desc.alpha
    for i in range(desc.alpha):
        cell = (i, t)
        if i == s:
            out[i] = row_s[t]
            continue
        group, cells = desc.group_of_cell(cell)
        pos = cells.index(cell)
        known_b = {p: row_s[c[1]] for p, c in enumerate(cells) if c[0] == s}
        out[i] = _solve_in_group(desc, group, cells, group.forward_matrix()[pos], values, known_b)
    return np.stack(out)


def measure_bandwidth(desc) -> BandwidthReport:
    plans = [plan_repair(desc, t) for t in range(desc.n)]
    p = desc.params
    return BandwidthReport(
        p.n, p.k, p.alpha, p.mode,
        tuple(pl.total_downloads for pl in plans),
        tuple(pl.raw_downloads for pl in plans),
    )


def repair_region(desc, t):
    """Region label (A, B1, B2, C) of each symbol of node t, by row."""
    plan, _, local = desc.locate(t)
    return [plan.geometry.region((i, local)) for i in range(desc.alpha)]

