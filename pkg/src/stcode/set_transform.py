"""Set transformation of an alpha x beta array (alpha <= beta < 2*alpha).

Cells are addressed as 0-based ``(row, col)`` pairs.  With ``a = 2*alpha - beta``
the array splits into regions::

    A  = rows [0, a)      x cols [0, a)          singleton sets
    B1 = rows [0, a)      x cols [a, beta)       two-cell sets
    B2 = rows [a, alpha)  x cols [0, a)          singleton sets
    C  = rows [a, alpha)  x cols [a, beta)       two-cell sets

Set ``(i, j)`` holds column ``j`` when ``j < a``, otherwise columns
``a + 2*(j - a)`` and ``a + 2*(j - a) + 1`` of row ``i``.  Sets ``(i, j)`` and
``(j, i)`` are coupled; diagonal sets stay untouched.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .galois import GF, gf_inverse


class GeometryError(ValueError):
    pass


class ThetaDomainError(ValueError):
    pass


class GroupKind(str, enum.Enum):
    IDENTITY = "identity"
    PAIR2 = "pair2"
    TRIPLE3 = "triple3"


@dataclass(frozen=True)
class SubArrayGeometry:
    alpha: int
    beta: int

    def __post_init__(self):
        if not (1 <= self.alpha <= self.beta < 2 * self.alpha):
            raise GeometryError(f"need alpha <= beta < 2*alpha, got ({self.alpha}, {self.beta})")

    @property
    def a_cols(self):
        return 2 * self.alpha - self.beta

    @property
    def extra(self):
        """beta - alpha: number of two-cell set columns."""
        return self.beta - self.alpha

    def region(self, cell):
        row, col = cell
        upper, left = row < self.a_cols, col < self.a_cols
        if upper:
            return "A" if left else "B1"
        return "B2" if left else "C"

    def set_columns(self, j):
        a = self.a_cols
        if j < a:
            return (j,)
        base = a + 2 * (j - a)
        return (base, base + 1)

    def set_of_column(self, col):
        """Index j of the sets that own column ``col``."""
        a = self.a_cols
        return col if col < a else a + (col - a) // 2


@dataclass(frozen=True)
class SetAllocation:
    geometry: SubArrayGeometry
    sets: dict  # (i, j) -> tuple of cells

    def cells(self, i, j):
        return self.sets[(i, j)]


@dataclass(frozen=True)
class CouplingGroup:
    """Cells mixed together by one forward map ``x = M b``.

    PAIR2 cells are (upper, lower): x_u = b_u + b_v, x_v = b_v + theta*b_u.
    TRIPLE3 cells are (B1 coupled, B1 original, B2):
    x_1 = b_1 + b_3, x_2 = b_2, x_3 = b_3 + theta*(b_1 + b_2).
    """

    kind: GroupKind
    cells: tuple
    theta: int = 0

    def forward_matrix(self):
        t = self.theta
        if self.kind is GroupKind.PAIR2:
            return [[1, 1], [t, 1]]
        if self.kind is GroupKind.TRIPLE3:
            return [[1, 0, 1], [0, 1, 0], [t, t, 1]]
        size = len(self.cells)
        return [[int(i == j) for j in range(size)] for i in range(size)]


@dataclass(frozen=True)
class CouplingPlan:
    geometry: SubArrayGeometry
    groups: tuple
    allocation: SetAllocation

    @cached_property
    def group_of(self):
        """Map cell -> (group index, position within the group)."""
        out = {}
        for g, group in enumerate(self.groups):
            for pos, cell in enumerate(group.cells):
                out[cell] = (g, pos)
        return out

    def count(self, kind):
        return sum(1 for g in self.groups if g.kind is kind)

    @property
    def thetas(self):
        return [g.theta for g in self.groups if g.kind is not GroupKind.IDENTITY]


def allocate_sets(alpha: int, beta: int) -> SetAllocation:
    geom = SubArrayGeometry(alpha, beta)
    sets = {}
    for i in range(alpha):
        for j in range(alpha):
            sets[(i, j)] = tuple((i, c) for c in geom.set_columns(j))
    return SetAllocation(geom, sets)


def _skeleton(alloc: SetAllocation):
    geom = alloc.geometry
    a, alpha = geom.a_cols, geom.alpha
    groups = []
    for i in range(alpha):
        groups.append((GroupKind.IDENTITY, alloc.cells(i, i)))
    for i, j in combinations(range(alpha), 2):
        upper, lower = alloc.cells(i, j), alloc.cells(j, i)
        if j < a:
            groups.append((GroupKind.PAIR2, (upper[0], lower[0])))
        elif i < a:
            # upper in B1 (two cells), lower in B2 (one cell)
            groups.append((GroupKind.TRIPLE3, (upper[0], upper[1], lower[0])))
        else:
            for u, v in zip(upper, lower):
                groups.append((GroupKind.PAIR2, (u, v)))
    groups.sort(key=lambda g: g[1][0])
    return groups


def build_plan(alpha: int, beta: int, theta_source) -> CouplingPlan:
    """Couple every off-diagonal set pair.

    ``theta_source`` is an iterator of coefficients; one value is drawn per
    coupling group in canonical (row-major by first cell) order.
    """
    alloc = allocate_sets(alpha, beta)
    groups = []
    for kind, cells in _skeleton(alloc):
        theta = 0
        if kind is not GroupKind.IDENTITY:
            theta = int(next(theta_source))
            if theta in (0, 1):
                raise ThetaDomainError(f"theta must avoid 0 and 1, got {theta}")
        groups.append(CouplingGroup(kind, cells, theta))
    return CouplingPlan(alloc.geometry, tuple(groups), alloc)


def _check_shape(plan, grid):
    grid = np.asarray(grid, dtype=np.int64)
    g = plan.geometry
    if grid.shape[:2] != (g.alpha, g.beta):
        raise GeometryError(f"grid shape {grid.shape[:2]} does not match plan ({g.alpha}, {g.beta})")
    return grid


def _apply_maps(field, plan, grid, maps):
    out = grid.copy()
    for group, m in zip(plan.groups, maps):
        if group.kind is GroupKind.IDENTITY:
            continue
        src = np.stack([grid[c] for c in group.cells])
        for cell, row in zip(group.cells, m):
            out[cell] = field.vdot(row, src)
    return out


def apply_transform(field: GF, plan: CouplingPlan, src):
    """Forward coupling.  Extra trailing axes (e.g. stripes) are carried along."""
    grid = _check_shape(plan, src)
    return _apply_maps(field, plan, grid, [g.forward_matrix() for g in plan.groups])


def invert_transform(field: GF, plan: CouplingPlan, dst):
    grid = _check_shape(plan, dst)
    return _apply_maps(field, plan, grid, [gf_inverse(field, g.forward_matrix()) for g in plan.groups])


def split_wide(alpha: int, beta: int) -> list[tuple[int, int]]:
    """Cut an alpha x beta array with beta >= 2*alpha into supported widths."""
    if beta < 2 * alpha:
        raise GeometryError(f"split_wide needs beta >= 2*alpha, got ({alpha}, {beta})")
    rem = beta % alpha
    if rem == 0:
        return [(alpha, alpha)] * (beta // alpha)
    return [(alpha, alpha)] * (-(-beta // alpha) - 2) + [(alpha, alpha + rem)]
