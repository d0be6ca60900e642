"""ST-RS(n, k, alpha): alpha stacked RS rows, column-partitioned and set-transformed.

Stored arrays are numpy ``int64`` arrays of shape ``(alpha, n, ...)``; column
``j`` is node ``j`` (0-based).  Any trailing axes (stripes) ride along.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field, replace
from functools import cached_property, lru_cache

import numpy as np

from . import galois
from .galois import GF, gf_inverse
from .rs_base import RsCode, rs_make
from .set_transform import CouplingPlan, GroupKind, apply_transform, build_plan, invert_transform

log = logging.getLogger(__name__)

MODES = ("kr", "n")
MAX_RETRIES = 32
EXHAUSTIVE_LIMIT = 10**6


class ParameterError(ValueError):
    pass


class VerificationExhaustedError(RuntimeError):
    pass


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    alpha: int
    w: int = 8
    mode: str = "kr"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"partition mode must be one of {MODES}, got {self.mode!r}")
        if not 1 <= self.k < self.n:
            raise ParameterError(f"need 1 <= k < n, got n={self.n} k={self.k}")
        if not 2 <= self.alpha <= self.r:
            raise ParameterError(f"need 2 <= alpha <= r={self.r}, got alpha={self.alpha}")
        if self.mode == "kr" and self.k < self.alpha:
            raise ParameterError("mode kr needs k >= alpha")
        if self.w not in galois.DEFAULT_MODULI:
            raise ParameterError(f"unsupported field width {self.w}")
        if self.n > 1 << self.w:
            raise ParameterError(f"n={self.n} exceeds the field order 2^{self.w}")
        if not 0 <= self.seed < 1 << 64:
            raise ParameterError("seed must fit in 64 bits")

    @property
    def r(self):
        return self.n - self.k

    @property
    def field(self) -> GF:
        return galois.field(self.w)


@dataclass(frozen=True)
class ColumnPartition:
    pieces: tuple  # (start column, width)

    @property
    def widths(self):
        return [w for _, w in self.pieces]

    def locate(self, col):
        """(piece index, local column) of a global column."""
        for idx, (start, width) in enumerate(self.pieces):
            if start <= col < start + width:
                return idx, col - start
        raise IndexError(f"column {col} outside partition")


def _split(total, alpha):
    count = total // alpha
    return [alpha] * (count - 1) + [total - (count - 1) * alpha]


def column_partition(params: CodeParams) -> ColumnPartition:
    if params.mode == "kr":
        widths = _split(params.k, params.alpha) + _split(params.r, params.alpha)
    else:
        widths = _split(params.n, params.alpha)
    pieces, start = [], 0
    for w in widths:
        pieces.append((start, w))
        start += w
    return ColumnPartition(tuple(pieces))


def theta_stream(params: CodeParams, attempt: int):
    """Endless seeded stream of coefficients from F_q minus {0, 1}."""
    rng = np.random.default_rng([params.seed, attempt])
    q = 1 << params.w
    while True:
        yield from (int(x) for x in rng.integers(2, q, size=64))


@dataclass(frozen=True)
class CodeDescriptor:
    params: CodeParams
    rs: RsCode
    partition: ColumnPartition
    plans: tuple
    attempt: int = 0
    verified: bool = False
    verdict: object = dc_field(default=None, compare=False)

    @property
    def field(self) -> GF:
        return self.rs.field

    @property
    def n(self):
        return self.params.n

    @property
    def k(self):
        return self.params.k

    @property
    def alpha(self):
        return self.params.alpha

    def locate(self, col):
        """(plan, start column, local column) for a global column."""
        idx, local = self.partition.locate(col)
        return self.plans[idx], self.partition.pieces[idx][0], local

    def group_of_cell(self, cell):
        """Coupling group holding a global (row, col) cell, with global member cells."""
        row, col = cell
        plan, start, local = self.locate(col)
        g, _ = plan.group_of[(row, local)]
        group = plan.groups[g]
        return group, tuple((r, c + start) for r, c in group.cells)

    @cached_property
    def global_matrix(self):
        from .mds_verify import build_global_matrix

        return build_global_matrix(self)


def assemble(params: CodeParams, attempt: int = 0) -> CodeDescriptor:
    """Descriptor for one theta draw, without any MDS check."""
    gf = params.field
    rs = rs_make(params.n, params.k, gf)
    part = column_partition(params)
    thetas = theta_stream(params, attempt)
    plans = tuple(build_plan(params.alpha, width, thetas) for width in part.widths)
    return CodeDescriptor(params, rs, part, plans, attempt)


@lru_cache(maxsize=64)
def build_code(params: CodeParams, verify: bool = True, exhaustive_limit: int = EXHAUSTIVE_LIMIT,
               max_retries: int = MAX_RETRIES) -> CodeDescriptor:
    """Draw thetas until the global code passes MDS verification.

    ``verified`` is set only when every k-subset was checked.  With
    ``verify=False`` the first draw is returned unchecked.  Results are
    memoized per argument tuple since the draw is deterministic.
    """
    from .mds_verify import verify_mds

    if not verify:
        return assemble(params)
    last = None
    for attempt in range(max_retries):
        desc = assemble(params, attempt)
        verdict = verify_mds(desc, exhaustive_limit)
        if verdict.ok:
            return replace(desc, verified=verdict.exhaustive, verdict=verdict)
        log.info("attempt %d failed on subset %s", attempt, verdict.failing_subset)
        last = verdict
    raise VerificationExhaustedError(
        f"no MDS theta assignment found in {max_retries} draws for {params}; "
        f"last failing subset {last.failing_subset}; the field is likely too small"
    )


def _as_grid(desc, data):
    data = np.asarray(data, dtype=np.int64)
    ka = desc.k * desc.alpha
    if data.shape[:1] != (ka,):
        raise ValueError(f"expected {ka} data symbols, got {data.shape[:1]}")
    return data.reshape((desc.alpha, desc.k) + data.shape[1:])


def rs_rows(desc: CodeDescriptor, data):
    """The alpha untransformed RS codewords as an (alpha, n, ...) array."""
    rows = _as_grid(desc, data)
    gen_t = [list(col) for col in zip(*desc.rs.generator)]
    return np.stack([desc.field.matmul(gen_t, row) for row in rows])


def transform_columns(desc, grid, inverse=False):
    op = invert_transform if inverse else apply_transform
    out = np.array(grid, dtype=np.int64, copy=True)
    for plan, (start, width) in zip(desc.plans, desc.partition.pieces):
        out[:, start:start + width] = op(desc.field, plan, out[:, start:start + width])
    return out


def st_encode(desc: CodeDescriptor, data):
    """Data laid out row-major over (row, data column) -> stored (alpha, n, ...) array."""
    return transform_columns(desc, rs_rows(desc, data))


def st_decode(desc: CodeDescriptor, columns):
    """Recover the k*alpha data symbols from any k stored columns.

    ``columns`` maps node index -> its alpha symbols (each may carry
    trailing stripe axes).
    """
    nodes = sorted(columns)
    if len(nodes) != desc.k:
        raise ValueError(f"need exactly {desc.k} nodes, got {len(nodes)}")
    m = desc.global_matrix
    alpha = desc.alpha
    rows = [m[j * alpha + i] for j in nodes for i in range(alpha)]
    inv = gf_inverse(desc.field, rows)
    stacked = np.stack([np.asarray(columns[j][i], dtype=np.int64) for j in nodes for i in range(alpha)])
    return desc.field.matmul(inv, stacked)


def with_unit_theta(desc: CodeDescriptor) -> CodeDescriptor:
    """Test hook: copy with the first coupling coefficient forced to 1."""
    plans = list(desc.plans)
    for idx, plan in enumerate(plans):
        for g, group in enumerate(plan.groups):
            if group.kind is not GroupKind.IDENTITY:
                groups = list(plan.groups)
                groups[g] = replace(group, theta=1)
                plans[idx] = CouplingPlan(plan.geometry, tuple(groups), plan.allocation)
                return replace(desc, plans=tuple(plans), verified=False, verdict=None)
    raise ValueError("descriptor has no coupling groups")
