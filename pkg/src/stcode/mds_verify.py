"""Constructive MDS check: every k-node restriction of the global map must be invertible.

A set S of k nodes decodes exactly when the parity-check columns of the
other n - k nodes are independent, so each subset is tested on whichever
square matrix is smaller.  Subsets are tested in batches.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, islice
from math import comb

import numpy as np

from .galois import batch_nonsingular, null_space, transpose

BATCH = 2048


@dataclass(frozen=True)
class MdsVerdict:
    ok: bool
    failing_subset: tuple | None
    checked: int
    exhaustive: bool


def build_global_matrix(desc):
    """(n*alpha) x (k*alpha) matrix; row j*alpha + i gives stored symbol x[i, j]."""
    from .st_code import st_encode

    ka = desc.k * desc.alpha
    stored = st_encode(desc, np.eye(ka, dtype=np.int64))  # (alpha, n, ka)
    return [list(map(int, row)) for row in stored.transpose(1, 0, 2).reshape(desc.n * desc.alpha, ka)]


class _SubsetTester:
    def __init__(self, desc):
        self.field = desc.field
        self.n, self.k, self.alpha = desc.n, desc.k, desc.alpha
        g = desc.global_matrix
        # rows grouped per node: (n, alpha, k*alpha)
        self.dual = self.n - self.k < self.k
        if self.dual:
            h = np.array(null_space(desc.field, transpose(g)), dtype=np.int64)  # (r*alpha, n*alpha)
            self.blocks = h.T.reshape(self.n, self.alpha, -1)
        else:
            self.blocks = np.array(g, dtype=np.int64).reshape(self.n, self.alpha, -1)

    def check(self, subsets) -> np.ndarray:
        """Invertibility flag for each k-subset in ``subsets``."""
        subsets = np.asarray(subsets, dtype=np.int64).reshape(-1, self.k)
        if self.dual:
            mask = np.ones((len(subsets), self.n), dtype=bool)
            np.put_along_axis(mask, subsets, False, axis=1)
            nodes = np.nonzero(mask)[1].reshape(len(subsets), self.n - self.k)
        else:
            nodes = subsets
        mats = self.blocks[nodes].reshape(len(subsets), -1, self.blocks.shape[2])
        return batch_nonsingular(self.field, mats)


def subset_invertible(desc, nodes) -> bool:
    """Whether the stored symbols of ``nodes`` determine all data symbols."""
    nodes = sorted(set(nodes))
    if len(nodes) != desc.k:
        raise ValueError(f"expected {desc.k} distinct nodes, got {nodes}")
    return bool(_SubsetTester(desc).check([nodes])[0])


def _first_failure(tester, subsets, offset):
    ok = tester.check(subsets)
    if ok.all():
        return None
    i = int(np.argmin(ok))
    return tuple(int(x) for x in subsets[i]), offset + i + 1


def verify_mds(desc, exhaustive_limit: int = 10**6, seed: int = 0) -> MdsVerdict:
    """Check every k-subset (or a seeded sample of ``exhaustive_limit`` of them).

    Exhaustive runs go in lexicographic order, so a reported failure is the
    lexicographically first failing subset.
    """
    tester = _SubsetTester(desc)
    total = comb(desc.n, desc.k)
    exhaustive = total <= exhaustive_limit
    if exhaustive:
        it = combinations(range(desc.n), desc.k)
        chunks = iter(lambda: list(islice(it, BATCH)), [])
    else:
        rng = np.random.default_rng(seed)
        sample = [sorted(rng.choice(desc.n, size=desc.k, replace=False)) for _ in range(exhaustive_limit)]
        chunks = (sample[i:i + BATCH] for i in range(0, len(sample), BATCH))
    checked = 0
    for chunk in chunks:
        failure = _first_failure(tester, np.array(chunk, dtype=np.int64), checked)
        if failure:
            return MdsVerdict(False, failure[0], failure[1], exhaustive)
        checked += len(chunk)
    return MdsVerdict(True, None, checked, exhaustive)
