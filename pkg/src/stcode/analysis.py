"""Closed-form repair and field-size bounds for ST-RS codes and the ET-RS baseline."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb


def _ceil_div(a, b):
    return -(-a // b)


def theorem1_lower_bound(n: int, k: int, alpha: int) -> int:
    """Repair-bandwidth lower bound (symbols) under the floor(n/alpha) partition."""
    blocks, rem = divmod(n, alpha)
    if k <= blocks - 1 + rem:
        return k + alpha - 1
    return 2 * k - blocks - rem + alpha


def theorem2_field_bound(n: int, k: int, alpha: int) -> int:
    """Field size above which MDS theta values are guaranteed to exist."""
    return comb(n - 1, k - 1) - comb(_ceil_div(n, alpha) - 1, _ceil_div(k, alpha) - 1)


def cutset_ratio(n: int, k: int) -> Fraction:
    """MSR repair bandwidth over the k*alpha data symbols: (n-1)/(k(n-k))."""
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n} k={k}")
    return Fraction(n - 1, k * (n - k))


def et_rs_node_lower_bound(n: int, k: int, alpha: int) -> int:
    """Per-node ET-RS repair lower bound: k helpers, their partners, alpha-1 more."""
    uncoupled = n // alpha - 1
    return k + max(0, k - uncoupled) + alpha - 1


def lemma1_designated_nodes(n: int, k: int, alpha: int) -> list[int]:
    """0-based nodes with a guaranteed ST-RS advantage of n mod alpha.

    These are the first alpha - (n mod alpha) columns of each of the
    floor(n/alpha) transformed arrays of the mode-N partition.
    """
    blocks, rem = divmod(n, alpha)
    per_block = alpha - rem
    return [b * alpha + c for b in range(blocks) for c in range(per_block)]


def guaranteed_gap(n: int, alpha: int) -> int:
    return n % alpha


# Published comparison columns (ratios), keyed by (n, k, alpha).
REFERENCE_RATIOS = {
    (10, 7, 3): {"et_rs": 0.723, "htec": 0.685, "st_rs": 0.657, "cutset": 0.428},
    (14, 10, 4): {"et_rs": 0.553, "htec": 0.601, "st_rs": 0.517, "cutset": 0.325},
    (17, 13, 4): {"et_rs": 0.542, "htec": 0.572, "st_rs": 0.497, "cutset": 0.307},
    (22, 18, 4): {"et_rs": 0.501, "htec": 0.541, "st_rs": 0.481, "cutset": 0.291},
    (29, 25, 4): {"et_rs": 0.490, "htec": 0.515, "st_rs": 0.468, "cutset": 0.280},
}


@dataclass(frozen=True)
class BoundsRow:
    n: int
    k: int
    alpha: int
    theorem1_bound: int
    theorem2_bound: int
    cutset_ratio: Fraction
    et_node_bound: int
    lemma1_nodes: tuple
    guaranteed_gap: int

    def as_dict(self):
        return {
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "theorem1_bound": self.theorem1_bound,
            "theorem2_bound": self.theorem2_bound,
            "cutset_ratio": str(self.cutset_ratio),
            "cutset_percent": percent(self.cutset_ratio),
            "et_node_bound": self.et_node_bound,
            "lemma1_nodes": list(self.lemma1_nodes),
            "guaranteed_gap": self.guaranteed_gap,
        }


def bounds_row(n: int, k: int, alpha: int) -> BoundsRow:
    return BoundsRow(
        n, k, alpha,
        theorem1_lower_bound(n, k, alpha),
        theorem2_field_bound(n, k, alpha),
        cutset_ratio(n, k),
        et_rs_node_lower_bound(n, k, alpha),
        tuple(lemma1_designated_nodes(n, k, alpha)),
        guaranteed_gap(n, alpha),
    )


def percent(ratio) -> str:
    """Render a ratio as a percentage truncated to one decimal: 9/21 -> '42.8%'."""
    tenths = int(Fraction(ratio) * 1000)
    return f"{tenths // 10}.{tenths % 10}%"
