"""Analytic re-evaluation cost of extreme tree shapes.

All costs are per instance (n factored out) and measured in node-instance
checks. Three shapes are covered:

* complete: every level 0..k full, instances spread evenly over the 2^k leaves;
* linear: one internal node and one leaf per level, two leaves at level k,
  n/(k+1) instances per leaf;
* weighted linear: as linear, but the leaf at level i holds n/2^i instances
  (both bottom leaves hold n/2^k, so the shares sum to exactly 1).

A ratio R is the expected cost of re-evaluating after a change at a uniformly
chosen node, divided by the cost of a full evaluation. "Pessimistic" costs
route the stale node's instances from the root; "refined" costs route them
from the stale node itself, which is what :mod:`evotree.inherit` does.

Every closed form or bound has an exact-summation twin computed in rational
arithmetic; public functions return floats unless noted.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

MAX_K = 64

Q = Fraction


def _check_k(k: int, lo: int, cap: bool = True) -> None:
    if not isinstance(k, int) or k < lo:
        raise ValueError(f"k must be an integer >= {lo}, got {k!r}")
    if cap and k > MAX_K:
        raise ValueError(f"k must be <= {MAX_K} for summation variants, got {k}")


def _check_level(i: int, k: int) -> None:
    _check_k(k, 1, cap=False)
    if not 1 <= i <= k:
        raise ValueError(f"level i must lie in [1..{k}], got {i}")


# -- complete tree ------------------------------------------------------------

def r_complete(k: int) -> float:
    """Pessimistic ratio for the complete tree, closed form (k+1)/(2^(k+1)-1)."""
    _check_k(k, 0, cap=False)
    return (k + 1) / ((1 << (k + 1)) - 1)


def r_complete_sum(k: int) -> Fraction:
    """Sum over levels of P(level i) * 1/2^i."""
    _check_k(k, 0)
    total = (1 << (k + 1)) - 1
    return sum((Q(1 << i, total) * Q(1, 1 << i) for i in range(k + 1)), Q(0))


def r_complete_refined_sum(k: int) -> Fraction:
    """Sum over levels of P(level i) * (k-i+1)/(2^i (k+1))."""
    _check_k(k, 0)
    total = (1 << (k + 1)) - 1
    return sum((Q(1 << i, total) * Q(k - i + 1, (1 << i) * (k + 1)) for i in range(k + 1)), Q(0))


def r_complete_refined(k: int) -> float:
    """Refined ratio for the complete tree, closed form (k+2)/(2^(k+2)-2)."""
    _check_k(k, 0, cap=False)
    return (k + 2) / ((1 << (k + 2)) - 2)


# -- linear tree --------------------------------------------------------------

def cost0_linear(k: int) -> Fraction:
    """Full-evaluation cost: 1 + k/(k+1) + k/2."""
    _check_k(k, 1, cap=False)
    return 1 + Q(k, k + 1) + Q(k, 2)


def cost0_linear_sum(k: int) -> Fraction:
    """Full-evaluation cost by enumerating leaves: a leaf at level i costs i+1
    per instance, the extra bottom leaf k+1; each leaf holds 1/(k+1)."""
    _check_k(k, 1, cap=False)
    depths = list(range(1, k + 1)) + [k]
    return sum((Q(d + 1, k + 1) for d in depths), Q(0))


def coverage_linear(i: int, k: int) -> Fraction:
    """Share of instances passing through the internal node at level i."""
    return Q(k - i + 1, k + 1)


def cost_leaf_linear(i: int, k: int) -> Fraction:
    """Re-evaluating the level-i leaf from the root: (i+1)/(k+1)."""
    _check_level(i, k)
    return Q(i + 1, k + 1)


def cost_node_linear(i: int, k: int, refined: bool = False, as_printed: bool = False) -> Fraction:
    """Re-evaluating below the internal node at level i.

    The subtree under the node is itself a linear tree of depth k-i holding the
    node's coverage c; evaluating it costs c * cost0_linear(k-i). The
    pessimistic variant adds the i checks each covered instance spends reaching
    the node. At i = k the "subtree" is the bottom pair of leaves, so the
    subtree term falls back to the bottom-leaf cost.

    ``as_printed`` returns the textbook expression instead, where the subtree
    term is not scaled by coverage and the approach term is i(i+1)/(k+1).
    """
    _check_level(i, k)
    sub = k - i
    base = 1 + Q(sub, sub + 1) + Q(sub, 2)
    if as_printed:
        return base if refined else base + Q(i * (i + 1), k + 1)
    c = coverage_linear(i, k)
    return c * base if refined else c * base + c * i


def _r_linear(k: int, node_cost) -> Fraction:
    c0 = cost0_linear(k)
    leaves = sum((cost_leaf_linear(i, k) for i in range(1, k + 1)), Q(0))
    nodes = sum((node_cost(i, k) for i in range(1, k + 1)), Q(0))
    return (1 + leaves / c0 + nodes / c0) / (2 * k + 1)


def r_linear_exact(k: int, as_printed: bool = False) -> float:
    """Pessimistic linear ratio by direct summation over all 2k+1 nodes."""
    _check_k(k, 1)
    return float(_r_linear(k, lambda i, kk: cost_node_linear(i, kk, as_printed=as_printed)))


def r_linear_trapezoid(k: int, as_printed: bool = False) -> Fraction:
    """Sum of per-level costs replaced by k times the mean of its end terms."""
    _check_k(k, 1, cap=False)
    c0 = cost0_linear(k)
    leaf = (cost_leaf_linear(1, k) + cost_leaf_linear(k, k)) / c0 * Q(k, 2)
    node = (cost_node_linear(1, k, as_printed=as_printed)
            + cost_node_linear(k, k, as_printed=as_printed)) / c0 * Q(k, 2)
    return (1 + leaf + node) / (2 * k + 1)


def r_linear_bound(k: int) -> float:
    """Closed bound (3k+1)/(4k+2) on the pessimistic linear ratio."""
    _check_k(k, 1, cap=False)
    return (3 * k + 1) / (4 * k + 2)


def r_linear_est(k: int, as_printed: bool = False) -> tuple[float, float]:
    """(trapezoid estimate, closed bound) for the pessimistic linear ratio."""
    return float(r_linear_trapezoid(k, as_printed)), r_linear_bound(k)


def r_linear_est_expanded(k: int) -> Fraction:
    """The intermediate rational form of the trapezoid estimate, reproduced
    term by term as it is usually written out before relaxing to the bound."""
    _check_k(k, 1, cap=False)
    d = k * k + 5 * k + 2
    return (Q(1, 2 * k + 1) + Q(1, 2 * k + 1) * Q(k * k + 3 * k, d)
            + Q(1, 2 * k + 1) * Q(3 * k ** 3 + 8 * k * k - k - 2, 2 * d))


def r_linear_refined_exact(k: int, as_printed: bool = False) -> float:
    """Linear ratio with refined node costs (leaves still routed from the root)."""
    _check_k(k, 1)
    return float(_r_linear(k, lambda i, kk: cost_node_linear(i, kk, True, as_printed)))


def r_linear_refined_bound(k: int) -> float:
    """Closed bound (k+5)/(4k+2) on the refined linear ratio."""
    _check_k(k, 1, cap=False)
    return (k + 5) / (4 * k + 2)


# -- weighted linear tree -----------------------------------------------------

def weighted_cost0_sum(k: int) -> Fraction:
    """(k+1)/2^k for one bottom leaf plus (i+1)/2^i for the leaf at each level."""
    _check_k(k, 0, cap=False)
    return Q(k + 1, 1 << k) + sum((Q(i + 1, 1 << i) for i in range(1, k + 1)), Q(0))


def weighted_cost0_bound(k: int) -> float:
    _check_k(k, 1, cap=False)
    return (k + 1) / (1 << k) + k + 2


def weighted_cost_leaf(i: int, k: int) -> Fraction:
    """Leaf-level term used by the weighted analysis: (k-i+1)/2^i."""
    _check_level(i, k)
    return Q(k - i + 1, 1 << i)


def weighted_cost_node(i: int, k: int) -> Fraction:
    """Refined cost below the level-i node: its share 1/2^i evaluated through
    the weighted tree of depth k-i that hangs from it."""
    _check_level(i, k)
    return Q(1, 1 << i) * weighted_cost0_sum(k - i)


def weighted_r_sum(k: int) -> Fraction:
    _check_k(k, 1)
    c0 = weighted_cost0_sum(k)
    leaves = sum((weighted_cost_leaf(i, k) for i in range(1, k + 1)), Q(0))
    nodes = sum((weighted_cost_node(i, k) for i in range(1, k + 1)), Q(0))
    return (1 + leaves / c0 + nodes / c0) / (2 * k + 1)


def weighted_r_bound(k: int) -> float:
    """Closed bound (k+5)/(2k+1)."""
    _check_k(k, 1, cap=False)
    return (k + 5) / (2 * k + 1)


def weighted_linear(k: int) -> tuple[float, float, float, float]:
    """(cost0 exact, cost0 bound, R exact, R bound)."""
    _check_k(k, 1)
    return (float(weighted_cost0_sum(k)), weighted_cost0_bound(k),
            float(weighted_r_sum(k)), weighted_r_bound(k))


def weighted_shares(k: int) -> list[Fraction]:
    """Instance share of each leaf, top to bottom (two bottom leaves)."""
    _check_k(k, 1, cap=False)
    return [Q(1, 1 << i) for i in range(1, k + 1)] + [Q(1, 1 << k)]


# -- curves -------------------------------------------------------------------

SHAPES = ("complete", "linear", "weighted")
VARIANTS = ("exact", "bound", "refined")


@dataclass
class RatioCurve:
    """Rows of (k, value per column), serialisable as CSV."""

    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("k",) + self.columns)
        for r in self.rows:
            w.writerow([r[0]] + [repr(float(v)) for v in r[1:]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RatioCurve":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if not header or header[0] != "k":
            raise ValueError("first column must be k")
        rows = [(int(r[0]),) + tuple(float(v) for v in r[1:]) for r in reader if r]
        return cls(tuple(header[1:]), rows)


def _columns(shape: str, variant: str) -> list[tuple[str, callable]]:
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}")
    wanted = VARIANTS if variant == "all" else (variant,)
    for v in wanted:
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
    table = {
        "complete": {
            "exact": [("exact", lambda k: float(r_complete_sum(k)))],
            "bound": [("closed_form", r_complete)],
            "refined": [("refined_exact", lambda k: float(r_complete_refined_sum(k))),
                        ("refined_closed_form", r_complete_refined)],
        },
        "linear": {
            "exact": [("exact", r_linear_exact)],
            "bound": [("trapezoid", lambda k: r_linear_est(k)[0]), ("bound", r_linear_bound)],
            "refined": [("refined_exact", r_linear_refined_exact),
                        ("refined_bound", r_linear_refined_bound)],
        },
        # the weighted analysis already uses refined costs, so "refined" and
        # "exact" name the same quantity there
        "weighted": {
            "exact": [("exact", lambda k: float(weighted_r_sum(k)))],
            "bound": [("bound", weighted_r_bound)],
            "refined": [("refined_exact", lambda k: float(weighted_r_sum(k)))],
        },
    }[shape]
    return [col for v in wanted for col in table[v]]


def ratio_curve(shape: str, k_min: int, k_max: int, variant: str = "all") -> RatioCurve:
    """One row per k in [k_min..k_max] with the requested ratio columns."""
    lo = 0 if shape == "complete" else 1
    _check_k(k_min, lo)
    _check_k(k_max, lo)
    if k_min > k_max:
        raise ValueError("k_min must not exceed k_max")
    cols = _columns(shape, variant)
    rows = [(k,) + tuple(f(k) for _, f in cols) for k in range(k_min, k_max + 1)]
    return RatioCurve(tuple(name for name, _ in cols), rows)


def fig5_table(k_min: int, k_max: int) -> RatioCurve:
    """Refined savings 1-R for the complete tree and the linear-tree bound."""
    _check_k(k_min, 1)
    _check_k(k_max, 1)
    if k_min > k_max:
        raise ValueError("k_min must not exceed k_max")
    rows = [(k, 1 - r_complete_refined(k), 1 - r_linear_refined_bound(k))
            for k in range(k_min, k_max + 1)]
    return RatioCurve(("complete_refined_savings", "linear_refined_bound_savings"), rows)


def dominated(bound, exact, ks: Iterable[int]) -> list[int]:
    """The k values at which ``bound(k) < exact(k)`` (empty when it dominates)."""
    return [k for k in ks if bound(k) < exact(k)]
