"""Lossless incremental fitness re-evaluation and savings accounting.

A stale node's instance set I(N) is fixed by the unchanged root-to-N path, so
only the stale subtree has to be rebuilt: the recorded I(N) is routed from N
downwards and every leaf elsewhere keeps its inherited ids and counts. The
payoff is then recomputed from the leaf aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .fitness import COUNT, score
from .operators import Individual, OperatorOutcome, OpKind
from .tree import DecisionTree, EvalCounters, evaluate_full, refresh


class InheritanceError(RuntimeError):
    """Stale-node bookkeeping is inconsistent with the tree."""


@dataclass
class ReevalPlan:
    outcome: OperatorOutcome
    gathered: np.ndarray


def plan(outcome: OperatorOutcome) -> ReevalPlan:
    if outcome.kind is not OpKind.ROOT_ROOT_CROSSOVER and outcome.gathered is None:
        raise InheritanceError(f"{outcome.kind.value} at node {outcome.stale} was absorbed "
                               "by an enclosing stale mark; re-evaluate the pending marks instead")
    return ReevalPlan(outcome, outcome.gathered)


def _rebuild(tree: DecisionTree, outcome: OperatorOutcome, dataset: Dataset,
             counters: EvalCounters, from_root: bool) -> None:
    p = plan(outcome)
    if outcome.kind is OpKind.ROOT_ROOT_CROSSOVER:
        return
    stale = outcome.stale
    if stale is None or stale >= len(tree.kind) or not tree.is_ancestor_or_self(tree.root, stale):
        raise InheritanceError(f"stale node {stale} is not part of the tree")
    refresh(tree, stale, p.gathered, dataset, counters,
            start=tree.root if from_root else None)


def reevaluate(offspring: Individual, outcome: OperatorOutcome, dataset: Dataset, x,
               counters: EvalCounters, unit: str = COUNT, from_root: bool = False):
    """Bring ``offspring`` up to date after a single operator; returns the payoff.

    ``from_root=True`` re-routes I(stale) from the tree root rather than from
    the stale node: same result, higher cost (the pessimistic accounting).
    """
    _rebuild(offspring.tree, outcome, dataset, counters, from_root)
    offspring.pending = [p for p in offspring.pending if p is not outcome]
    offspring.payoff = score(offspring.tree, dataset.n, x, unit)
    return offspring.payoff


def reevaluate_pending(offspring: Individual, dataset: Dataset, x, counters: EvalCounters,
                       unit: str = COUNT):
    """Process every queued stale mark (they cover disjoint subtrees), then rescore."""
    for outcome in offspring.pending:
        _rebuild(offspring.tree, outcome, dataset, counters, False)
    offspring.pending = []
    offspring.payoff = score(offspring.tree, dataset.n, x, unit)
    return offspring.payoff


def full_equivalent_cost(tree: DecisionTree, dataset: Dataset) -> EvalCounters:
    """What routing every instance from the root would cost, computed from the
    current leaf contents without routing anything."""
    checks = sum(len(tree.ids[leaf]) * (depth + 1) for leaf, depth in tree.leaf_depths())
    return EvalCounters(checks, dataset.n)


@dataclass
class SavingsReport:
    reclassified_actual: int
    reclassified_full_equiv: int
    checks_actual: int
    checks_full_equiv: int

    @property
    def instance_savings(self) -> float:
        return _saved(self.reclassified_actual, self.reclassified_full_equiv)

    @property
    def check_savings(self) -> float:
        return _saved(self.checks_actual, self.checks_full_equiv)


def _saved(actual: int, full: int) -> float:
    return 1.0 - actual / full if full else 0.0


def savings(actual: EvalCounters, full_equiv: EvalCounters) -> SavingsReport:
    if (actual.instances_reclassified > full_equiv.instances_reclassified
            or actual.node_instance_checks > full_equiv.node_instance_checks):
        raise InheritanceError(f"actual cost {actual} exceeds full-evaluation cost {full_equiv}")
    return SavingsReport(actual.instances_reclassified, full_equiv.instances_reclassified,
                         actual.node_instance_checks, full_equiv.node_instance_checks)


def verify_lossless(offspring: Individual, dataset: Dataset, x, unit: str = COUNT) -> bool:
    """Compare ``offspring``'s inherited evaluation with a from-scratch one."""
    tree = offspring.tree
    fresh = tree.clone()
    evaluate_full(fresh, dataset, EvalCounters())
    if len(tree.leaves()) != len(fresh.leaves()):
        return False
    for a, b in zip(tree.leaves(), fresh.leaves()):
        if tree.correct[a] != fresh.correct[b]:
            return False
        if len(tree.ids[a]) != len(fresh.ids[b]):
            return False
        if not np.array_equal(np.sort(tree.ids[a]), np.sort(fresh.ids[b])):
            return False
    return score(fresh, dataset.n, x, unit) == offspring.payoff
