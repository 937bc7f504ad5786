"""Genetic operators on decision trees and the stale-node marks they leave.

An operator never re-evaluates. It records which node went stale together
with I(stale), the instance ids that reached that position before the change
(gathered from still-valid leaf data), and queues the mark on the individual.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .tree import (EMPTY_IDS, NOMINAL_EQ, NUMERIC_LE, DecisionTree, EvalCounters,
                   TestPredicate, gather_instances)


class OpKind(enum.Enum):
    NODE_CHANGE = "node-change"
    LEAF_CHANGE = "leaf-change"
    NODE_PRUNE = "node-prune"
    CROSSOVER = "crossover"
    ROOT_ROOT_CROSSOVER = "root-root-crossover"


@dataclass
class OperatorOutcome:
    kind: OpKind
    stale: int | None
    gathered: np.ndarray | None = None


@dataclass
class Individual:
    tree: DecisionTree
    payoff: float = 0.0
    counters: EvalCounters = field(default_factory=EvalCounters)
    pending: list[OperatorOutcome] = field(default_factory=list)

    def copy(self) -> "Individual":
        return Individual(self.tree.clone(), self.payoff, self.counters.copy())


def random_predicate(attributes, rng: np.random.Generator) -> TestPredicate:
    if not attributes:
        raise ValueError("cannot draw a test from an empty schema")
    j = int(rng.integers(len(attributes)))
    a = attributes[j]
    if a.is_nominal:
        return TestPredicate(j, NOMINAL_EQ, int(rng.integers(len(a.values))))
    return TestPredicate(j, NUMERIC_LE, int(rng.integers(a.min, a.max + 1)))


def pick_node(tree: DecisionTree, rng: np.random.Generator) -> int:
    """Uniform over all reachable nodes."""
    nodes = tree.nodes()
    return nodes[int(rng.integers(len(nodes)))]


def _mark(ind: Individual, outcome: OperatorOutcome) -> OperatorOutcome:
    """Record ``outcome`` on ``ind`` before its tree is changed.

    Fills in ``outcome.gathered`` and keeps the pending marks disjoint: a node
    already inside a stale subtree adds nothing, and a new mark above older
    ones absorbs them.
    """
    tree = ind.tree
    node = outcome.stale
    for p in ind.pending:
        if p.stale is not None and tree.is_ancestor_or_self(p.stale, node):
            outcome.gathered = None
            return outcome
    overrides = {p.stale: p.gathered for p in ind.pending if p.stale is not None}
    outcome.gathered = gather_instances(tree, node, overrides)
    ind.pending = [p for p in ind.pending
                   if p.stale is not None and not tree.is_ancestor_or_self(node, p.stale)]
    ind.pending.append(outcome)
    return outcome


def mutate(ind: Individual, dataset: Dataset, config, rng: np.random.Generator) -> OperatorOutcome:
    """Apply one of node-change, leaf-change or node-prune at a uniformly chosen node."""
    tree = ind.tree
    n_classes = len(dataset.class_values)
    node = pick_node(tree, rng)
    if tree.is_leaf(node):
        outcome = _mark(ind, OperatorOutcome(OpKind.LEAF_CHANGE, node))
        new = int(rng.integers(n_classes - 1))
        if new >= tree.label[node]:
            new += 1
        tree.set_label(node, new)
    elif rng.random() < 0.5:
        outcome = _mark(ind, OperatorOutcome(OpKind.NODE_CHANGE, node))
        tree.set_test(node, random_predicate(dataset.attributes, rng))
    else:
        outcome = _mark(ind, OperatorOutcome(OpKind.NODE_PRUNE, node))
        tree.prune_to_leaf(node, int(rng.integers(n_classes)))
    return outcome


def crossover(parent_a: Individual, parent_b: Individual, rng: np.random.Generator):
    """Swap uniformly chosen subtrees between copies of two evaluated parents.

    Returns (offspring_a, offspring_b, outcome_a, outcome_b). When both chosen
    nodes are roots the offspring are plain copies of the opposite parents and
    keep their evaluation data.
    """
    pos_a = int(rng.integers(parent_a.tree.node_count()))
    pos_b = int(rng.integers(parent_b.tree.node_count()))
    return crossover_at(parent_a, parent_b, pos_a, pos_b)


def crossover_at(parent_a: Individual, parent_b: Individual, pos_a: int, pos_b: int):
    """Crossover at given preorder positions (0 is the root) of each parent."""
    nodes_a = parent_a.tree.nodes()
    nodes_b = parent_b.tree.nodes()
    if not (0 <= pos_a < len(nodes_a) and 0 <= pos_b < len(nodes_b)):
        raise IndexError("crossover position outside the tree")
    if pos_a == 0 and pos_b == 0:
        oa, ob = parent_b.copy(), parent_a.copy()
        out_a = OperatorOutcome(OpKind.ROOT_ROOT_CROSSOVER, None, EMPTY_IDS)
        out_b = OperatorOutcome(OpKind.ROOT_ROOT_CROSSOVER, None, EMPTY_IDS)
        oa.pending.append(out_a)
        ob.pending.append(out_b)
        return oa, ob, out_a, out_b
    oa, ob = parent_a.copy(), parent_b.copy()
    # a copy may be compacted, which renumbers nodes but keeps preorder positions
    at_a = oa.tree.nodes()[pos_a]
    at_b = ob.tree.nodes()[pos_b]
    out_a = _mark(oa, OperatorOutcome(OpKind.CROSSOVER, at_a))
    out_b = _mark(ob, OperatorOutcome(OpKind.CROSSOVER, at_b))
    out_a.stale = oa.tree.graft(at_a, parent_b.tree, nodes_b[pos_b])
    out_b.stale = ob.tree.graft(at_b, parent_a.tree, nodes_a[pos_a])
    return oa, ob, out_a, out_b
