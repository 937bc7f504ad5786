"""Binary decision-tree genome with leaf-resident instance indices.

Nodes live in an arena of parallel lists addressed by integer node id.
Internal nodes carry an attribute-value test; leaves carry a class code, the
ids of the training instances routed to them, and how many of those are
classified correctly. Only leaves store instance ids, so a fully evaluated
tree holds exactly n ids in total.

Branch convention: a nominal ``attr = v`` test sends matching instances right
and the rest left; a numeric ``attr <= t`` test sends ``<= t`` left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels
from .data import Dataset

LEAF, NOMINAL_EQ, NUMERIC_LE = 0, 1, 2
NO_NODE = -1
EMPTY_IDS = np.empty(0, dtype=np.int64)
EMPTY_IDS.flags.writeable = False


@dataclass(frozen=True)
class TestPredicate:
    attribute: int
    kind: int
    value: int

    def goes_right(self, v: int) -> bool:
        if self.kind == NOMINAL_EQ:
            return v == self.value
        return v > self.value


@dataclass
class EvalCounters:
    node_instance_checks: int = 0
    instances_reclassified: int = 0

    def add(self, other: "EvalCounters") -> None:
        self.node_instance_checks += other.node_instance_checks
        self.instances_reclassified += other.instances_reclassified

    def copy(self) -> "EvalCounters":
        return EvalCounters(self.node_instance_checks, self.instances_reclassified)


class DecisionTree:
    """Arena-backed binary tree. Abandoned subtrees stay in the arena until
    :meth:`compact` (or a compacting :meth:`clone`) drops them."""

    __slots__ = ("kind", "attr", "value", "left", "right", "parent", "label",
                 "ids", "correct", "root", "garbage")

    def __init__(self):
        self.kind: list[int] = []
        self.attr: list[int] = []
        self.value: list[int] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.parent: list[int] = []
        self.label: list[int] = []
        self.ids: list[np.ndarray] = []
        self.correct: list[int] = []
        self.root = NO_NODE
        self.garbage = 0

    # -- construction -------------------------------------------------------

    def _append(self, kind, attr, value, left, right, label) -> int:
        i = len(self.kind)
        self.kind.append(kind)
        self.attr.append(attr)
        self.value.append(value)
        self.left.append(left)
        self.right.append(right)
        self.parent.append(NO_NODE)
        self.label.append(label)
        self.ids.append(EMPTY_IDS)
        self.correct.append(0)
        return i

    def add_leaf(self, label: int) -> int:
        i = self._append(LEAF, -1, 0, NO_NODE, NO_NODE, label)
        if self.root == NO_NODE:
            self.root = i
        return i

    def add_internal(self, test: TestPredicate, left: int, right: int) -> int:
        i = self._append(test.kind, test.attribute, test.value, left, right, -1)
        self.parent[left] = i
        self.parent[right] = i
        if self.root in (NO_NODE, left, right):
            self.root = i
        return i

    @classmethod
    def stump(cls, test: TestPredicate, left_label: int, right_label: int) -> "DecisionTree":
        t = cls()
        lo = t.add_leaf(left_label)
        hi = t.add_leaf(right_label)
        t.add_internal(test, lo, hi)
        return t

    @classmethod
    def single_leaf(cls, label: int) -> "DecisionTree":
        t = cls()
        t.add_leaf(label)
        return t

    # -- queries ------------------------------------------------------------

    def is_leaf(self, i: int) -> bool:
        return self.kind[i] == LEAF

    def predicate(self, i: int) -> TestPredicate:
        if self.kind[i] == LEAF:
            raise ValueError(f"node {i} is a leaf")
        return TestPredicate(self.attr[i], self.kind[i], self.value[i])

    def nodes(self, start: int | None = None) -> list[int]:
        """Reachable node ids below ``start`` (default root) in preorder."""
        out = []
        stack = [self.root if start is None else start]
        kind, left, right = self.kind, self.left, self.right
        while stack:
            i = stack.pop()
            out.append(i)
            if kind[i] != LEAF:
                stack.append(right[i])
                stack.append(left[i])
        return out

    def leaves(self, start: int | None = None) -> list[int]:
        """Leaves below ``start`` in left-to-right order."""
        kind = self.kind
        return [i for i in self.nodes(start) if kind[i] == LEAF]

    def node_count(self) -> int:
        return len(self.nodes())

    def depth(self, i: int) -> int:
        d = 0
        while self.parent[i] != NO_NODE:
            i = self.parent[i]
            d += 1
        return d

    def is_ancestor_or_self(self, a: int, b: int) -> bool:
        """True when ``b`` lies in the subtree rooted at ``a``."""
        while b != NO_NODE:
            if b == a:
                return True
            b = self.parent[b]
        return False

    def leaf_depths(self, start: int | None = None) -> Iterator[tuple[int, int]]:
        """(leaf, depth from the tree root) pairs below ``start``."""
        s = self.root if start is None else start
        stack = [(s, self.depth(s))]
        while stack:
            i, d = stack.pop()
            if self.kind[i] == LEAF:
                yield i, d
            else:
                stack.append((self.right[i], d + 1))
                stack.append((self.left[i], d + 1))

    def stored_id_count(self) -> int:
        return sum(len(self.ids[i]) for i in self.leaves())

    def structure(self, start: int | None = None):
        """Nested-tuple shape and tests (no evaluation data); for equality checks."""
        i = self.root if start is None else start
        if self.kind[i] == LEAF:
            return ("leaf", self.label[i])
        return (self.kind[i], self.attr[i], self.value[i],
                self.structure(self.left[i]), self.structure(self.right[i]))

    def snapshot(self, start: int | None = None):
        """Structure plus every leaf's sorted ids and correct count."""
        return (self.structure(start),
                tuple((tuple(sorted(self.ids[i].tolist())), self.correct[i])
                      for i in self.leaves(start)))

    # -- mutation primitives ------------------------------------------------

    def set_test(self, i: int, test: TestPredicate) -> None:
        if self.kind[i] == LEAF:
            raise ValueError(f"node {i} is a leaf")
        self.kind[i] = test.kind
        self.attr[i] = test.attribute
        self.value[i] = test.value

    def set_label(self, i: int, label: int) -> None:
        if self.kind[i] != LEAF:
            raise ValueError(f"node {i} is internal")
        self.label[i] = label

    def prune_to_leaf(self, i: int, label: int) -> None:
        """Turn node ``i`` into an empty leaf, abandoning everything below it."""
        if self.kind[i] != LEAF:
            self.garbage += len(self.nodes(i)) - 1
            self.parent[self.left[i]] = NO_NODE
            self.parent[self.right[i]] = NO_NODE
        self.kind[i] = LEAF
        self.attr[i] = -1
        self.value[i] = 0
        self.left[i] = NO_NODE
        self.right[i] = NO_NODE
        self.label[i] = label
        self.ids[i] = EMPTY_IDS
        self.correct[i] = 0

    def graft(self, at: int, source: "DecisionTree", source_node: int) -> int:
        """Replace the subtree at ``at`` with a copy of ``source``'s subtree."""
        new = copy_subtree(source, source_node, self)
        p = self.parent[at]
        self.garbage += len(self.nodes(at))
        if p == NO_NODE:
            self.root = new
        elif self.left[p] == at:
            self.left[p] = new
        else:
            self.right[p] = new
        self.parent[new] = p
        self.parent[at] = NO_NODE
        return new

    def clone(self) -> "DecisionTree":
        """Independent copy. Leaf id arrays are shared: they are never written
        in place, only replaced."""
        if self.garbage > len(self.kind) // 2:
            return self.compact()
        t = DecisionTree.__new__(DecisionTree)
        t.kind = self.kind.copy()
        t.attr = self.attr.copy()
        t.value = self.value.copy()
        t.left = self.left.copy()
        t.right = self.right.copy()
        t.parent = self.parent.copy()
        t.label = self.label.copy()
        t.ids = self.ids.copy()
        t.correct = self.correct.copy()
        t.root = self.root
        t.garbage = self.garbage
        return t

    def compact(self) -> "DecisionTree":
        """Copy holding only reachable nodes (ids renumbered)."""
        t = DecisionTree()
        copy_subtree(self, self.root, t)
        return t

    def compiled(self):
        """Arena as numpy arrays for the routing kernel."""
        return (np.array(self.kind, dtype=np.int8),
                np.array(self.attr, dtype=np.int64),
                np.array(self.value, dtype=np.int64),
                np.array(self.left, dtype=np.int64),
                np.array(self.right, dtype=np.int64),
                np.array(self.label, dtype=np.int64))


def copy_subtree(source: DecisionTree, node: int, dest: DecisionTree) -> int:
    """Deep-copy ``source``'s subtree at ``node`` into ``dest``; returns the new id.

    The copy's root has no parent; leaf ids and correct counts are carried over.
    If ``dest`` is empty the copy becomes its root.
    """
    mapping: dict[int, int] = {}
    order = source.nodes(node)
    for i in order:
        mapping[i] = dest._append(source.kind[i], source.attr[i], source.value[i],
                                  NO_NODE, NO_NODE, source.label[i])
    for i in order:
        j = mapping[i]
        dest.ids[j] = source.ids[i]
        dest.correct[j] = source.correct[i]
        if source.kind[i] != LEAF:
            lo, hi = mapping[source.left[i]], mapping[source.right[i]]
            dest.left[j] = lo
            dest.right[j] = hi
            dest.parent[lo] = j
            dest.parent[hi] = j
    new = mapping[node]
    if dest.root == NO_NODE:
        dest.root = new
    return new


# -- evaluation -------------------------------------------------------------

def route(tree: DecisionTree, row, counters: EvalCounters | None = None,
          start: int | None = None) -> int:
    """Walk one encoded instance from ``start`` (default root) to a leaf.

    Every node visited, the final leaf included, costs one node-instance-check.
    """
    i = tree.root if start is None else start
    checks = 1
    kind = tree.kind
    while kind[i] != LEAF:
        v = row[tree.attr[i]]
        if kind[i] == NOMINAL_EQ:
            right = v == tree.value[i]
        else:
            right = v > tree.value[i]
        i = tree.right[i] if right else tree.left[i]
        checks += 1
    if counters is not None:
        counters.node_instance_checks += checks
    return i


def classify(tree: DecisionTree, row) -> int:
    return tree.label[route(tree, row)]


def refresh(tree: DecisionTree, node: int, ids: np.ndarray, dataset: Dataset,
            counters: EvalCounters, start: int | None = None) -> None:
    """Re-route ``ids`` down to the leaves below ``node``, rebuilding that
    subtree's leaf data.

    Routing begins at ``node`` unless ``start`` names an ancestor to begin at
    instead (every id must then actually arrive inside ``node``'s subtree).
    Leaves outside the subtree are untouched. Leaf id lists keep the order of
    ``ids``.
    """
    ids = np.asarray(ids, dtype=np.int64)
    leaves = tree.leaves(node)
    for leaf in leaves:
        tree.ids[leaf] = EMPTY_IDS
        tree.correct[leaf] = 0
    counters.instances_reclassified += len(ids)
    if not len(ids):
        return
    if start is None:
        start = node
    if start == node and tree.kind[node] == LEAF:
        # no routing: one class check per instance
        tree.ids[node] = ids
        tree.correct[node] = int(np.count_nonzero(dataset.y[ids] == tree.label[node]))
        counters.node_instance_checks += len(ids)
        return
    leaf, hit, checks = kernels.route_ids(dataset.X, dataset.y, ids, start, *tree.compiled())
    counters.node_instance_checks += checks
    order = np.argsort(leaf, kind="stable")
    sorted_leaf = leaf[order]
    starts = np.flatnonzero(np.r_[True, sorted_leaf[1:] != sorted_leaf[:-1]])
    if start != node and not set(sorted_leaf[starts].tolist()) <= set(leaves):
        raise ValueError(f"instances routed from {start} left the subtree of {node}")
    hits = np.add.reduceat(hit[order].astype(np.int64), starts)
    ends = np.r_[starts[1:], len(ids)]
    sorted_ids = ids[order]
    for s, e, c in zip(starts.tolist(), ends.tolist(), hits.tolist()):
        lf = int(sorted_leaf[s])
        tree.ids[lf] = sorted_ids[s:e]
        tree.correct[lf] = c


def evaluate_full(tree: DecisionTree, dataset: Dataset, counters: EvalCounters) -> None:
    """Route every instance from the root, rebuilding all leaf data."""
    refresh(tree, tree.root, np.arange(dataset.n, dtype=np.int64), dataset, counters)


def aggregate(tree: DecisionTree, start: int | None = None) -> tuple[int, int]:
    """(leaf count, total correct) of a subtree; no instance routing."""
    leaves = correct = 0
    stack = [tree.root if start is None else start]
    kind, left, right, corr = tree.kind, tree.left, tree.right, tree.correct
    while stack:
        i = stack.pop()
        if kind[i] == LEAF:
            leaves += 1
            correct += corr[i]
        else:
            stack.append(right[i])
            stack.append(left[i])
    return leaves, correct


def gather_instances(tree: DecisionTree, start: int | None = None,
                     overrides: dict[int, np.ndarray] | None = None) -> np.ndarray:
    """Concatenate leaf ids below ``start`` left to right, i.e. I(start).

    ``overrides`` maps node ids to id arrays that stand in for the stored
    content of their whole subtree.
    """
    parts = []
    stack = [tree.root if start is None else start]
    while stack:
        i = stack.pop()
        if overrides and i in overrides:
            parts.append(overrides[i])
        elif tree.kind[i] == LEAF:
            parts.append(tree.ids[i])
        else:
            stack.append(tree.right[i])
            stack.append(tree.left[i])
    if not parts:
        return EMPTY_IDS
    return np.concatenate(parts)


# -- text format ------------------------------------------------------------

def format_tree(tree: DecisionTree, dataset: Dataset) -> str:
    """Indented text; children appear left first, each tagged with the test
    outcome that leads there."""
    lines: list[str] = []

    def node_text(i):
        if tree.kind[i] == LEAF:
            return f"{dataset.class_values[tree.label[i]]} ({tree.correct[i]}/{len(tree.ids[i])})"
        a = dataset.attributes[tree.attr[i]]
        op = "=" if tree.kind[i] == NOMINAL_EQ else "<="
        return f"{a.name} {op} {a.format_value(tree.value[i])}?"

    def walk(i, indent, tag):
        lines.append("  " * indent + tag + node_text(i))
        if tree.kind[i] != LEAF:
            left_tag, right_tag = ("false: ", "true: ") if tree.kind[i] == NOMINAL_EQ \
                else ("true: ", "false: ")
            walk(tree.left[i], indent + 1, left_tag)
            walk(tree.right[i], indent + 1, right_tag)

    walk(tree.root, 0, "")
    return "\n".join(lines) + "\n"


_LEAF_RE = re.compile(r"^(?P<cls>.*) \((?P<c>\d+)/(?P<t>\d+)\)$")
_TEST_RE = re.compile(r"^(?P<attr>.*?) (?P<op><=|=) (?P<val>.*)\?$")


class TreeFormatError(ValueError):
    pass


@dataclass
class ParsedNode:
    """A node read back from :func:`format_tree` output, not yet bound to a schema."""
    text: str
    attr: str | None = None
    op: str | None = None
    value: str | None = None
    cls: str | None = None
    correct: int = 0
    total: int = 0
    children: list["ParsedNode"] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.cls is not None

    def leaf_count(self) -> int:
        return 1 if self.is_leaf else sum(c.leaf_count() for c in self.children)

    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + max(c.depth() for c in self.children)


def parse_tree_text(text: str) -> ParsedNode:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        stripped = raw.lstrip(" ")
        indent = len(raw) - len(stripped)
        if indent % 2:
            raise TreeFormatError(f"line {lineno}: odd indentation")
        for tag in ("false: ", "true: "):
            if stripped.startswith(tag):
                stripped = stripped[len(tag):]
                break
        m = _TEST_RE.match(stripped)
        if m:
            node = ParsedNode(stripped, attr=m["attr"], op=m["op"], value=m["val"], children=[])
        else:
            m = _LEAF_RE.match(stripped)
            if not m:
                raise TreeFormatError(f"line {lineno}: cannot parse {stripped!r}")
            node = ParsedNode(stripped, cls=m["cls"], correct=int(m["c"]), total=int(m["t"]))
        entries.append((indent // 2, node, lineno))
    if not entries:
        raise TreeFormatError("empty tree file")

    pos = 0

    def build(level):
        nonlocal pos
        lvl, node, lineno = entries[pos]
        if lvl != level:
            raise TreeFormatError(f"line {lineno}: unexpected indentation")
        pos += 1
        if not node.is_leaf:
            for _ in range(2):
                if pos >= len(entries):
                    raise TreeFormatError(f"line {lineno}: internal node lacks two children")
                node.children.append(build(level + 1))
        return node

    root = build(0)
    if pos != len(entries):
        raise TreeFormatError(f"line {entries[pos][2]}: trailing content")
    return root


def bind_tree(parsed: ParsedNode, dataset: Dataset) -> DecisionTree:
    """Rebuild a :class:`DecisionTree` from parsed text against ``dataset``'s schema.
    Leaf data is left empty; evaluate the result to refill it."""
    tree = DecisionTree()

    def build(p):
        if p.is_leaf:
            try:
                return tree.add_leaf(dataset.class_values.index(p.cls))
            except ValueError:
                raise TreeFormatError(f"unknown class {p.cls!r}") from None
        try:
            j = dataset.attribute_index(p.attr)
        except KeyError:
            raise TreeFormatError(f"unknown attribute {p.attr!r}") from None
        a = dataset.attributes[j]
        if p.op == "=":
            if not a.is_nominal:
                raise TreeFormatError(f"'=' test on continuous attribute {a.name!r}")
            test = TestPredicate(j, NOMINAL_EQ, a.encode(p.value))
        else:
            if a.is_nominal:
                raise TreeFormatError(f"'<=' test on nominal attribute {a.name!r}")
            test = TestPredicate(j, NUMERIC_LE, int(p.value))
        lo = build(p.children[0])
        hi = build(p.children[1])
        return tree.add_internal(test, lo, hi)

    tree.root = build(parsed)
    return tree
