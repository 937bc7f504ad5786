import time

import numpy as np
import pytest

from evotree.data import AttributeSchema, Dataset, load_csv
from evotree.tree import NOMINAL_EQ, NUMERIC_LE, DecisionTree, TestPredicate

SAMPLE_CSV = "A_1,A_2,A_3,Class\nN,N,Y,Y\nN,Y,N,N\nY,N,N,N\nY,Y,Y,Y\n"


@pytest.fixture
def sample(tmp_path) -> Dataset:
    p = tmp_path / "sample.csv"
    p.write_text(SAMPLE_CSV)
    return load_csv(p)


def eq(ds: Dataset, name: str, value: str) -> TestPredicate:
    j = ds.attribute_index(name)
    return TestPredicate(j, NOMINAL_EQ, ds.attributes[j].encode(value))


def build(ds: Dataset, spec) -> DecisionTree:
    """Tree from nested tuples: a class symbol is a leaf, (name, value, left, right)
    is a nominal test (non-matching instances go left)."""
    t = DecisionTree()

    def rec(s):
        if isinstance(s, str):
            return t.add_leaf(ds.class_values.index(s))
        name, value, lo, hi = s
        a, b = rec(lo), rec(hi)
        return t.add_internal(eq(ds, name, value), a, b)

    t.root = rec(spec)
    return t


# the two parents of the worked example; crossover positions are preorder indices
T1 = ("A_1", "Y", ("A_3", "Y", "Y", "N"), ("A_2", "Y", "N", "Y"))
T2 = ("A_2", "Y", ("A_3", "Y", "N", "Y"), "Y")
T1_CROSS, T2_CROSS = 4, 1


def complete_tree(k: int, m: int):
    """Depth-k complete tree on binary attributes b0..b{k-1} (level j tests b_j),
    with every attribute combination present m times."""
    import itertools
    attrs = tuple(AttributeSchema.nominal(f"b{j}", ("0", "1")) for j in range(k))
    rows = [r for r in itertools.product((0, 1), repeat=k) for _ in range(m)]
    X = np.array(rows, dtype=np.int64).reshape(len(rows), k)
    y = X.sum(axis=1) % 2 if k else np.zeros(len(rows), dtype=np.int64)
    ds = Dataset(attrs, ("0", "1"), X, y, name=f"complete{k}")
    t = DecisionTree()

    def rec(level, bits):
        if level == k:
            return t.add_leaf(sum(bits) % 2)
        lo = rec(level + 1, bits + (0,))
        hi = rec(level + 1, bits + (1,))
        return t.add_internal(TestPredicate(level, NOMINAL_EQ, 1), lo, hi)

    t.root = rec(0, ())
    return ds, t


def linear_tree(k: int, m: int):
    """Linear tree of depth k over one integer attribute c in [0..k].

    The internal node at level j tests c <= j; its left leaf (level j+1) holds
    the m instances with c == j, and the bottom node's right leaf holds c == k.
    Returns the dataset, the tree, the internal nodes by level and the leaves by
    level (the extra bottom leaf last).
    """
    attrs = (AttributeSchema.continuous("c", 0, k),)
    X = np.repeat(np.arange(k + 1), m).reshape(-1, 1)
    y = np.zeros(len(X), dtype=np.int64)
    y[::2] = 1
    ds = Dataset(attrs, ("0", "1"), X, y, name=f"linear{k}")
    t = DecisionTree()
    below = t.add_leaf(0)          # c == k
    bottom_right = below
    leaves = []
    internals = []
    for j in range(k - 1, -1, -1):
        leaf = t.add_leaf(1)       # c == j
        leaves.append(leaf)
        below = t.add_internal(TestPredicate(0, NUMERIC_LE, j), leaf, below)
        internals.append(below)
    t.root = below
    internals.reverse()            # internals[j] is at level j
    leaves.reverse()               # leaves[j] is at level j+1
    return ds, t, internals, leaves + [bottom_right]


# -- acceptance reporting -----------------------------------------------------

_results: dict[int, tuple[str, str, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    marker = item.get_closest_marker("criterion")
    t0 = time.perf_counter()
    outcome = yield
    if marker is not None:
        number, title = marker.args
        status = "FAIL" if outcome.excinfo is not None else "PASS"
        _results[number] = (title, status, time.perf_counter() - t0)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, status, secs = _results[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  ({secs:.2f} s)")
