"""Scalar reference router in plain Python (same contract as the others).

Slow; kept as the readable reference for routing that the vectorised and
compiled kernels are tested against.
"""

import numpy as np

LEAF, NOMINAL_EQ = 0, 1


def route_ids(X, y, ids, start, kind, attr, value, left, right, label):
    ids = [int(i) for i in ids]
    kind, attr, value = kind.tolist(), attr.tolist(), value.tolist()
    left, right, label = left.tolist(), right.tolist(), label.tolist()
    rows, classes = X.tolist(), y.tolist()
    leaf = []
    hit = []
    checks = 0
    for i in ids:
        row = rows[i]
        node = start
        checks += 1
        while kind[node] != LEAF:
            v = row[attr[node]]
            if kind[node] == NOMINAL_EQ:
                node = right[node] if v == value[node] else left[node]
            else:
                node = left[node] if v <= value[node] else right[node]
            checks += 1
        leaf.append(node)
        hit.append(classes[i] == label[node])
    return np.array(leaf, dtype=np.int64), np.array(hit, dtype=bool), checks
