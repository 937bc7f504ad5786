"""Vectorised numpy router: the fallback used when the compiled extension is absent.

Instances advance one tree level per iteration as a frontier; the check count
is the number of (instance, node) visits, identical to per-instance routing.
"""

import numpy as np

LEAF, NOMINAL_EQ = 0, 1


def route_ids(X, y, ids, start, kind, attr, value, left, right, label):
    """Route rows ``ids`` of ``X`` from node ``start``.

    Returns (leaf id per row, class-match flag per row, node-instance-checks).
    """
    ids = np.asarray(ids, dtype=np.int64)
    m = len(ids)
    leaf = np.empty(m, dtype=np.int64)
    active = np.arange(m)
    node = np.full(m, start, dtype=np.int64)
    checks = 0
    while active.size:
        checks += active.size
        k = kind[node]
        done = k == LEAF
        if done.any():
            leaf[active[done]] = node[done]
            keep = ~done
            active, node, k = active[keep], node[keep], k[keep]
            if not active.size:
                break
        v = X[ids[active], attr[node]]
        t = value[node]
        go_right = np.where(k == NOMINAL_EQ, v == t, v > t)
        node = np.where(go_right, right[node], left[node])
    hit = y[ids] == label[leaf]
    return leaf, hit, int(checks)
