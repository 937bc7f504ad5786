"""Routing-kernel selection: the compiled extension when it imports, else numpy.

A scalar pure-Python router is also registered as the reference
implementation. ``use_backend`` switches at runtime (benchmarks and tests
exercise every backend).
"""

from . import _route_numpy, _route_python

try:
    from . import _route_ext
except ImportError:  # extension not built
    _route_ext = None

BACKENDS = {"numpy": _route_numpy.route_ids, "python": _route_python.route_ids}
if _route_ext is not None:
    BACKENDS["compiled"] = _route_ext.route_ids

backend = "compiled" if _route_ext is not None else "numpy"
_impl = BACKENDS[backend]


def use_backend(name: str) -> None:
    global backend, _impl
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    backend, _impl = name, BACKENDS[name]


def route_ids(X, y, ids, start, kind, attr, value, left, right, label):
    return _impl(X, y, ids, start, kind, attr, value, left, right, label)
