"""Kernel backend selection.

The compiled extension is used when it imports; setting ``TRACKFLOW_PURE=1``
forces the pure-Python kernels.
"""

import os

from . import _pykernels

NAME = "python"
kernels = _pykernels

if os.environ.get("TRACKFLOW_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        kernels = _ckernels
        NAME = "cython"


def _as_args(indptr, head, cost, cap):
    import numpy as np
    return (np.ascontiguousarray(indptr, dtype=np.int64), np.ascontiguousarray(head, dtype=np.int64),
            np.ascontiguousarray(cost, dtype=np.float64), np.ascontiguousarray(cap, dtype=np.float64))


def bellman_ford(indptr, head, cost, cap, source):
    return kernels.bellman_ford(*_as_args(indptr, head, cost, cap), int(source))


def dijkstra(indptr, head, cost, cap, source):
    return kernels.dijkstra(*_as_args(indptr, head, cost, cap), int(source))


def hungarian(cost):
    return kernels.hungarian(cost)
