"""Single-source shortest paths on a :class:`FlowNetwork`."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _backend
from .network import FlowNetwork


class NegativeCycleError(ValueError):
    """Raised when a negative-cost cycle is reachable from the source."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__(f"negative cycle through nodes {self.cycle}")


@dataclass
class ShortestPaths:
    source: int
    dist: np.ndarray
    pred: np.ndarray  # arc index entering each node on its shortest path, -1 if none

    def reachable(self, v: int) -> bool:
        return bool(np.isfinite(self.dist[v]))

    def path_arcs(self, net: FlowNetwork, v: int) -> list:
        arcs = []
        seen = 0
        while v != self.source:
            a = int(self.pred[v])
            if a < 0:
                return []
            arcs.append(a)
            v = int(net.tail[a])
            seen += 1
            if seen > net.n_nodes:
                raise RuntimeError("predecessor graph has a cycle")
        return arcs[::-1]

    def path_nodes(self, net: FlowNetwork, v: int) -> list:
        arcs = self.path_arcs(net, v)
        if not arcs:
            return [v] if v == self.source else []
        return [int(net.tail[arcs[0]])] + [int(net.head[a]) for a in arcs]


def _cycle_from(pred_arc, tail, start: int, n: int) -> list:
    """Find a cycle in the predecessor graph, preferring one behind ``start``."""
    order = [start] + [v for v in range(n) if v != start]
    state = np.zeros(n, dtype=np.int8)  # 0 new, 1 on current walk, 2 done
    for v0 in order:
        walk, v = [], v0
        while v >= 0 and state[v] == 0:
            state[v] = 1
            walk.append(v)
            a = pred_arc[v]
            v = int(tail[a]) if a >= 0 else -1
        if v >= 0 and state[v] == 1:
            cycle = walk[walk.index(v):]
            cycle.reverse()
            return cycle
        for u in walk:
            state[u] = 2
    return []


def _run(kernel, net: FlowNetwork, s: int, cost=None, cap=None):
    indptr, order = net.csr()
    c = net.cost if cost is None else np.asarray(cost, dtype=float)
    u = np.ones(net.n_arcs) if cap is None else np.asarray(cap, dtype=float)
    return kernel(indptr, net.head[order], c[order], u[order], s), order


def bellman_ford(net: FlowNetwork, s: int = None, respect_capacity: bool = False) -> ShortestPaths:
    """Shortest walks from ``s``; raises :class:`NegativeCycleError`.

    Capacities are ignored unless ``respect_capacity`` is set, in which case
    zero-capacity arcs are skipped.
    """
    s = net.source if s is None else s
    (dist, pred, bad), order = _run(_backend.bellman_ford, net, s,
                                    cap=net.capacity if respect_capacity else None)
    pred = np.where(pred >= 0, order[np.maximum(pred, 0)], -1)
    if bad >= 0:
        raise NegativeCycleError(_cycle_from(pred, net.tail, int(bad), net.n_nodes))
    return ShortestPaths(s, dist, pred)


def dijkstra(net: FlowNetwork, s: int = None, respect_capacity: bool = False,
             tol: float = 1e-9) -> ShortestPaths:
    """Shortest paths from ``s`` for nonnegative arc costs."""
    s = net.source if s is None else s
    if net.n_arcs and net.cost.min() < -tol:
        k = int(np.argmin(net.cost))
        raise ValueError(f"negative arc cost {net.cost[k]} on arc {k}")
    (dist, pred), order = _run(_backend.dijkstra, net, s,
                               cap=net.capacity if respect_capacity else None)
    pred = np.where(pred >= 0, order[np.maximum(pred, 0)], -1)
    return ShortestPaths(s, dist, pred)
