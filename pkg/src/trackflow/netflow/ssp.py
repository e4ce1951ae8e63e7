"""Successive shortest paths with node potentials (k disjoint paths)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .. import _backend
from .network import FlowNetwork, ResidualNetwork
from .shortest import NegativeCycleError, _cycle_from

log = logging.getLogger(__name__)

UNTIL_NONNEGATIVE = "until_nonnegative"
STOP_TOL = 1e-12


@dataclass
class PathSet:
    """Result of a successive-shortest-path run.

    ``paths`` are node lists s -> t from decomposing the final flow, with one
    entry per unit (or per ``amounts`` chunk for larger capacities).
    ``marginal_costs`` are the true costs of the augmenting paths in the
    order they were found.
    """

    paths: list
    costs: list
    amounts: list
    flow: np.ndarray
    total_cost: float
    flow_value: float
    marginal_costs: list = field(default_factory=list)
    augmenting_paths: list = field(default_factory=list)
    potentials: np.ndarray = None
    truncated: bool = False
    invariant_violation: float = 0.0


def _augment_path(res: ResidualNetwork, pred, s: int, t: int) -> list:
    """Residual arc ids along the predecessor chain from s to t."""
    arcs = []
    v = t
    guard = 0
    while v != s:
        p = int(pred[v])
        arcs.append(int(res.order[p]))
        v = int(res.csr_tail[p])
        guard += 1
        if guard > res.net.n_nodes:
            raise RuntimeError("predecessor chain does not reach the source")
    return arcs[::-1]


def decompose(net: FlowNetwork, flow, tol: float = 1e-9):
    """Split an s-t flow into paths (deterministic: lowest arc index first).

    Returns ``(paths, arc_lists, amounts)``. Flow on cycles that do not touch
    s is ignored.
    """
    f = np.asarray(flow, dtype=float).copy()
    s, t = net.source, net.sink
    out_arcs = [[] for _ in range(net.n_nodes)]
    for k in range(net.n_arcs):
        out_arcs[int(net.tail[k])].append(k)
    paths, arc_lists, amounts = [], [], []
    while True:
        first = [k for k in out_arcs[s] if f[k] > tol]
        if not first:
            break
        nodes, arcs = [s], []
        v = s
        visited = {s: 0}
        while v != t:
            nxt = next((k for k in out_arcs[v] if f[k] > tol), None)
            if nxt is None:
                break
            arcs.append(nxt)
            v = int(net.head[nxt])
            if v in visited:  # cancel a cycle and continue
                i = visited[v]
                cyc = arcs[i:]
                amt = min(f[k] for k in cyc)
                for k in cyc:
                    f[k] -= amt
                for u in nodes[i + 1:]:
                    visited.pop(u, None)
                nodes = nodes[:i + 1]
                arcs = arcs[:i]
                continue
            visited[v] = len(nodes)
            nodes.append(v)
        if v != t:
            break
        amt = min(f[k] for k in arcs)
        for k in arcs:
            f[k] -= amt
        paths.append(nodes)
        arc_lists.append(arcs)
        amounts.append(float(amt))
    return paths, arc_lists, amounts


def successive_shortest_paths(net: FlowNetwork, k: Union[int, str] = UNTIL_NONNEGATIVE,
                              check_invariant: bool = False, tol: float = 1e-9) -> PathSet:
    """Min-cost flow by repeated shortest augmenting paths.

    Parameters
    ----------
    net : FlowNetwork
        Network with source/sink; must not contain a negative cycle.
    k : int or ``"until_nonnegative"``
        Number of flow units to send, or keep augmenting while the next
        shortest path has strictly negative cost.
    check_invariant : bool
        Record the most negative reduced cost on residual arcs leaving
        reachable nodes after each iteration (``invariant_violation``).
    """
    until = k == UNTIL_NONNEGATIVE
    if not until:
        k = int(k)
        if k < 0:
            raise ValueError("k must be nonnegative")
    s, t = net.source, net.sink
    res = ResidualNetwork(net)
    pi = np.zeros(net.n_nodes)
    pushed = 0.0
    marginal, aug_paths = [], []
    worst = 0.0
    first = True
    truncated = False
    while until or pushed < k:
        rcap = res.residual_capacity()
        red = res.reduced_costs(pi)
        o = res.order
        if first:
            dist, pred, bad = _backend.bellman_ford(res.indptr, res.csr_head, red[o], rcap[o], s)
            if bad >= 0:
                pa = np.where(pred >= 0, o[np.maximum(pred, 0)], -1)
                raise NegativeCycleError(_cycle_from(pa, res.tail, int(bad), net.n_nodes))
            first = False
        else:
            dist, pred = _backend.dijkstra(res.indptr, res.csr_head, red[o], rcap[o], s)
        if not np.isfinite(dist[t]):
            truncated = not until
            break
        true_cost = float(dist[t] + pi[s] - pi[t])
        if until and true_cost >= -STOP_TOL:
            break
        path = _augment_path(res, pred, s, t)
        delta = float(min(rcap[a] for a in path))
        if not until:
            delta = min(delta, k - pushed)
        for a in path:
            res.push(a, delta)
        pushed += delta
        marginal.append(true_cost)
        aug_paths.append([int(res.tail[path[0]])] + [int(res.head[a]) for a in path])
        finite = np.isfinite(dist)
        dmax = dist[finite].max()
        reach = finite.copy()
        dist = np.where(finite, dist, dmax)
        pi = pi - dist
        if check_invariant:
            rc = res.residual_capacity()
            red = res.reduced_costs(pi)
            mask = (rc > 0) & reach[res.tail]
            if mask.any():
                worst = min(worst, float(red[mask].min()))
        log.debug("augmented %.6g units, path cost %.6g", delta, true_cost)

    paths, arc_lists, amounts = decompose(net, res.flow)
    costs = [net.path_cost(a) for a in arc_lists]
    total = float(net.cost @ res.flow)
    return PathSet(paths=paths, costs=costs, amounts=amounts, flow=res.flow, total_cost=total,
                   flow_value=pushed, marginal_costs=marginal, augmenting_paths=aug_paths,
                   potentials=pi, truncated=truncated, invariant_violation=worst)
