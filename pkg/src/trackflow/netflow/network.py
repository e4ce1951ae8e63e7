"""Directed flow networks and their residual graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass
class FlowNetwork:
    """Nodes ``0..n_nodes-1`` and arcs ``(tail, head, cost, capacity)``.

    Parallel arcs are allowed; arcs are identified by their index.
    """

    n_nodes: int
    tail: np.ndarray
    head: np.ndarray
    cost: np.ndarray
    capacity: np.ndarray
    source: int = 0
    sink: int = 1
    labels: Optional[list] = None

    def __post_init__(self):
        self.tail = np.asarray(self.tail, dtype=np.int64).reshape(-1)
        self.head = np.asarray(self.head, dtype=np.int64).reshape(-1)
        self.cost = np.asarray(self.cost, dtype=float).reshape(-1)
        self.capacity = np.asarray(self.capacity, dtype=float).reshape(-1)
        k = self.tail.size
        if not (self.head.size == self.cost.size == self.capacity.size == k):
            raise ValueError("arc arrays must have equal length")
        if k and (self.tail.min() < 0 or self.head.min() < 0
                  or max(self.tail.max(), self.head.max()) >= self.n_nodes):
            raise ValueError("arc endpoint out of range")
        if np.any(self.tail == self.head):
            raise ValueError("self-loops are not allowed")
        if np.any(self.capacity < 0):
            raise ValueError("capacities must be nonnegative")
        if self.n_nodes >= 2 and self.source == self.sink:
            raise ValueError("source and sink must differ")

    @classmethod
    def from_arcs(cls, n_nodes: int, arcs, source: int = 0, sink: int = 1, labels=None):
        arcs = list(arcs)
        if not arcs:
            z = np.zeros(0)
            return cls(n_nodes, z, z, z, z, source, sink, labels)
        t, h, c, u = zip(*[(a[0], a[1], a[2], a[3] if len(a) > 3 else 1) for a in arcs])
        return cls(n_nodes, t, h, c, u, source, sink, labels)

    @property
    def n_arcs(self) -> int:
        return int(self.tail.size)

    def arcs(self):
        for k in range(self.n_arcs):
            yield int(self.tail[k]), int(self.head[k]), float(self.cost[k]), float(self.capacity[k])

    def csr(self):
        """CSR view ordered by (tail, head, arc index).

        Returns ``(indptr, order)`` where ``order[p]`` is the arc index stored at
        CSR position ``p``.
        """
        order = np.lexsort((np.arange(self.n_arcs), self.head, self.tail))
        counts = np.bincount(self.tail, minlength=self.n_nodes)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return indptr, order.astype(np.int64)

    def path_cost(self, arc_ids) -> float:
        return float(self.cost[np.asarray(arc_ids, dtype=np.int64)].sum()) if len(arc_ids) else 0.0

    def label(self, v: int):
        return self.labels[v] if self.labels is not None else v


def reduce_costs(net: FlowNetwork, potential) -> FlowNetwork:
    """Same network with arc costs ``c - pi(tail) + pi(head)``."""
    pi = np.asarray(potential, dtype=float)
    red = net.cost - pi[net.tail] + pi[net.head]
    return FlowNetwork(net.n_nodes, net.tail.copy(), net.head.copy(), red, net.capacity.copy(),
                       net.source, net.sink, net.labels)


@dataclass
class SplitMap:
    """Node correspondence produced by :func:`split_nodes`."""

    node_in: np.ndarray
    node_out: np.ndarray
    original: np.ndarray  # original node of every new node
    inner_arc: np.ndarray  # index of the v_in -> v_out arc per original node (-1 for s, t)
    arc_of: np.ndarray  # new arc index of every original arc


def split_nodes(net: FlowNetwork, capacity: float = 1.0):
    """Split every node except s and t into ``v_in -> v_out`` (cost 0).

    Original arcs ``(a, b)`` become ``(a_out, b_in)``. Returns the new
    network and a :class:`SplitMap`. The new network has
    ``n_arcs + (n_nodes - 2)`` arcs.
    """
    n = net.n_nodes
    node_in = np.arange(n, dtype=np.int64)
    node_out = node_in.copy()
    original = list(range(n))
    inner = np.full(n, -1, dtype=np.int64)
    tails, heads, costs, caps = [], [], [], []
    nxt = n
    for v in range(n):
        if v in (net.source, net.sink):
            continue
        node_out[v] = nxt
        original.append(v)
        nxt += 1
    arc_of = np.arange(net.n_arcs, dtype=np.int64)
    tails.extend(node_out[net.tail].tolist())
    heads.extend(node_in[net.head].tolist())
    costs.extend(net.cost.tolist())
    caps.extend(net.capacity.tolist())
    for v in range(n):
        if v in (net.source, net.sink):
            continue
        inner[v] = len(tails)
        tails.append(int(node_in[v]))
        heads.append(int(node_out[v]))
        costs.append(0.0)
        caps.append(capacity)
    labels = None
    if net.labels is not None:
        labels = list(net.labels) + [f"{net.labels[v]}'" for v in original[n:]]
    out = FlowNetwork(nxt, tails, heads, costs, caps, net.source, net.sink, labels)
    return out, SplitMap(node_in, node_out, np.array(original, dtype=np.int64), inner, arc_of)


class ResidualNetwork:
    """Residual graph of a flow on a :class:`FlowNetwork`.

    Residual arc ``2k`` is the forward copy of arc ``k`` (capacity ``u - f``,
    cost ``c``) and ``2k + 1`` the backward copy (capacity ``f``, cost
    ``-c``). Only arcs with positive residual capacity are usable.
    """

    def __init__(self, net: FlowNetwork, flow=None):
        self.net = net
        k = net.n_arcs
        self.flow = np.zeros(k) if flow is None else np.asarray(flow, dtype=float).copy()
        self.tail = np.empty(2 * k, dtype=np.int64)
        self.head = np.empty(2 * k, dtype=np.int64)
        self.cost = np.empty(2 * k)
        self.tail[0::2], self.tail[1::2] = net.tail, net.head
        self.head[0::2], self.head[1::2] = net.head, net.tail
        self.cost[0::2], self.cost[1::2] = net.cost, -net.cost
        order = np.lexsort((np.arange(2 * k), self.head, self.tail))
        counts = np.bincount(self.tail, minlength=net.n_nodes)
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.order = order.astype(np.int64)
        self.csr_head = self.head[self.order]
        self.csr_tail = self.tail[self.order]

    def residual_capacity(self) -> np.ndarray:
        r = np.empty(2 * self.net.n_arcs)
        r[0::2] = self.net.capacity - self.flow
        r[1::2] = self.flow
        return r

    def active(self) -> np.ndarray:
        """Indices of residual arcs with positive capacity."""
        return np.flatnonzero(self.residual_capacity() > 0)

    def push(self, residual_arc: int, amount: float) -> None:
        k, back = divmod(int(residual_arc), 2)
        self.flow[k] += -amount if back else amount

    def reduced_costs(self, potential) -> np.ndarray:
        pi = np.asarray(potential, dtype=float)
        return self.cost - pi[self.tail] + pi[self.head]
