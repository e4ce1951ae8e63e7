"""Min-cost flow solved as an explicit linear program (oracle for SSP)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lp import EQ, LinearProgram, Status, solve
from .network import FlowNetwork

MAX_ARCS = 400


class FlowInfeasible(ValueError):
    pass


@dataclass
class LPFlow:
    flow: np.ndarray
    cost: float
    status: Status


def flow_lp(net: FlowNetwork, amount: float) -> LinearProgram:
    """``min c'f`` s.t. mass balance (``+F`` at s, ``-F`` at t) and ``0 <= f <= u``."""
    n, k = net.n_nodes, net.n_arcs
    A = np.zeros((n, k))
    A[net.tail, np.arange(k)] += 1.0
    A[net.head, np.arange(k)] -= 1.0
    b = np.zeros(n)
    b[net.source] = amount
    b[net.sink] = -amount
    upper = [float(u) for u in net.capacity]
    return LinearProgram(c=net.cost, A=A, b=b, relations=[EQ] * n, sense="min",
                         lower=[0.0] * k, upper=upper, names=[f"f{a}" for a in range(k)])


def min_cost_flow_via_lp(net: FlowNetwork, amount: float, integral_tol: float = 1e-6) -> LPFlow:
    """Send ``amount`` units from s to t at minimum cost using the simplex solver.

    Raises :class:`FlowInfeasible` if the amount exceeds the maximum flow.
    Integrality of the returned flow is asserted for integral capacities.
    """
    if net.n_arcs > MAX_ARCS:
        raise ValueError(f"network too large for the dense LP oracle ({net.n_arcs} arcs)")
    if amount == 0:
        return LPFlow(np.zeros(net.n_arcs), 0.0, Status.OPTIMAL)
    res = solve(flow_lp(net, amount))
    if res.status == Status.INFEASIBLE:
        raise FlowInfeasible(f"cannot route {amount} units from s to t")
    if res.status != Status.OPTIMAL:
        raise RuntimeError(f"flow LP returned {res.status.value}")
    f = res.x
    if np.allclose(net.capacity, np.round(net.capacity)) and float(amount).is_integer():
        if np.abs(f - np.round(f)).max(initial=0.0) > integral_tol:
            raise AssertionError("flow LP returned a fractional vertex")
        f = np.round(f)
    return LPFlow(f, float(net.cost @ f), res.status)
