"""Shortest paths and min-cost flow."""

from .edgelist import EdgeListError, format_edge_list, parse_edge_list, read_edge_list
from .lpflow import FlowInfeasible, LPFlow, flow_lp, min_cost_flow_via_lp
from .network import FlowNetwork, ResidualNetwork, SplitMap, reduce_costs, split_nodes
from .shortest import NegativeCycleError, ShortestPaths, bellman_ford, dijkstra
from .ssp import UNTIL_NONNEGATIVE, PathSet, decompose, successive_shortest_paths

__all__ = [
    "EdgeListError", "FlowInfeasible", "FlowNetwork", "LPFlow", "NegativeCycleError", "PathSet",
    "ResidualNetwork", "ShortestPaths", "SplitMap", "UNTIL_NONNEGATIVE", "bellman_ford",
    "decompose", "dijkstra", "flow_lp", "format_edge_list", "min_cost_flow_via_lp",
    "parse_edge_list", "read_edge_list", "reduce_costs", "split_nodes",
    "successive_shortest_paths",
]
