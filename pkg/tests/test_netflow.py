import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import flow_bruteforce
from trackflow.netflow import (
    EdgeListError, FlowInfeasible, FlowNetwork, NegativeCycleError, ResidualNetwork, bellman_ford,
    decompose, dijkstra, format_edge_list, min_cost_flow_via_lp, parse_edge_list, reduce_costs,
    split_nodes, successive_shortest_paths,
)


def random_dag_network(rng, n, p=0.35, neg=True):
    """Unit-capacity network on a random DAG with s = 0 and t = 1 (t placed last)."""
    order = [0] + list(range(2, n)) + [1]
    arcs = []
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < p:
            u, v = order[a], order[b]
            arcs.append((u, v, float(rng.integers(-6 if neg else 0, 10)), 1.0))
    return FlowNetwork.from_arcs(n, arcs)


def max_flow_value(net):
    """Largest k for which an LP flow exists (unit capacities, small nets)."""
    k = 0
    while True:
        try:
            min_cost_flow_via_lp(net, k + 1)
        except FlowInfeasible:
            return k
        k += 1


# ------------------------------------------------------------ shortest paths

def test_bellman_ford_handles_negative_arcs():
    net = FlowNetwork.from_arcs(4, [(0, 2, 4, 1), (0, 3, 1, 1), (3, 2, -2, 1), (2, 1, 1, 1)])
    sp = bellman_ford(net, 0)
    np.testing.assert_allclose(sp.dist, [0, 0, -1, 1])
    assert sp.path_nodes(net, 1) == [0, 3, 2, 1]


def test_bellman_ford_detects_negative_cycle():
    net = FlowNetwork.from_arcs(4, [(0, 2, 1, 1), (2, 3, -2, 1), (3, 2, 1, 1), (3, 1, 0, 1)])
    with pytest.raises(NegativeCycleError) as exc:
        bellman_ford(net, 0)
    assert set(exc.value.cycle) == {2, 3}


def test_dijkstra_rejects_negative_costs():
    net = FlowNetwork.from_arcs(3, [(0, 2, -1, 1), (2, 1, 1, 1)])
    with pytest.raises(ValueError):
        dijkstra(net, 0)


def test_dijkstra_matches_scipy(rng):
    sp_graph = pytest.importorskip("scipy.sparse.csgraph")
    from scipy.sparse import csr_matrix
    for _ in range(20):
        net = random_dag_network(rng, 12, p=0.4, neg=False)
        # keep the cheapest of parallel arcs for the dense reference
        W = np.full((12, 12), np.inf)
        for u, v, c, _ in net.arcs():
            W[u, v] = min(W[u, v], c + 1.0)
        net1 = FlowNetwork(12, net.tail, net.head, net.cost + 1.0, net.capacity)
        M = np.where(np.isfinite(W), W, 0)
        ref = sp_graph.dijkstra(csr_matrix(M), indices=0)
        np.testing.assert_allclose(dijkstra(net1, 0).dist, ref)
        np.testing.assert_allclose(bellman_ford(net1, 0).dist, ref)


# ------------------------------------------------------------------ residual

def test_residual_arc_pairs():
    net = FlowNetwork.from_arcs(3, [(0, 2, 3, 1), (2, 1, 2, 2)])
    res = ResidualNetwork(net)
    res.push(0, 1.0)
    cap = res.residual_capacity()
    assert cap[0] == 0 and cap[1] == 1  # forward saturated, backward open
    assert res.cost[1] == -3


def test_reduce_costs_preserves_path_differences(rng):
    net = random_dag_network(rng, 8)
    pi = rng.normal(size=8)
    red = reduce_costs(net, pi)
    for k in range(net.n_arcs):
        u, v = int(net.tail[k]), int(net.head[k])
        assert red.cost[k] == pytest.approx(net.cost[k] - pi[u] + pi[v])


# ------------------------------------------------------------------- split

def test_split_nodes_arc_count_and_capacity():
    net = FlowNetwork.from_arcs(5, [(0, 2, 1, 5), (2, 3, 1, 5), (3, 1, 1, 5), (0, 4, 1, 5), (4, 3, 1, 5)])
    split, m = split_nodes(net, capacity=1)
    assert split.n_arcs == net.n_arcs + net.n_nodes - 2
    assert split.n_nodes == 2 * net.n_nodes - 2
    # node 3 is shared, so at most one unit can pass after splitting
    assert successive_shortest_paths(split, 2).truncated
    assert successive_shortest_paths(split, 1).flow_value == 1
    assert split.capacity[m.inner_arc[3]] == 1


# ---------------------------------------------------------------------- SSP

def test_ssp_reroutes_through_backward_arc():
    # greedy first path s-a-b-t blocks both disjoint paths; SSP must reroute
    arcs = [(0, 2, 1, 1), (2, 3, 1, 1), (3, 1, 1, 1), (0, 3, 3, 1), (2, 1, 3, 1)]
    net = FlowNetwork.from_arcs(4, arcs)
    ps = successive_shortest_paths(net, 2)
    assert ps.total_cost == pytest.approx(8)
    assert ps.marginal_costs == pytest.approx([3, 5])
    assert ps.flow[1] == 0
    assert sorted(map(tuple, ps.paths)) == [(0, 2, 1), (0, 3, 1)]


def test_ssp_against_bruteforce(rng):
    for _ in range(60):
        net = random_dag_network(rng, int(rng.integers(4, 7)), p=0.5)
        if net.n_arcs > 13:
            continue
        arcs = [(u, v, c) for u, v, c, _ in net.arcs()]
        for k in range(1, 4):
            ref = flow_bruteforce(net.n_nodes, arcs, 0, 1, k)
            ps = successive_shortest_paths(net, k)
            if np.isinf(ref):
                assert ps.truncated
                break
            assert not ps.truncated
            assert ps.total_cost == pytest.approx(ref)


def test_ssp_against_lp_oracle_with_invariant(rng):
    for _ in range(50):
        net = random_dag_network(rng, int(rng.integers(4, 14)))
        kmax = max_flow_value(net)
        for k in range(0, kmax + 1):
            ps = successive_shortest_paths(net, k, check_invariant=True)
            ref = min_cost_flow_via_lp(net, k)
            assert ps.total_cost == pytest.approx(ref.cost, abs=1e-6)
            assert np.all((ps.flow == 0) | (ps.flow == 1))
            assert ps.invariant_violation >= -1e-9


def test_ssp_marginal_costs_nondecreasing(rng):
    for _ in range(30):
        net = random_dag_network(rng, 12)
        ps = successive_shortest_paths(net, net.n_arcs)
        assert np.all(np.diff(ps.marginal_costs) >= -1e-9)


def test_until_nonnegative_gives_global_min_over_flow_values(rng):
    for _ in range(30):
        net = random_dag_network(rng, int(rng.integers(4, 12)))
        kmax = max_flow_value(net)
        best = min(min_cost_flow_via_lp(net, k).cost for k in range(kmax + 1))
        ps = successive_shortest_paths(net, "until_nonnegative")
        assert ps.total_cost == pytest.approx(best, abs=1e-6)


def test_decompose_recovers_paths():
    net = FlowNetwork.from_arcs(4, [(0, 2, 1, 1), (0, 3, 1, 1), (2, 1, 1, 1), (3, 1, 1, 1)])
    paths, arc_lists, amounts = decompose(net, [1, 1, 1, 1])
    assert paths == [[0, 2, 1], [0, 3, 1]] and amounts == [1, 1]


def test_lp_flow_rejects_excess():
    net = FlowNetwork.from_arcs(3, [(0, 2, 1, 1), (2, 1, 1, 1)])
    with pytest.raises(FlowInfeasible):
        min_cost_flow_via_lp(net, 2)


# ---------------------------------------------------------------- edge list

def test_edge_list_parse_and_format_roundtrip():
    text = "s src\nt snk\n# arcs\nsrc a 1.5 2\na snk -1\nsrc snk 4 1\n"
    net = parse_edge_list(text)
    assert net.labels == ["src", "snk", "a"]
    assert net.source == 0 and net.sink == 1
    np.testing.assert_allclose(net.capacity, [2, 1, 1])
    back = parse_edge_list(format_edge_list(net))
    np.testing.assert_array_equal(back.tail, net.tail)
    np.testing.assert_array_equal(back.cost, net.cost)
    np.testing.assert_array_equal(back.capacity, net.capacity)


@pytest.mark.parametrize("text", ["s a\na b 1\n", "s a\nt b\na b x\n", "s a\nt b\na b\n"])
def test_edge_list_errors(text):
    with pytest.raises(EdgeListError):
        parse_edge_list(text)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-5, 5), st.integers(0, 3)),
                min_size=1, max_size=10))
def test_edge_list_roundtrip_hypothesis(arcs):
    arcs = [(u, v, c, k) for u, v, c, k in arcs if u != v]
    if not arcs:
        return
    net = FlowNetwork.from_arcs(6, arcs, source=0, sink=1, labels=[f"n{i}" for i in range(6)])
    back = parse_edge_list(format_edge_list(net))
    lab = back.labels
    assert [(lab[u], lab[v]) for u, v in zip(back.tail, back.head)] == \
        [(f"n{u}", f"n{v}") for u, v, _, _ in arcs]
    np.testing.assert_array_equal(back.cost, net.cost)
