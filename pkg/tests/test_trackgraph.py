import math
import time

import numpy as np
import pytest

from conftest import FIXTURES, walker_dets
from oracles import map_partition_oracle
from trackflow.config import CostParams
from trackflow.detections import Detection, sort_detections
from trackflow.trackgraph import (
    build, candidate_links, decode, detection_cost, gap_cost, gauss_error, link_cost, motion_cost,
    solve_tracking, solve_tracking_via_lp, tracking_lp,
)


# ----------------------------------------------------------------- costs

def test_gauss_error_reference_values():
    assert gauss_error(3.5, 7.0) == 0.5
    # 1/2 + 1/2 erf(2)
    assert gauss_error(0.0, 7.0) == pytest.approx(0.5 + 0.5 * math.erf(2.0), abs=1e-15)
    assert gauss_error(0.0, 7.0) == pytest.approx(0.997661, abs=1e-6)


def test_gauss_error_monotone_and_vectorised():
    v = np.linspace(0, 7, 1000)
    e = gauss_error(v, 7.0)
    assert np.all(np.diff(e) < 0)
    assert e[0] == gauss_error(0.0, 7.0)


def test_motion_cost_limits():
    assert motion_cost(0.0, 0.4, 7.0) == pytest.approx(-math.log(gauss_error(0.0, 7.0)))
    assert motion_cost(7.0 * 0.4 + 1e-6, 0.4, 7.0) == math.inf
    np.testing.assert_array_equal(np.isinf(motion_cost([0.1, 5.0], 0.4, 7.0)), [False, True])


def test_gap_cost():
    assert gap_cost(1, 0.3) == 0.0
    assert gap_cost(3, 0.3) == pytest.approx(-2 * math.log(0.3))


def test_link_cost_respects_fmax():
    p = CostParams(fmax=2)
    a = Detection(0, 0, 0, 0, 0)
    assert math.isinf(link_cost(a, Detection(3, 1, 0.1, 0, 0), p))
    assert link_cost(a, Detection(2, 1, 0.5, 0, 0), p) == pytest.approx(
        motion_cost(0.5, 0.8, 7.0) + gap_cost(2, 0.3))


def test_detection_cost_with_entries():
    d = Detection(0, 0, 4.0, 0.0, 0.0, conf=0.9)
    assert detection_cost(d, CostParams()) == pytest.approx(math.log(0.1))
    p = CostParams(entries=[(0.0, 0.0, 0.0)], bbmin=1.5)
    assert detection_cost(d, p) == pytest.approx(math.log(0.1) + math.log(1.5 / 4.0))
    near = Detection(0, 1, 1.0, 0.0, 0.0, conf=0.9)
    assert detection_cost(near, p) == pytest.approx(math.log(0.1))


def test_candidate_links_match_naive(rng):
    frames = np.sort(rng.integers(0, 8, size=30))
    pos = rng.normal(size=(30, 3))
    I, J, D = candidate_links(frames, pos, 3)
    got = sorted(zip(I.tolist(), J.tolist()))
    ref = sorted((i, j) for i in range(30) for j in range(30) if 1 <= frames[j] - frames[i] <= 3)
    assert got == ref
    np.testing.assert_allclose(D, np.linalg.norm(pos[J] - pos[I], axis=1))


# ----------------------------------------------------------------- graph

def test_graph_sizes():
    dets = FIXTURES["parallel"]()
    g = build(dets)
    n, L = g.n_dets, g.link_i.size
    assert g.net.n_arcs == 3 * n + L + 2 * n
    assert g.net.n_nodes == 2 + 4 * n
    assert np.all(g.net.capacity == 1)


def test_link_extra_inf_removes_arcs():
    dets = FIXTURES["parallel"]()
    base = build(dets)
    g = build(dets, link_extra=lambda I, J, dt: np.where(I == 0, np.inf, 0.0))
    assert g.link_i.size == base.link_i.size - int((base.link_i == 0).sum())
    assert 0 not in g.link_i


def test_empty_input():
    sol = solve_tracking(build([]))
    assert sol.trajectories == [] and sol.total_cost == 0


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_tracking_matches_exhaustive_map(name):
    cp = CostParams()
    dets = sort_detections(FIXTURES[name]())
    t0 = time.perf_counter()
    sol = solve_tracking(build(dets, cp))
    elapsed = time.perf_counter() - t0
    cost, optima = map_partition_oracle(dets, lambda i, j: link_cost(dets[i], dets[j], cp),
                                        lambda i: detection_cost(dets[i], cp))
    assert sol.total_cost == pytest.approx(cost, abs=1e-9)
    assert frozenset(tuple(t.det_ids) for t in sol.trajectories) in optima
    assert elapsed < 1.0


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_tracking_ssp_equals_lp(name):
    g = build(FIXTURES[name]())
    a, b = solve_tracking(g), solve_tracking_via_lp(g)
    assert a.total_cost == pytest.approx(b.total_cost, abs=1e-9)


def test_parallel_walkers_recovered():
    sol = solve_tracking(build(FIXTURES["parallel"]()))
    assert [t.det_ids for t in sol.trajectories] == [[0, 2, 4, 6], [1, 3, 5, 7]]


def test_gap_is_bridged():
    sol = solve_tracking(build(FIXTURES["crossing_gap"]()))
    assert len(sol.trajectories) == 2
    assert sorted(len(t) for t in sol.trajectories) == [4, 5]


def test_trajectory_cost_accounting():
    cp = CostParams()
    dets = sort_detections(FIXTURES["parallel"]())
    g = build(dets, cp)
    sol = solve_tracking(g)
    by_id = {d.id: d for d in dets}
    total = 0.0
    for t in sol.trajectories:
        chain = [by_id[i] for i in t.det_ids]
        c = sum(link_cost(a, b, cp) for a, b in zip(chain[:-1], chain[1:]))
        c += sum(detection_cost(d, cp) for d in chain[1:-1])
        assert t.cost == pytest.approx(c)
        total += c
    assert sol.total_cost == pytest.approx(total)


def test_low_confidence_detections_are_skipped():
    step = 0.48
    dets = walker_dets({0: [(f, 1 + f * step, 5.0) for f in range(4)]}, conf=0.02)
    # two interior rewards log(0.98) do not pay for three links at 1.2 m/s
    assert solve_tracking(build(dets)).trajectories == []


def test_random_scenes_ssp_vs_lp(rng):
    for _ in range(5):
        dets = [Detection(int(f), k, float(x), float(y), 0.0, float(c))
                for k, (f, x, y, c) in enumerate(zip(rng.integers(0, 5, 12), rng.uniform(0, 3, 12),
                                                    rng.uniform(0, 3, 12), rng.uniform(0.5, 0.99, 12)))]
        g = build(dets, CostParams(fmax=3))
        assert solve_tracking(g).total_cost == pytest.approx(solve_tracking_via_lp(g).total_cost, abs=1e-8)


def test_tracking_lp_shape():
    g = build(FIXTURES["group"]())
    lp = tracking_lp(g)
    assert lp.A.shape == (4 * g.n_dets, 3 * g.n_dets + g.link_i.size)


def test_decode_rejects_nothing_on_zero_flow():
    g = build(FIXTURES["group"]())
    assert decode(g, np.zeros(g.net.n_arcs)) == []
