import math

import numpy as np
import pytest

from trackflow.config import CostParams, SocialParams
from trackflow.detections import Detection, Trajectory
from trackflow.metrics import evaluate
from trackflow.sim import PerturbationSpec, generate, group_crossing, perturb
from trackflow.social import (
    avoidance_acceleration, detect_groups, em_track, group_cost, group_prediction, group_score,
    predict_cv, predict_sfm, stitch, track_batched, velocities,
)
from trackflow.trackgraph import motion_cost


def traj(tid, frames, pts):
    P = np.array([[x, y, 0.0] for x, y in pts])
    return Trajectory(tid, list(frames), [100 * tid + f for f in frames], P)


def test_constant_velocity_prediction():
    np.testing.assert_allclose(predict_cv([1, 2, 0], [1, -1, 0], 0.5), [1.5, 1.5, 0])


def test_avoidance_pushes_away_from_neighbour():
    acc = avoidance_acceleration([0, 0, 0], [[0.5, 0, 0]], [False], alpha=0.5, dt=0.4)
    assert acc[0] < 0 and acc[1] == 0
    assert acc[0] == pytest.approx(-math.exp(-0.5 / 0.2))


def test_avoidance_ignores_group_mates_and_far_neighbours():
    acc = avoidance_acceleration([0, 0, 0], [[0.5, 0, 0], [3, 0, 0]], [True, False],
                                 alpha=0.5, dt=0.4, radius=1.0)
    np.testing.assert_array_equal(acc, 0)


def test_avoidance_coincident_points_use_x_axis():
    acc = avoidance_acceleration([1, 1, 0], [[1, 1, 0]], [False], alpha=0.5, dt=0.4)
    np.testing.assert_allclose(acc, [1, 0, 0])


def test_sfm_prediction_formula():
    p = predict_sfm([0, 0, 0], [1, 0, 0], [0, 2, 0], 0.5)
    np.testing.assert_allclose(p, [0.5, 0.5, 0])


def test_group_prediction_and_cost():
    pred = group_prediction([0, 0, 0], [[1, 0, 0], [3, 0, 0]], 0.5)
    np.testing.assert_allclose(pred, [1, 0, 0])
    assert group_prediction([0, 0, 0], np.zeros((0, 3)), 0.5) is None
    assert group_cost([0, 0, 0], np.zeros((0, 3)), [1, 0, 0], 0.5, 7.0) == 0.0
    assert group_cost([0, 0, 0], [[2, 0, 0]], [1, 0, 0], 0.5, 7.0) == pytest.approx(
        motion_cost(0.0, 0.5, 7.0))


def test_velocities_backward_differences():
    t = traj(1, [0, 1, 3], [(0, 0), (0.4, 0), (1.2, 0.8)])
    V = velocities(t, 0.4)
    assert np.isnan(V[0]).all()
    np.testing.assert_allclose(V[1:], [[1, 0, 0], [1, 1, 0]])


def test_group_score_sign():
    frames = range(6)
    a = traj(1, frames, [(f * 0.5, 0) for f in frames])
    mate = traj(2, frames, [(f * 0.5, 0.7) for f in frames])
    stranger = traj(3, frames, [(10 - f * 0.5, 5) for f in frames])
    assert group_score(a, mate, 0.4, SocialParams()) > 0
    assert group_score(a, stranger, 0.4, SocialParams()) < 0
    assert group_score(a, traj(4, [9], [(0, 0)]), 0.4, SocialParams()) is None


def test_detect_groups_labels():
    frames = range(6)
    ts = [traj(1, frames, [(f * 0.5, 0) for f in frames]),
          traj(2, frames, [(10 - f * 0.5, 5) for f in frames]),
          traj(3, frames, [(f * 0.5, 0.7) for f in frames]),
          traj(4, frames, [(10 - f * 0.5, 5.6) for f in frames])]
    assert detect_groups(ts, 0.4) == [1, 2, 1, 2]


def test_em_dist_only_is_single_solve():
    sc = generate(4, 10, seed=1)
    ds = perturb(sc, PerturbationSpec(seed=1))
    res = em_track(ds.detections, CostParams(), SocialParams(use_sfm=False, use_groups=False))
    assert res.iterations == 1 and res.converged


def test_em_respects_iteration_cap():
    ds = perturb(group_crossing(3), PerturbationSpec(missing=0.12, seed=3))
    res = em_track(ds.detections, CostParams(), SocialParams(iterations=2))
    assert res.iterations <= 2
    assert len(res.history) == res.iterations


def test_social_terms_do_not_hurt_clean_crossing():
    sc = group_crossing(0)
    ds = perturb(sc, PerturbationSpec(seed=0))
    res = em_track(ds.detections, CostParams(), SocialParams())
    rep = evaluate(ds.ground_truth, res.trajectories)
    assert rep.id_switches == 0 and rep.misses == 0


def test_stitch_joins_through_overlap():
    prev = [Trajectory(1, [0, 1, 2, 3], [0, 1, 2, 3], np.zeros((4, 3)))]
    new = [Trajectory(1, [2, 3, 4, 5], [2, 3, 4, 5], np.zeros((4, 3)))]
    out = stitch(prev, new, {2, 3})
    assert [t.det_ids for t in out] == [[0, 1, 2, 3, 4, 5]]


def test_stitch_new_batch_wins_inside_overlap():
    prev = [Trajectory(1, [0, 1, 2, 3], [0, 1, 2, 3], np.zeros((4, 3)))]
    new = [Trajectory(1, [2, 3, 4], [2, 9, 4], np.zeros((3, 3)))]
    out = stitch(prev, new, {2, 3})
    assert [t.det_ids for t in out] == [[0, 1, 2, 9, 4]]


def test_batched_equals_single_batch_when_short():
    sc = generate(5, 30, seed=2)
    ds = perturb(sc, PerturbationSpec(missing=0.05, seed=2))
    one = em_track(ds.detections, CostParams(), SocialParams())
    bat = track_batched(ds.detections, CostParams(), SocialParams())
    assert bat.batches == 1
    assert [t.det_ids for t in bat.trajectories] == [t.det_ids for t in one.trajectories]


def test_batched_long_sequence_covers_all_frames():
    sc = generate(4, 90, seed=4)
    ds = perturb(sc, PerturbationSpec(seed=4))
    sp = SocialParams(batch=40, overlap=10, use_sfm=False, use_groups=False)
    bat = track_batched(ds.detections, CostParams(), sp)
    assert bat.batches == 3
    rep = evaluate(ds.ground_truth, bat.trajectories)
    assert rep.misses == 0
    ids = [i for t in bat.trajectories for i in t.det_ids]
    assert len(ids) == len(set(ids))


def test_other_detections_without_velocity_still_repel():
    # a lone detection with unknown velocity acts as a static obstacle
    dets = [Detection(0, 0, 0.0, 0.0, 0.0)]
    acc = avoidance_acceleration([0.3, 0, 0], [dets[0].pos], [False], 0.5, 0.4)
    assert acc[0] > 0
