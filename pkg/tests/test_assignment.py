import numpy as np
import pytest

from oracles import assignment_bruteforce
from trackflow.assignment import (
    Bounds, ParticleSet, ParticleTable, add_iteration, assignment_cost, augment_in_out,
    default_bounds, delete_iteration, hungarian, match_in_out, multi_level_match, track_hungarian,
    track_mlh,
)
from trackflow.detections import Detection


def dets_from(rows):
    return [Detection(f, k, x, y, 0.0) for k, (f, x, y) in enumerate(rows)]


def test_trivial_assignments():
    assert hungarian([[3.0]]).tolist() == [0]
    C = np.full((4, 4), 5.0)
    np.fill_diagonal(C, 1.0)
    assert hungarian(C).tolist() == [0, 1, 2, 3]


def test_border_distance_ignores_open_floor():
    b = default_bounds(10.0, dims=3)
    d = b.border_distance([[5.0, 5.0, 0.1], [5.0, 5.0, 9.5]])
    np.testing.assert_allclose(d, [5.0, 0.5])


def test_augmented_matrix_layout():
    b = default_bounds(20.0)
    A = np.array([[1.0, 10.0], [10.0, 10.0], [15, 15]])
    B = np.array([[1.5, 10.0], [10.0, 10.5]])
    aug = augment_in_out(A, B, b, v_thresh=2.0)
    M = aug.matrix
    assert M.shape == (5, 5)
    assert M[0, 0] == pytest.approx(0.5)
    assert M[2, 0] == aug.large  # too far
    np.testing.assert_allclose(M[:3, 2], [1.0, 10.0, 5.0])  # OUT costs: border distances
    np.testing.assert_allclose(M[3, :2], [1.5, 9.5])  # IN costs
    np.testing.assert_array_equal(M[3:, 2:], 0)


def in_out_fixture():
    """Four particles; one leaves at the right border, a new one enters at the bottom."""
    frame_f = np.array([[19.6, 10.0], [5.0, 5.0], [8.0, 12.0], [12.0, 6.0]])
    frame_g = np.array([[5.3, 5.1], [8.2, 12.3], [12.1, 6.4], [3.0, 0.3]])
    return frame_f, frame_g


def test_in_out_fixture():
    A, B = in_out_fixture()
    bounds = default_bounds(20.0)
    aug = augment_in_out(A, B, bounds, v_thresh=2.8)
    assign = hungarian(aug.matrix)
    assert assignment_cost(aug.matrix, assign) == pytest.approx(assignment_bruteforce(aug.matrix))
    matches, outs, ins = aug.decode(assign)
    assert sorted(matches) == [(1, 0), (2, 1), (3, 2)]
    assert outs == [0] and ins == [3]


def test_pure_particle_matching_far_from_borders():
    A = np.array([[8.0, 8.0], [10.0, 10.0], [12.0, 8.0]])
    B = A + 0.3
    matches, outs, ins = match_in_out(A, B, default_bounds(20.0), 2.8)
    assert sorted(matches) == [(0, 0), (1, 1), (2, 2)] and outs == [] and ins == []


def test_unequal_counts_square_matrix():
    aug = augment_in_out(np.zeros((3, 2)) + 5, np.zeros((1, 2)) + 5, default_bounds(20.0), 1.0)
    assert aug.matrix.shape == (4, 4)


def test_track_hungarian_breaks_at_gap():
    rows = [(f, 5 + 0.5 * f, 5) for f in range(6) if f != 3]
    trajs = track_hungarian(dets_from(rows), default_bounds(20.0), 2.8)
    assert sorted(len(t) for t in trajs) == [2, 3]


# ------------------------------------------------------------------- MLH

def particle_set(rows):
    return ParticleSet(dets_from(rows), 2)


def test_full_row_in_window():
    ps = particle_set([(f, 5 + 0.5 * f, 5) for f in range(5)])
    table = multi_level_match(ps, 2, default_bounds(20.0), 2.8)
    assert len(table.rows) == 1 and sorted(table.rows[0]) == [0, 1, 2, 3, 4]


def test_gap_at_centre_recovered():
    ps = particle_set([(f, 5 + 0.5 * f, 5) for f in range(5) if f != 2])
    table = multi_level_match(ps, 2, default_bounds(20.0), 2.8)
    full = [r for r in table.rows if len(r) == 4]
    assert len(full) == 1 and sorted(full[0]) == [0, 1, 3, 4]
    assert add_iteration(table, ps) == 1
    new = full[0][2]
    np.testing.assert_allclose(ps.pos(2, new), [6.0, 5.0])


def test_noise_particle_is_isolated_and_deleted():
    rows = [(f, 5 + 0.5 * f, 5) for f in range(5)] + [(2, 15.0, 15.0)]
    ps = particle_set(rows)
    table = multi_level_match(ps, 2, default_bounds(20.0), 2.8)
    single = [r for r in table.rows if len(r) == 1]
    assert single == [{2: 5}]
    assert delete_iteration(table, ps) == 1
    assert 5 not in ps.ids(2)


def test_add_iteration_fills_interior_only():
    ps = particle_set([(0, 0.0, 0.0), (2, 1.0, 0.0), (3, 1.5, 0.0)])
    table = ParticleTable(2, [{0: 0, 2: 1, 3: 2}])
    assert add_iteration(table, ps) == 1
    assert sorted(table.rows[0]) == [0, 1, 2, 3]
    np.testing.assert_allclose(ps.pos(1, table.rows[0][1]), [0.5, 0.0])


def test_add_iteration_leaves_short_rows():
    ps = particle_set([(0, 0.0, 0.0), (2, 1.0, 0.0)])
    table = ParticleTable(2, [{0: 0, 2: 1}])
    assert add_iteration(table, ps) == 0


def test_delete_needs_presence_at_centre():
    ps = particle_set([(0, 0.0, 0.0), (1, 0.5, 0.0)])
    table = ParticleTable(2, [{0: 0, 1: 1}])
    assert delete_iteration(table, ps) == 0
    table = ParticleTable(2, [{1: 0, 2: 1, 3: 2, 4: 3}])
    assert delete_iteration(table, ps) == 0


def test_table_check_rejects_duplicates():
    with pytest.raises(AssertionError):
        ParticleTable(2, [{1: 0}, {1: 0}]).check()


def test_mlh_two_walkers_with_gaps():
    rows = [(f, 2 + 0.5 * f, 5) for f in range(12) if f not in (4, 8)]
    rows += [(f, 2 + 0.5 * f, 12) for f in range(12) if f not in (6,)]
    res = track_mlh(dets_from(rows), default_bounds(20.0), 2.8)
    assert len(res.trajectories) == 2
    assert sorted(len(t) for t in res.trajectories) == [12, 12]
    assert res.added == 3


def test_mlh_empty():
    assert track_mlh([], default_bounds(20.0), 2.8).trajectories == []


def test_bounds_custom():
    b = Bounds([0, 0], [4, 2])
    np.testing.assert_allclose(b.border_distance([[1, 1], [3.5, 0.2]]), [1, 0.2])
