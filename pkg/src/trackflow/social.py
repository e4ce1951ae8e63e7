"""Social context for tracking: motion prediction, grouping and the EM loop.

After a first solve with distance-only link costs, every link ``(i, j)`` that
leaves a detection with known velocity receives two extra terms:

* ``C_SFM``: distance from ``p_j`` to the constant-velocity prediction of
  ``i`` corrected by a repulsion from nearby pedestrians of other groups,
* ``C_GR``: distance from ``p_j`` to the prediction that uses the mean
  velocity of the other members of ``i``'s group.

Both are ``-log E(distance / dt)``. Velocities and group labels are then
re-estimated from the new solution and the loop repeats.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .config import CostParams, SocialParams
from .detections import Trajectory, renumber, sort_detections
from .trackgraph import build, motion_cost, solve_tracking, solve_tracking_via_lp

log = logging.getLogger(__name__)

_UNIT_X = np.array([1.0, 0.0, 0.0])


def predict_cv(p, v, dt: float) -> np.ndarray:
    """Constant-velocity prediction ``p + v dt``."""
    return np.asarray(p, dtype=float) + np.asarray(v, dtype=float) * dt


def avoidance_acceleration(p_i, p_others, same_group, alpha: float, dt: float,
                           radius: float = 1.0) -> np.ndarray:
    """Repulsion acting on ``i`` from predicted neighbour positions.

    ``p_i`` and ``p_others`` are already-predicted positions; neighbours with
    ``same_group`` true, or farther than ``radius``, are ignored. Each
    remaining neighbour contributes ``exp(-d / (alpha dt))`` along the unit
    vector pointing from it to ``i`` (``+x`` for coincident points).
    """
    p_i = np.asarray(p_i, dtype=float)
    P = np.asarray(p_others, dtype=float).reshape(-1, p_i.size)
    same = np.asarray(same_group, dtype=bool).reshape(-1)
    acc = np.zeros(p_i.size)
    if P.shape[0] == 0:
        return acc
    diff = p_i - P
    d = np.linalg.norm(diff, axis=1)
    use = (~same) & (d <= radius)
    if not use.any():
        return acc
    unit = np.zeros_like(diff)
    nz = d > 0
    unit[nz] = diff[nz] / d[nz, None]
    unit[~nz] = _UNIT_X[: p_i.size]
    w = np.exp(-d / (alpha * dt))
    return (w[use, None] * unit[use]).sum(axis=0)


def predict_sfm(p, v, acc, dt: float) -> np.ndarray:
    """``p + (v + a dt) dt``."""
    return np.asarray(p, dtype=float) + (np.asarray(v, dtype=float) + np.asarray(acc) * dt) * dt


def sfm_cost(predicted, p_j, dt: float, vmax: float, min_prob: float = 1e-12) -> float:
    return motion_cost(float(np.linalg.norm(np.asarray(p_j) - predicted)), dt, vmax, min_prob)


def group_prediction(p, member_velocities, dt: float):
    """``p + mean(v_others) dt``, or ``None`` without other members."""
    V = np.asarray(member_velocities, dtype=float)
    if V.size == 0:
        return None
    return np.asarray(p, dtype=float) + V.reshape(-1, len(p)).mean(axis=0) * dt


def group_cost(p, member_velocities, p_j, dt: float, vmax: float, min_prob: float = 1e-12) -> float:
    """Grouping cost; 0 when the detection has no other group members."""
    pred = group_prediction(p, member_velocities, dt)
    if pred is None:
        return 0.0
    return motion_cost(float(np.linalg.norm(np.asarray(p_j) - pred)), dt, vmax, min_prob)


def velocities(traj: Trajectory, frame_period: float) -> np.ndarray:
    """Backward finite differences; the first row is NaN."""
    P = np.asarray(traj.positions, dtype=float)
    V = np.full(P.shape, np.nan)
    if len(traj) > 1:
        dt = np.diff(np.asarray(traj.frames, dtype=float)) * frame_period
        V[1:] = np.diff(P, axis=0) / dt[:, None]
    return V


def _log_normal(x, mu, sigma):
    return -0.5 * ((x - mu) / sigma) ** 2 - math.log(sigma * math.sqrt(2 * math.pi))


def group_score(a: Trajectory, b: Trajectory, frame_period: float, sp: SocialParams):
    """Sum over co-visible frames of ``log P_group - log P_individual`` (None if < 2 frames)."""
    fa = {f: k for k, f in enumerate(a.frames)}
    common = [(fa[f], kb) for kb, f in enumerate(b.frames) if f in fa]
    if len(common) < 2:
        return None
    ia = np.array([c[0] for c in common])
    ib = np.array([c[1] for c in common])
    d = np.linalg.norm(a.positions[ia] - b.positions[ib], axis=1)
    score = (_log_normal(d, sp.group_dist_mean, sp.group_dist_std)
             - _log_normal(d, sp.indiv_dist_mean, sp.indiv_dist_std)).sum()
    va, vb = velocities(a, frame_period)[ia], velocities(b, frame_period)[ib]
    ok = ~(np.isnan(va).any(axis=1) | np.isnan(vb).any(axis=1))
    if ok.any():
        dv = np.linalg.norm(va[ok] - vb[ok], axis=1)
        score += (_log_normal(dv, 0.0, sp.group_speed_std)
                  - _log_normal(dv, 0.0, sp.indiv_speed_std)).sum()
    return float(score)


def detect_groups(trajs, frame_period: float = 0.4, sp: SocialParams = None) -> list:
    """Group label per trajectory (0 = ungrouped, groups numbered from 1)."""
    sp = sp or SocialParams()
    n = len(trajs)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(n):
        for b in range(a + 1, n):
            s = group_score(trajs[a], trajs[b], frame_period, sp)
            if s is not None and s > 0:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    roots = [find(k) for k in range(n)]
    sizes = {}
    for r in roots:
        sizes[r] = sizes.get(r, 0) + 1
    labels, names = [], {}
    for r in roots:
        if sizes[r] < 2:
            labels.append(0)
        else:
            if r not in names:
                names[r] = len(names) + 1
            labels.append(names[r])
    return labels


@dataclass
class TrackState:
    """Per-detection latent state derived from a trajectory set."""

    track: np.ndarray  # trajectory index, -1 if untracked
    velocity: np.ndarray  # NaN rows where unknown
    group: np.ndarray  # 0 = ungrouped / untracked


def track_state(dets, trajs, cp: CostParams, sp: SocialParams) -> TrackState:
    index = {d.id: k for k, d in enumerate(dets)}
    n = len(dets)
    track = np.full(n, -1, dtype=np.int64)
    vel = np.full((n, 3), np.nan)
    group = np.zeros(n, dtype=np.int64)
    labels = detect_groups(trajs, cp.frame_period, sp) if sp.use_groups else [0] * len(trajs)
    for t_idx, (t, g) in enumerate(zip(trajs, labels)):
        V = velocities(t, cp.frame_period)
        for k, did in enumerate(t.det_ids):
            i = index.get(did)
            if i is None:
                continue
            track[i] = t_idx
            vel[i] = V[k]
            group[i] = g
    return TrackState(track, vel, group)


def social_link_costs(dets, state: TrackState, cp: CostParams, sp: SocialParams):
    """Build the ``link_extra`` callback for :func:`trackgraph.build`."""
    pos = np.array([[d.x, d.y, d.z] for d in dets], dtype=float).reshape(len(dets), 3)
    frames = np.array([d.frame for d in dets], dtype=np.int64)
    has_v = ~np.isnan(state.velocity).any(axis=1)
    tracked = state.track >= 0
    v0 = np.where(has_v[:, None], state.velocity, 0.0)
    by_frame = {}
    for i in np.flatnonzero(tracked):
        by_frame.setdefault(int(frames[i]), []).append(int(i))

    cache = {}

    def predictions(i: int, dt: float):
        key = (i, dt)
        if key in cache:
            return cache[key]
        p_sfm = p_gr = None
        if sp.use_sfm:
            others = [m for m in by_frame.get(int(frames[i]), []) if m != i]
            pi = predict_cv(pos[i], v0[i], dt)
            if others:
                om = np.array(others)
                pm = pos[om] + v0[om] * dt
                same = (state.group[om] == state.group[i]) & (state.group[i] != 0)
                acc = avoidance_acceleration(pi, pm, same, sp.alpha, dt, sp.neighborhood)
            else:
                acc = np.zeros(3)
            p_sfm = predict_sfm(pos[i], v0[i], acc, dt)
        if sp.use_groups and state.group[i] != 0:
            mates = [m for m in by_frame.get(int(frames[i]), [])
                     if m != i and state.group[m] == state.group[i]
                     and state.track[m] != state.track[i] and has_v[m]]
            if mates:
                p_gr = group_prediction(pos[i], v0[np.array(mates)], dt)
        cache[key] = (p_sfm, p_gr)
        return cache[key]

    def extra(I, J, dt):
        out = np.zeros(I.size)
        for k in np.flatnonzero(has_v[I]):
            i, j, d = int(I[k]), int(J[k]), float(dt[k])
            p_sfm, p_gr = predictions(i, d)
            c = 0.0
            if p_sfm is not None:
                c += motion_cost(float(np.linalg.norm(pos[j] - p_sfm)), d, cp.vmax, cp.min_prob)
            if p_gr is not None:
                c += motion_cost(float(np.linalg.norm(pos[j] - p_gr)), d, cp.vmax, cp.min_prob)
            out[k] = c
        return out

    return extra


@dataclass
class EMResult:
    trajectories: list
    iterations: int
    converged: bool
    cycled: bool = False
    total_cost: float = 0.0
    history: list = field(default_factory=list)


def _signature(trajs) -> frozenset:
    return frozenset(tuple(t.det_ids) for t in trajs)


def em_track(dets, cp: CostParams = None, sp: SocialParams = None, solver: str = "ssp") -> EMResult:
    """Alternate between solving the tracking graph and updating latent state.

    Stops when the trajectory set repeats the previous one (converged), when
    it repeats an older one (cycle, not converged) or after
    ``sp.iterations`` solves.
    """
    cp = cp or CostParams()
    sp = sp or SocialParams()
    dets = sort_detections(dets)
    solve = solve_tracking_via_lp if solver == "lp" else solve_tracking
    sol = solve(build(dets, cp))
    history = [_signature(sol.trajectories)]
    if not (sp.use_sfm or sp.use_groups) or sp.iterations == 1:
        return EMResult(sol.trajectories, 1, not (sp.use_sfm or sp.use_groups),
                        total_cost=sol.total_cost, history=history)
    converged = cycled = False
    it = 1
    while it < sp.iterations:
        state = track_state(dets, sol.trajectories, cp, sp)
        extra = social_link_costs(dets, state, cp, sp)
        sol = solve(build(dets, cp, link_extra=extra))
        it += 1
        sig = _signature(sol.trajectories)
        if sig == history[-1]:
            converged = True
        elif sig in history:
            cycled = True
        history.append(sig)
        log.debug("EM iteration %d: %d trajectories", it, len(sol.trajectories))
        if converged or cycled:
            break
    return EMResult(sol.trajectories, it, converged, cycled, sol.total_cost, history)


def _batches(frames, batch: int, overlap: int):
    lo, hi = int(min(frames)), int(max(frames))
    step = batch - overlap
    start = lo
    while True:
        yield start, start + batch
        if start + batch > hi:
            break
        start += step


def stitch(prev: list, new: list, overlap_frames: set, costs_prev=None, costs_new=None) -> list:
    """Merge trajectories of consecutive batches through shared detections.

    Each new trajectory is joined to the previous trajectory sharing the most
    detection ids inside the overlap (ties: lower combined cost, then smaller
    first id). Inside the overlap the new batch's assignment is kept.
    """
    claimed = {did for t in new for f, did in zip(t.frames, t.det_ids) if f in overlap_frames}
    candidates = []
    for bi, b in enumerate(new):
        ids_b = {did for f, did in zip(b.frames, b.det_ids) if f in overlap_frames}
        for ai, a in enumerate(prev):
            shared = len(ids_b.intersection(a.det_ids))
            if shared:
                candidates.append((-shared, a.cost + b.cost, min(a.det_ids), ai, bi))
    candidates.sort()
    used_a, used_b, pairs = set(), set(), {}
    for _, _, _, ai, bi in candidates:
        if ai in used_a or bi in used_b:
            continue
        used_a.add(ai)
        used_b.add(bi)
        pairs[bi] = ai
    out = []
    for ai, a in enumerate(prev):
        if ai in used_a:
            continue
        keep = [k for k, did in enumerate(a.det_ids) if did not in claimed]
        if len(keep) >= 2:
            out.append(_subset(a, keep))
    for bi, b in enumerate(new):
        if bi in pairs:
            a = prev[pairs[bi]]
            first = b.frames[0]
            keep = [k for k, f in enumerate(a.frames) if f < first and a.det_ids[k] not in claimed]
            head = _subset(a, keep) if keep else None
            if head is not None:
                out.append(Trajectory(0, head.frames + b.frames, head.det_ids + b.det_ids,
                                      np.vstack([head.positions, b.positions]), a.cost + b.cost))
                continue
        out.append(b)
    return out


def _subset(t: Trajectory, keep) -> Trajectory:
    keep = list(keep)
    return Trajectory(t.track_id, [t.frames[k] for k in keep], [t.det_ids[k] for k in keep],
                      t.positions[keep], t.cost)


@dataclass
class BatchResult:
    trajectories: list
    batches: int
    iterations: list
    converged: list


def track_batched(dets, cp: CostParams = None, sp: SocialParams = None, solver: str = "ssp") -> BatchResult:
    """Run :func:`em_track` over overlapping frame batches and stitch the results."""
    cp = cp or CostParams()
    sp = sp or SocialParams()
    dets = sort_detections(dets)
    if not dets:
        return BatchResult([], 0, [], [])
    frames = [d.frame for d in dets]
    result, its, conv = [], [], []
    prev_end = None
    count = 0
    for lo, hi in _batches(frames, sp.batch, sp.overlap):
        part = [d for d in dets if lo <= d.frame < hi]
        count += 1
        if not part:
            continue
        em = em_track(part, cp, sp, solver)
        its.append(em.iterations)
        conv.append(em.converged)
        if prev_end is None:
            result = em.trajectories
        else:
            overlap = set(range(lo, prev_end))
            result = stitch(result, em.trajectories, overlap)
        prev_end = hi
    return BatchResult(renumber(result), count, its, conv)
