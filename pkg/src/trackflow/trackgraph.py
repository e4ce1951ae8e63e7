"""Min-cost-flow tracking graph over detections.

Each detection ``i`` contributes a begin node ``b_i`` and an end node ``e_i``
joined by a detection arc ``b_i -> e_i`` carrying the (usually negative)
detection cost. Links between detections are arcs ``e_i -> b_j``. The source
feeds end nodes (``s -> e_i``) and begin nodes drain to the sink
(``b_i -> t``), both at zero cost, so the first and last detection of a
trajectory do not collect their detection reward. Every begin/end node is
split to capacity 1 so that no detection is shared.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .config import CostParams
from .detections import Detection, Trajectory, positions, renumber, sort_detections
from .lp import EQ, LE, LinearProgram, Status, solve
from .netflow import FlowNetwork, split_nodes, successive_shortest_paths

log = logging.getLogger(__name__)

_erfc = np.frompyfunc(math.erfc, 1, 1)


def gauss_error(v, vmax: float):
    """``1/2 + 1/2 erf((vmax/2 - v) / (vmax/4))``: probability of a speed ``v``.

    Accepts scalars or arrays; evaluated through ``erfc`` to keep precision
    in the far tail.
    """
    x = (np.asarray(v, dtype=float) - vmax / 2.0) / (vmax / 4.0)
    if x.ndim == 0:
        return 0.5 * math.erfc(float(x))
    return 0.5 * _erfc(x).astype(float)


def motion_cost(dist, dt, vmax: float, min_prob: float = 1e-12):
    """``-log E(dist / dt)``; ``inf`` where the speed exceeds ``vmax`` or E underflows."""
    speed = np.asarray(dist, dtype=float) / dt
    e = np.asarray(gauss_error(speed, vmax), dtype=float)
    out = np.full(e.shape, np.inf)
    ok = (speed <= vmax) & (e >= min_prob)
    out[ok] = -np.log(e[ok])
    return out if out.ndim else float(out)


def gap_cost(df, bj: float):
    """Frame-gap penalty ``-log(bj ** (df - 1))``, zero for consecutive frames."""
    return -(np.asarray(df, dtype=float) - 1.0) * math.log(bj)


def link_cost(d_i: Detection, d_j: Detection, params: CostParams) -> float:
    """Cost of linking ``d_i`` to a later ``d_j``; ``inf`` when the arc is not created."""
    df = d_j.frame - d_i.frame
    if df < 1 or df > params.fmax:
        return math.inf
    dist = float(np.linalg.norm(d_j.pos - d_i.pos))
    mc = motion_cost(dist, df * params.frame_period, params.vmax, params.min_prob)
    return float(mc + gap_cost(df, params.bj))


def detection_cost(d: Detection, params: CostParams) -> float:
    """``log(1 - P_det)`` plus ``log(bbmin / d_entry)`` when the nearest entry is farther than ``bbmin``."""
    c = math.log(1.0 - d.conf)
    if params.entries:
        pts = np.asarray(params.entries, dtype=float)
        pts = np.hstack([pts, np.zeros((len(pts), 3 - pts.shape[1]))]) if pts.shape[1] < 3 else pts
        dist = float(np.min(np.linalg.norm(pts - d.pos, axis=1)))
        if dist > params.bbmin:
            c += math.log(params.bbmin / dist)
    return c


def candidate_links(frames: np.ndarray, pos: np.ndarray, fmax: int):
    """All pairs ``(i, j)`` with ``1 <= frames[j] - frames[i] <= fmax``.

    ``frames`` must be sorted. Returns index arrays and distances.
    """
    uniq, start = np.unique(frames, return_index=True)
    stop = np.append(start[1:], len(frames))
    I, J = [], []
    for a, f in enumerate(uniq):
        ia = np.arange(start[a], stop[a])
        for b in range(a + 1, len(uniq)):
            if uniq[b] - f > fmax:
                break
            jb = np.arange(start[b], stop[b])
            I.append(np.repeat(ia, jb.size))
            J.append(np.tile(jb, ia.size))
    if not I:
        e = np.zeros(0, dtype=np.int64)
        return e, e, np.zeros(0)
    I = np.concatenate(I)
    J = np.concatenate(J)
    return I, J, np.linalg.norm(pos[J] - pos[I], axis=1)


@dataclass
class TrackingGraph:
    dets: list
    params: CostParams
    net: FlowNetwork
    det_cost: np.ndarray
    link_i: np.ndarray
    link_j: np.ndarray
    link_cost: np.ndarray
    arc_in: np.ndarray
    arc_out: np.ndarray
    arc_det: np.ndarray
    arc_link: np.ndarray
    counts: dict = field(default_factory=dict)

    @property
    def n_dets(self) -> int:
        return len(self.dets)


LinkExtra = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def build(dets, params: CostParams = None, link_extra: Optional[LinkExtra] = None) -> TrackingGraph:
    """Build the tracking network for ``dets`` (sorted by frame on entry).

    ``link_extra(i, j, dt)`` may return additional link costs for candidate
    pairs (indices into the sorted detections); ``inf`` removes the arc.
    """
    params = params or CostParams()
    dets = sort_detections(dets)
    n = len(dets)
    frames = np.array([d.frame for d in dets], dtype=np.int64)
    pos = positions(dets)
    dcost = np.array([detection_cost(d, params) for d in dets])

    I, J, dist = candidate_links(frames, pos, params.fmax)
    df = frames[J] - frames[I]
    dt = df * params.frame_period
    lc = motion_cost(dist, dt, params.vmax, params.min_prob) + gap_cost(df, params.bj)
    if link_extra is not None and I.size:
        keep = np.isfinite(lc)
        extra = np.full(lc.shape, 0.0)
        extra[keep] = link_extra(I[keep], J[keep], dt[keep])
        lc = lc + extra
    keep = np.isfinite(lc)
    I, J, lc = I[keep], J[keep], lc[keep]

    # node ids before splitting: s = 0, t = 1, b_i = 2 + 2i, e_i = 3 + 2i
    b = 2 + 2 * np.arange(n)
    e = b + 1
    tails = np.concatenate([np.zeros(n, np.int64), b, b, e[I]])
    heads = np.concatenate([e, np.ones(n, np.int64), e, b[J]])
    costs = np.concatenate([np.zeros(n), np.zeros(n), dcost, lc])
    base = FlowNetwork(2 + 2 * n, tails, heads, costs, np.ones(tails.size), 0, 1)
    net, _ = split_nodes(base)
    idx = np.arange(n)
    L = I.size
    counts = {"detections": n, "links": int(L), "arcs": net.n_arcs, "nodes": net.n_nodes}
    log.debug("tracking graph: %s", counts)
    return TrackingGraph(dets, params, net, dcost, I, J, lc, arc_in=idx, arc_out=n + idx,
                         arc_det=2 * n + idx, arc_link=3 * n + np.arange(L), counts=counts)


@dataclass
class TrackingSolution:
    trajectories: list
    total_cost: float
    flow: np.ndarray
    n_paths: int
    marginal_costs: list = field(default_factory=list)


def _check_constraints(g: TrackingGraph, flow: np.ndarray, tol: float = 1e-6) -> None:
    n = g.n_dets
    f_in, f_out, f_det = flow[g.arc_in], flow[g.arc_out], flow[g.arc_det]
    f_t = flow[g.arc_link]
    out_links = np.bincount(g.link_i, weights=f_t, minlength=n)
    in_links = np.bincount(g.link_j, weights=f_t, minlength=n)
    if np.abs(flow - np.round(flow)).max(initial=0.0) > tol:
        raise AssertionError("fractional tracking flow")
    checks = {
        "end-node conservation": np.abs(f_in + f_det - out_links),
        "begin-node conservation": np.abs(in_links - f_out - f_det),
        "end-node capacity": np.maximum(f_in + f_det - 1.0, 0.0),
        "begin-node capacity": np.maximum(f_out + f_det - 1.0, 0.0),
    }
    for name, viol in checks.items():
        if viol.size and viol.max() > tol:
            raise AssertionError(f"tracking flow violates {name}")


def decode(g: TrackingGraph, flow: np.ndarray) -> list:
    """Turn a 0/1 tracking flow into trajectories.

    A trajectory that ends at a detection where another starts is joined
    into one.
    """
    n = g.n_dets
    f = np.round(flow).astype(np.int64)
    succ = np.full(n, -1, dtype=np.int64)
    used = g.arc_link[f[g.arc_link] > 0]
    link_pos = used - g.arc_link[0] if used.size else used
    succ[g.link_i[link_pos]] = g.link_j[link_pos]
    f_det = f[g.arc_det]
    chains = []
    for i in range(n):
        if f[g.arc_in[i]] <= 0:
            continue
        chain = [i]
        j = succ[i]
        while j >= 0:
            chain.append(int(j))
            if f_det[j] > 0:
                j = succ[j]
            else:
                break
        chains.append(chain)
    # join a chain ending at i with one starting at i
    start_at = {c[0]: c for c in chains}
    ends = {c[-1] for c in chains}
    merged = []
    for c in chains:
        if c[0] in ends:
            continue
        cur = list(c)
        while cur[-1] in start_at:
            cur.extend(start_at[cur[-1]][1:])
        merged.append(cur)
    lc = dict(zip(zip(g.link_i.tolist(), g.link_j.tolist()), g.link_cost.tolist()))
    trajs = []
    for chain in merged:
        cost = sum(lc[(a, b)] for a, b in zip(chain[:-1], chain[1:]))
        cost += sum(float(g.det_cost[k]) for k in chain[1:-1] if f_det[k] > 0)
        dets = [g.dets[k] for k in chain]
        trajs.append(Trajectory(0, [d.frame for d in dets], [d.id for d in dets],
                                positions(dets), cost))
    return renumber(trajs)


def solve_tracking(g: TrackingGraph) -> TrackingSolution:
    """Globally optimal trajectory set by successive shortest paths.

    Augments while the next shortest path has negative cost, which yields
    the minimum-cost flow over all flow values.
    """
    if g.n_dets == 0:
        return TrackingSolution([], 0.0, np.zeros(g.net.n_arcs), 0)
    ps = successive_shortest_paths(g.net, "until_nonnegative")
    _check_constraints(g, ps.flow)
    return TrackingSolution(decode(g, ps.flow), ps.total_cost, ps.flow, int(ps.flow_value),
                            ps.marginal_costs)


MAX_LP_DETECTIONS = 60


def tracking_lp(g: TrackingGraph) -> LinearProgram:
    """Explicit LP over ``f_in, f_out, f_det`` per detection and ``f_t`` per link."""
    n, L = g.n_dets, g.link_i.size
    nv = 3 * n + L
    c = np.concatenate([np.zeros(2 * n), g.det_cost, g.link_cost])
    rows, rel, rhs = [], [], []
    for i in range(n):
        out_l = 3 * n + np.flatnonzero(g.link_i == i)
        in_l = 3 * n + np.flatnonzero(g.link_j == i)
        r = np.zeros(nv)  # f_in + f_det = sum of outgoing links
        r[i] = 1.0
        r[2 * n + i] = 1.0
        r[out_l] = -1.0
        rows.append(r), rel.append(EQ), rhs.append(0.0)
        r = np.zeros(nv)  # sum of incoming links = f_out + f_det
        r[in_l] = 1.0
        r[n + i] = -1.0
        r[2 * n + i] = -1.0
        rows.append(r), rel.append(EQ), rhs.append(0.0)
        r = np.zeros(nv)
        r[i] = 1.0
        r[2 * n + i] = 1.0
        rows.append(r), rel.append(LE), rhs.append(1.0)
        r = np.zeros(nv)
        r[n + i] = 1.0
        r[2 * n + i] = 1.0
        rows.append(r), rel.append(LE), rhs.append(1.0)
    A = np.array(rows).reshape(len(rows), nv)
    return LinearProgram(c=c, A=A, b=rhs, relations=rel, sense="min")


def solve_tracking_via_lp(g: TrackingGraph) -> TrackingSolution:
    """Same answer as :func:`solve_tracking`, via the simplex solver (small inputs only)."""
    n = g.n_dets
    if n > MAX_LP_DETECTIONS:
        raise ValueError(f"LP tracking oracle limited to {MAX_LP_DETECTIONS} detections")
    if n == 0:
        return TrackingSolution([], 0.0, np.zeros(g.net.n_arcs), 0)
    res = solve(tracking_lp(g))
    if res.status != Status.OPTIMAL:
        raise RuntimeError(f"tracking LP returned {res.status.value}")
    x = res.x
    if np.abs(x - np.round(x)).max(initial=0.0) > 1e-6:
        raise AssertionError("tracking LP returned a fractional vertex")
    x = np.round(x)
    flow = np.zeros(g.net.n_arcs)
    flow[g.arc_in] = x[:n]
    flow[g.arc_out] = x[n:2 * n]
    flow[g.arc_det] = x[2 * n:3 * n]
    flow[g.arc_link] = x[3 * n:]
    # inner split arcs: e_i carries f_in + f_det, b_i carries f_det + f_out
    inner = 3 * n + g.link_i.size
    b_inner = inner + 2 * np.arange(n)
    flow[b_inner] = x[n:2 * n] + x[2 * n:3 * n]
    flow[b_inner + 1] = x[:n] + x[2 * n:3 * n]
    _check_constraints(g, flow)
    return TrackingSolution(decode(g, flow), float(g.net.cost @ flow), flow,
                            int(x[:n].sum()))
