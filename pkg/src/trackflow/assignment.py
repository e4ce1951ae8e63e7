"""Frame-to-frame assignment trackers.

* :func:`hungarian`: minimum-cost perfect assignment (compiled kernel).
* :func:`augment_in_out`: cost matrix with IN/OUT states so that particles
  can enter or leave through the field-of-view borders.
* :func:`track_hungarian`: consecutive-frame linking with IN/OUT states.
* :func:`track_mlh`: five-frame multi-level matching with gap filling and
  outlier deletion followed by a final frame-to-frame pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _backend
from .detections import Detection, Trajectory, renumber, sort_detections


def hungarian(cost) -> np.ndarray:
    """Column assigned to each row in a minimum-cost perfect matching.

    The matrix must be square with finite entries. Among optimal
    assignments the result is deterministic for a given matrix.
    """
    C = np.asarray(cost, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("hungarian needs a square matrix")
    if C.size and not np.all(np.isfinite(C)):
        raise ValueError("cost entries must be finite")
    return np.asarray(_backend.hungarian(np.ascontiguousarray(C)), dtype=np.int64)


def assignment_cost(cost, assign) -> float:
    C = np.asarray(cost, dtype=float)
    return float(C[np.arange(len(assign)), assign].sum()) if len(assign) else 0.0


@dataclass
class Bounds:
    """Axis-aligned field of view; lower borders listed in ``open_lower`` are ignored."""

    lower: Sequence[float]
    upper: Sequence[float]
    open_lower: tuple = ()

    def border_distance(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        d = len(self.lower)
        if P.shape[0] == 0:
            return np.zeros(0)
        parts = []
        for ax in range(d):
            if ax not in self.open_lower:
                parts.append(P[:, ax] - self.lower[ax])
            parts.append(self.upper[ax] - P[:, ax])
        return np.maximum(np.min(np.stack(parts, axis=1), axis=1), 0.0)


def default_bounds(scene: float = 20.0, dims: int = 2) -> Bounds:
    """Square scene ``[0, scene]^dims``; for 3D the bottom z border is open."""
    return Bounds([0.0] * dims, [scene] * dims, open_lower=(2,) if dims == 3 else ())


@dataclass
class AugmentedCostMatrix:
    matrix: np.ndarray
    n_from: int
    n_to: int
    large: float

    def decode(self, assign) -> tuple:
        """Split an assignment into ``(matches, outs, ins)`` index lists."""
        M, N = self.n_from, self.n_to
        matches, outs, ins = [], [], []
        for r, c in enumerate(assign):
            if r < M and c < N:
                if self.matrix[r, c] >= self.large:
                    outs.append(r)
                    ins.append(int(c))
                else:
                    matches.append((r, int(c)))
            elif r < M:
                outs.append(r)
            elif c < N:
                ins.append(int(c))
        return matches, sorted(outs), sorted(ins)


def augment_in_out(P_from, P_to, bounds: Bounds, v_thresh: float, forbid=None) -> AugmentedCostMatrix:
    """``(M+N)`` square matrix: distances, OUT columns, IN rows, zero corner.

    Row ``k`` (frame-f particle) can take any OUT column at its border
    distance; column ``l`` (frame-f+1 particle) can take any IN row at its
    border distance. Distances above ``v_thresh``, and pairs flagged in the
    optional boolean ``forbid`` matrix, become a large constant.
    """
    A = np.asarray(P_from, dtype=float).reshape(-1, len(bounds.lower)) if len(P_from) else np.zeros((0, len(bounds.lower)))
    B = np.asarray(P_to, dtype=float).reshape(-1, len(bounds.lower)) if len(P_to) else np.zeros((0, len(bounds.lower)))
    M, N = A.shape[0], B.shape[0]
    D = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2) if M and N else np.zeros((M, N))
    out_c = bounds.border_distance(A)
    in_c = bounds.border_distance(B)
    finite_max = max(float(D[D <= v_thresh].max(initial=0.0)), float(out_c.max(initial=0.0)),
                     float(in_c.max(initial=0.0)))
    large = 2.0 * (M + N + 1) * (finite_max + 1.0)
    C = np.zeros((M + N, N + M))
    top = D.copy()
    top[top > v_thresh] = large
    if forbid is not None:
        top[np.asarray(forbid, dtype=bool)] = large
    C[:M, :N] = top
    C[:M, N:] = out_c[:, None]
    C[M:, :N] = in_c[None, :]
    return AugmentedCostMatrix(C, M, N, large)


def match_in_out(P_from, P_to, bounds: Bounds, v_thresh: float, forbid=None):
    """Matches between two particle sets allowing IN/OUT states."""
    if len(P_from) == 0 or len(P_to) == 0:
        return [], list(range(len(P_from))), list(range(len(P_to)))
    aug = augment_in_out(P_from, P_to, bounds, v_thresh, forbid)
    return aug.decode(hungarian(aug.matrix))


def _frames(dets):
    by = {}
    for d in sort_detections(dets):
        by.setdefault(d.frame, []).append(d)
    return by


def _dims(bounds: Bounds) -> int:
    return len(bounds.lower)


def link_frames(by_frame: dict, bounds: Bounds, v_thresh: float) -> list:
    """Frame-to-frame linking of ``{frame: [Detection]}`` with IN/OUT states."""
    d = _dims(bounds)
    tracks: list = []
    active: dict = {}  # index in previous frame -> track index
    prev_frame, prev = None, []
    for f in sorted(by_frame):
        cur = by_frame[f]
        new_active = {}
        if prev_frame is not None and f == prev_frame + 1 and prev and cur:
            A = np.array([[p.x, p.y, p.z][:d] for p in prev])
            B = np.array([[p.x, p.y, p.z][:d] for p in cur])
            matches, _, _ = match_in_out(A, B, bounds, v_thresh)
            for r, c in matches:
                t = active[r]
                tracks[t].append(cur[c])
                new_active[c] = t
        for c, det in enumerate(cur):
            if c not in new_active:
                tracks.append([det])
                new_active[c] = len(tracks) - 1
        active, prev, prev_frame = new_active, cur, f
    return renumber([Trajectory(0, [p.frame for p in t], [p.id for p in t],
                                np.array([[p.x, p.y, p.z] for p in t])) for t in tracks])


def track_hungarian(dets, bounds: Bounds, v_thresh: float) -> list:
    """Link detections in consecutive frames; a missed frame ends the track."""
    return link_frames(_frames(dets), bounds, v_thresh)


@dataclass
class ParticleTable:
    """Rows of candidate trajectories over the frames ``i-2 .. i+2``."""

    center: int
    rows: list = field(default_factory=list)  # each row: {frame: particle id}

    @property
    def frames(self) -> range:
        return range(self.center - 2, self.center + 3)

    def used(self, frame: int) -> set:
        return {r[frame] for r in self.rows if frame in r}

    def check(self) -> None:
        for f in self.frames:
            ids = [r[f] for r in self.rows if f in r]
            if len(ids) != len(set(ids)):
                raise AssertionError(f"particle repeated in frame {f}")


class ParticleSet:
    """Mutable particles per frame used by the multi-level tracker."""

    def __init__(self, dets, dims: int):
        self.dims = dims
        self.frames: dict = {}
        self.next_id = 0
        for d in dets:
            self.frames.setdefault(d.frame, {})[d.id] = np.array([d.x, d.y, d.z][:dims], dtype=float)
            self.next_id = max(self.next_id, d.id + 1)
        self.added: set = set()

    def ids(self, frame: int) -> list:
        return sorted(self.frames.get(frame, {}))

    def pos(self, frame: int, pid: int) -> np.ndarray:
        return self.frames[frame][pid]

    def add(self, frame: int, p) -> int:
        pid = self.next_id
        self.next_id += 1
        self.frames.setdefault(frame, {})[pid] = np.asarray(p, dtype=float)
        self.added.add(pid)
        return pid

    def remove(self, frame: int, pid: int) -> None:
        self.frames.get(frame, {}).pop(pid, None)

    def detections(self) -> list:
        out = []
        for f in sorted(self.frames):
            for pid in sorted(self.frames[f]):
                p = self.frames[f][pid]
                xyz = list(p) + [0.0] * (3 - len(p))
                out.append(Detection(f, pid, xyz[0], xyz[1], xyz[2]))
        return out


# (source offset, destination offset) per level, relative to the centre frame
LEVELS = (
    ((0, -1), (0, 1)),
    ((0, -2), (0, 2)),
    ((-1, 1), (1, -1)),
    ((1, -2), (-1, 2)),
    ((1, 2), (-1, -2)),
)


def _match_rows(table: ParticleTable, ps: ParticleSet, src: int, dst: int, bounds: Bounds,
                v_step: float) -> None:
    """Extend rows that have ``src`` but no ``dst`` with a particle at ``dst``.

    A candidate already owned by another row is allowed when the two rows
    cover disjoint frames; the rows are then merged.
    """
    rows = [r for r in table.rows if src in r and dst not in r]
    if not rows:
        return
    owner = {r[dst]: r for r in table.rows if dst in r}
    cand = [pid for pid in ps.ids(dst) if pid not in owner or not (owner[pid].keys() & {src})]
    if not cand:
        return
    forbid = np.array([[pid in owner and bool(owner[pid].keys() & r.keys()) for pid in cand]
                       for r in rows])
    A = np.array([ps.pos(src, r[src]) for r in rows])
    B = np.array([ps.pos(dst, pid) for pid in cand])
    matches, _, _ = match_in_out(A, B, bounds, v_step * abs(dst - src), forbid)
    for r, c in matches:
        pid = cand[c]
        other = owner.get(pid)
        if other is None:
            rows[r][dst] = pid
        else:
            rows[r].update(other)
            table.rows = [x for x in table.rows if x is not other]


def multi_level_match(ps: ParticleSet, center: int, bounds: Bounds, v_step: float) -> ParticleTable:
    """Fill the five-frame table around ``center`` with the five matching levels."""
    i = center
    table = ParticleTable(i, [{i: pid} for pid in ps.ids(i)])
    for lev, pairs in enumerate(LEVELS, start=1):
        if lev == 3:
            # particles absent at i start their own rows from i-1 and i+1
            for f in (i - 1, i + 1):
                taken = table.used(f)
                table.rows.extend({f: pid} for pid in ps.ids(f) if pid not in taken)
        for so, do in pairs:
            _match_rows(table, ps, i + so, i + do, bounds, v_step)
    for f in table.frames:
        taken = table.used(f)
        table.rows.extend({f: pid} for pid in ps.ids(f) if pid not in taken)
    table.check()
    return table


def add_iteration(table: ParticleTable, ps: ParticleSet) -> int:
    """Interpolate interior gaps of rows with at least 3 particles; returns cells added."""
    added = 0
    while True:
        changed = 0
        for row in table.rows:
            if len(row) < 3:
                continue
            known = sorted(row)
            for f in range(known[0] + 1, known[-1]):
                if f in row:
                    continue
                a = max(k for k in known if k < f)
                b = min(k for k in known if k > f)
                w = (f - a) / (b - a)
                p = (1 - w) * ps.pos(a, row[a]) + w * ps.pos(b, row[b])
                row[f] = ps.add(f, p)
                changed += 1
        added += changed
        if not changed:
            return added


def delete_iteration(table: ParticleTable, ps: ParticleSet) -> int:
    """Remove short rows through the centre frame (cells in ``i-1 .. i+1`` only)."""
    i = table.center
    deleted = 0
    while True:
        changed = 0
        for row in table.rows:
            if i in row and len(row) < 3:
                for f in (i - 1, i, i + 1):
                    if f in row:
                        ps.remove(f, row.pop(f))
                        changed += 1
        deleted += changed
        if not changed:
            return deleted


@dataclass
class MLHResult:
    trajectories: list
    added: int
    deleted: int


def track_mlh(dets, bounds: Bounds, v_step: float) -> MLHResult:
    """Multi-level Hungarian tracker.

    ``v_step`` is the largest admissible displacement per frame; a level that
    spans ``k`` frames allows ``k * v_step``.
    """
    dets = sort_detections(dets)
    if not dets:
        return MLHResult([], 0, 0)
    ps = ParticleSet(dets, _dims(bounds))
    lo, hi = dets[0].frame, dets[-1].frame
    added = deleted = 0
    for i in range(lo, hi + 1):
        table = multi_level_match(ps, i, bounds, v_step)
        added += add_iteration(table, ps)
        deleted += delete_iteration(table, ps)
    by = {}
    for d in ps.detections():
        by.setdefault(d.frame, []).append(d)
    return MLHResult(link_frames(by, bounds, v_step), added, deleted)
