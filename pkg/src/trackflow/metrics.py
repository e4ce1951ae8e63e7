"""CLEAR MOT scores: detection/tracking accuracy and precision.

Per frame, ground-truth objects are matched one-to-one to hypotheses that
pass a gate (IoU >= 0.25 for boxes, ground-plane distance <= 1 m without
boxes). The matching maximises the number of pairs first and then minimises
the summed distance (or maximises the summed IoU).

* ``DA = 1 - sum(m_t + f_t) / sum(N_G)``
* ``TA = 1 - sum(m_t + f_t + log10(1 + i_t)) / sum(N_G)``
* ``DP`` averages the per-frame mean overlap over frames with matches
* ``TP = sum(overlap) / sum(N_mapped)``

In distance mode the overlap of a pair is ``1 - d / threshold``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .assignment import hungarian


@dataclass
class FrameObject:
    id: int
    pos: np.ndarray
    bbox: Optional[tuple] = None


def iou(a, b) -> float:
    """Intersection over union of ``(left, top, width, height)`` boxes."""
    ax2, ay2 = a[0] + a[2], a[1] + a[3]
    bx2, by2 = b[0] + b[2], b[1] + b[3]
    iw = max(0.0, min(ax2, bx2) - max(a[0], b[0]))
    ih = max(0.0, min(ay2, by2) - max(a[1], b[1]))
    inter = iw * ih
    union = a[2] * a[3] + b[2] * b[3] - inter
    return inter / union if union > 0 else 0.0


@dataclass
class FrameMatch:
    pairs: list  # (gt index, hyp index, overlap)
    misses: int
    false_alarms: int


def match_frame(gt, hyp, threshold: float = 1.0, iou_threshold: float = 0.25,
                mode: Optional[str] = None) -> FrameMatch:
    """One-to-one correspondence between gt and hypothesis objects of a frame."""
    G, H = len(gt), len(hyp)
    if mode is None:
        boxes = G + H > 0 and all(o.bbox is not None for o in list(gt) + list(hyp))
        mode = "iou" if boxes else "distance"
    if G == 0 or H == 0:
        return FrameMatch([], G, H)
    if mode == "iou":
        score = np.array([[iou(g.bbox, h.bbox) for h in hyp] for g in gt])
        ok = score >= iou_threshold
        dist = 1.0 - score
        scale = 1.0
    else:
        P = np.array([np.asarray(g.pos, dtype=float) for g in gt])
        Q = np.array([np.asarray(h.pos, dtype=float) for h in hyp])
        dist = np.linalg.norm(P[:, None, :] - Q[None, :, :], axis=2)
        ok = dist <= threshold
        scale = threshold
    n = max(G, H)
    big = (n + 1) * scale + 1.0
    C = np.zeros((n, n))
    C[:G, :H] = np.where(ok, dist - big, 0.0)
    assign = hungarian(C)
    pairs = []
    for g in range(G):
        h = int(assign[g])
        if h < H and ok[g, h]:
            ov = 1.0 - dist[g, h] if mode == "iou" else 1.0 - dist[g, h] / threshold
            pairs.append((g, h, float(ov)))
    return FrameMatch(pairs, G - len(pairs), H - len(pairs))


@dataclass
class ClearReport:
    DA: float
    TA: float
    DP: float
    TP: float
    misses: int
    false_alarms: int
    id_switches: int
    mapped: int
    n_gt: int
    frames: int
    mode: str
    per_frame: dict = field(default_factory=dict)

    def as_tuple(self) -> tuple:
        return (self.DA, self.TA, self.DP, self.TP, self.id_switches)

    def rows(self) -> list:
        return [("mode", self.mode), ("DA", self.DA), ("TA", self.TA), ("DP", self.DP),
                ("TP", self.TP), ("misses", self.misses), ("false_alarms", self.false_alarms),
                ("id_switches", self.id_switches), ("mapped", self.mapped),
                ("gt_objects", self.n_gt), ("frames", self.frames)]

    def to_csv(self) -> str:
        lines = ["metric,value"]
        for k, v in self.rows():
            lines.append(f"{k},{_fmt(v)}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"CLEAR report ({self.mode} matching)", "-" * 32]
        for k, v in self.rows()[1:]:
            lines.append(f"{k:<14}{_fmt(v):>18}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6f}"


def objects_by_frame(trajs, boxes: dict = None) -> dict:
    """``{frame: [FrameObject]}`` from trajectories (``boxes[(track_id, frame)]`` optional)."""
    out: dict = {}
    for t in trajs:
        for f, p in zip(t.frames, t.positions):
            bb = boxes.get((t.track_id, f)) if boxes else None
            out.setdefault(int(f), []).append(FrameObject(t.track_id, np.asarray(p, dtype=float), bb))
    return out


def evaluate(gt, hyp, threshold: float = 1.0, iou_threshold: float = 0.25,
             mode: Optional[str] = None) -> ClearReport:
    """CLEAR scores for ground truth ``gt`` against hypotheses ``hyp``.

    Both arguments are trajectory lists or ``{frame: [FrameObject]}`` dicts.
    """
    G = gt if isinstance(gt, dict) else objects_by_frame(gt)
    H = hyp if isinstance(hyp, dict) else objects_by_frame(hyp)
    if mode is None:
        objs = [o for d in (G, H) for lst in d.values() for o in lst]
        mode = "iou" if objs and all(o.bbox is not None for o in objs) else "distance"
    frames = sorted(set(G) | set(H))
    last: dict = {}
    m_t, f_t, i_t, nm_t, ng_t, ov_t = [], [], [], [], [], []
    for f in frames:
        g_objs, h_objs = G.get(f, []), H.get(f, [])
        fm = match_frame(g_objs, h_objs, threshold, iou_threshold, mode)
        sw = 0
        for gi, hi, _ in fm.pairs:
            gid, hid = g_objs[gi].id, h_objs[hi].id
            if gid in last and last[gid] != hid:
                sw += 1
            last[gid] = hid
        m_t.append(fm.misses)
        f_t.append(fm.false_alarms)
        i_t.append(sw)
        nm_t.append(len(fm.pairs))
        ng_t.append(len(g_objs))
        ov_t.append(sum(p[2] for p in fm.pairs))
    n_gt = int(sum(ng_t))
    err = float(sum(m_t) + sum(f_t))
    log_sw = float(sum(math.log10(1 + s) for s in i_t))
    if n_gt > 0:
        da = 1.0 - err / n_gt
        ta = 1.0 - (err + log_sw) / n_gt
    else:
        da = ta = 1.0 if err == 0 else -math.inf
    mapped = int(sum(nm_t))
    per = [o / n for o, n in zip(ov_t, nm_t) if n > 0]
    dp = float(np.mean(per)) if per else 0.0
    tp = float(sum(ov_t) / mapped) if mapped else 0.0
    return ClearReport(da, ta, dp, tp, int(sum(m_t)), int(sum(f_t)), int(sum(i_t)), mapped,
                       n_gt, len(frames), mode,
                       per_frame={"frame": frames, "misses": m_t, "false_alarms": f_t,
                                  "id_switches": i_t, "mapped": nm_t, "gt": ng_t})
