"""Synthetic walkers and detection perturbation for robustness experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .detections import Detection, Trajectory

MISSING_GRID = (0.0, 0.04, 0.08, 0.12, 0.16, 0.20)
OUTLIER_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
NOISE_GRID = (0.0, 0.002, 0.004, 0.006, 0.008, 0.01)


@dataclass
class Scenario:
    """Ground-truth positions ``(walkers, frames, 2)`` and group membership."""

    positions: np.ndarray
    groups: list  # group label per walker, 0 = alone
    scene: float
    frame_period: float
    seed: int
    speed: float = 1.4

    @property
    def n_walkers(self) -> int:
        return self.positions.shape[0]

    @property
    def n_frames(self) -> int:
        return self.positions.shape[1]

    def speeds(self) -> np.ndarray:
        d = np.linalg.norm(np.diff(self.positions, axis=1), axis=2)
        return d / self.frame_period

    def trajectories(self) -> list:
        out = []
        for w in range(self.n_walkers):
            P = np.hstack([self.positions[w], np.zeros((self.n_frames, 1))])
            out.append(Trajectory(w + 1, list(range(self.n_frames)), [-1] * self.n_frames, P))
        return out


def _reflect(p, h, lo, hi):
    """Mirror a position back into [lo, hi]^2 and flip the heading component."""
    c, s = math.cos(h), math.sin(h)
    for ax in range(2):
        if p[ax] < lo:
            p[ax] = 2 * lo - p[ax]
            if ax == 0:
                c = abs(c)
            else:
                s = abs(s)
        elif p[ax] > hi:
            p[ax] = 2 * hi - p[ax]
            if ax == 0:
                c = -abs(c)
            else:
                s = -abs(s)
    return p, math.atan2(s, c)


def generate(n_walkers: int = 15, frames: int = 50, groups=(), seed: int = 0, speed: float = 1.4,
             scene: float = 20.0, frame_period: float = 0.4, heading_noise: float = 0.15,
             group_spacing: float = 0.6) -> Scenario:
    """Random walkers with constant speed and Gaussian heading noise.

    ``groups`` lists group sizes; the first walkers are assigned to groups in
    order. Group members copy their leader's path at a fixed offset.
    """
    rng = np.random.default_rng(seed)
    groups = [int(g) for g in groups if int(g) > 0]
    if sum(groups) > n_walkers:
        raise ValueError("group sizes exceed the number of walkers")
    labels = [0] * n_walkers
    leader = list(range(n_walkers))
    offsets = np.zeros((n_walkers, 2))
    w = 0
    for gi, size in enumerate(groups, start=1):
        ang = rng.uniform(0, 2 * math.pi)
        for k in range(size):
            labels[w + k] = gi if size > 1 else 0
            leader[w + k] = w
            if k:
                a = ang + 2 * math.pi * (k - 1) / max(size - 1, 1)
                offsets[w + k] = group_spacing * np.array([math.cos(a), math.sin(a)])
        w += size
    margin = 1.0 + group_spacing
    pos = np.zeros((n_walkers, frames, 2))
    step = speed * frame_period
    for v in range(n_walkers):
        if leader[v] != v:
            continue
        p = rng.uniform(margin, scene - margin, size=2)
        h = rng.uniform(0, 2 * math.pi)
        lo, hi = margin, scene - margin
        for f in range(frames):
            pos[v, f] = p
            h += rng.normal(0.0, heading_noise)
            p = p + step * np.array([math.cos(h), math.sin(h)])
            p, h = _reflect(p, h, lo, hi)
    for v in range(n_walkers):
        if leader[v] != v:
            pos[v] = pos[leader[v]] + offsets[v]
    return Scenario(pos, labels, scene, frame_period, seed, speed)


def group_crossing(seed: int, frames: int = 30, frame_period: float = 0.4, speed: float = 1.4,
                   scene: float = 20.0, spacing: float = 0.7,
                   lateral: tuple = (1.1, 1.6)) -> Scenario:
    """Two side-by-side pairs walking towards each other and passing closely.

    The pairs start on opposite sides and pass each other near the scene
    centre. The offset between the pair centres is drawn from ``lateral``
    (either side), so the nearest walkers of the two pairs pass within about
    half a metre without walking through each other.
    """
    rng = np.random.default_rng(seed)
    mid = scene / 2.0
    t_cross = (frames - 1) / 2.0 + rng.uniform(-2, 2)
    dy = rng.uniform(*lateral) * rng.choice([-1.0, 1.0])
    ang = rng.uniform(-0.15, 0.15)
    step = speed * frame_period
    pos = np.zeros((4, frames, 2))
    f = np.arange(frames)
    for k, (direction, yoff, side) in enumerate([(1, 0.0, -1), (1, 0.0, 1),
                                                 (-1, dy, -1), (-1, dy, 1)]):
        heading = ang if direction > 0 else math.pi + ang
        u = np.array([math.cos(heading), math.sin(heading)])
        n = np.array([-u[1], u[0]])
        centre = np.array([mid, mid + yoff])
        base = centre[None, :] + (f - t_cross)[:, None] * step * u[None, :]
        pos[k] = base + side * spacing / 2.0 * n[None, :]
    return Scenario(pos, [1, 1, 2, 2], scene, frame_period, seed, speed)


@dataclass
class PerturbationSpec:
    missing: float = 0.0
    outliers: float = 0.0
    noise: float = 0.0
    seed: int = 0
    conf: float = 0.9

    def __post_init__(self):
        if not 0.0 <= self.missing <= 1.0:
            raise ValueError("missing fraction must lie in [0, 1]")
        if self.outliers < 0 or self.noise < 0:
            raise ValueError("outlier fraction and noise must be nonnegative")


@dataclass
class DetectionSet:
    detections: list
    ground_truth: list  # Trajectory per walker, det_id -1 where dropped
    outlier_ids: set = field(default_factory=set)


def perturb(sc: Scenario, spec: PerturbationSpec) -> DetectionSet:
    """Drop, jitter and pollute the ground truth to obtain detections.

    Noise variance is ``spec.noise * scene`` (square metres); the number of
    outliers is ``round(spec.outliers * kept)`` placed uniformly in space and
    time with fresh ids.
    """
    rng = np.random.default_rng(spec.seed)
    W, F = sc.n_walkers, sc.n_frames
    keep = rng.random((F, W)) >= spec.missing
    sigma = math.sqrt(spec.noise * sc.scene) if spec.noise > 0 else 0.0
    jitter = rng.normal(0.0, 1.0, size=(F, W, 2)) * sigma
    dets, gt_ids = [], np.full((W, F), -1, dtype=np.int64)
    nid = 0
    for f in range(F):
        for w in range(W):
            if not keep[f, w]:
                continue
            p = sc.positions[w, f] + jitter[f, w]
            dets.append(Detection(f, nid, float(p[0]), float(p[1]), 0.0, spec.conf))
            gt_ids[w, f] = nid
            nid += 1
    n_out = int(round(spec.outliers * len(dets)))
    out_frames = rng.integers(0, F, size=n_out)
    out_pos = rng.uniform(0.0, sc.scene, size=(n_out, 2))
    outliers = set()
    for k in range(n_out):
        dets.append(Detection(int(out_frames[k]), nid, float(out_pos[k, 0]), float(out_pos[k, 1]),
                              0.0, spec.conf))
        outliers.add(nid)
        nid += 1
    dets.sort(key=lambda d: (d.frame, d.id))
    gt = sc.trajectories()
    for w, t in enumerate(gt):
        t.det_ids = gt_ids[w].tolist()
    return DetectionSet(dets, gt, outliers)
