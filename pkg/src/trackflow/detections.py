"""Detections, trajectories and their CSV files."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

CONF_MIN = 1e-6
CONF_MAX = 1.0 - 1e-6

DET_HEADER = ["frame", "id", "x", "y", "z", "conf"]
BOX_HEADER = ["bb_left", "bb_top", "bb_w", "bb_h"]
TRAJ_HEADER = ["track_id", "frame", "det_id", "x", "y", "z"]


@dataclass
class Detection:
    frame: int
    id: int
    x: float
    y: float
    z: float = 0.0
    conf: float = 0.9
    bbox: Optional[tuple] = None

    def __post_init__(self):
        self.frame = int(self.frame)
        if self.frame < 0:
            raise ValueError("frame index must be >= 0")
        self.conf = float(min(max(self.conf, CONF_MIN), CONF_MAX))

    @property
    def pos(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass
class Trajectory:
    """Ordered detections of one object (strictly increasing frames)."""

    track_id: int
    frames: list
    det_ids: list
    positions: np.ndarray
    cost: float = 0.0

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def span(self) -> int:
        return self.frames[-1] - self.frames[0] + 1 if self.frames else 0

    def key(self) -> tuple:
        return tuple(self.det_ids)


def sort_detections(dets) -> list:
    return sorted(dets, key=lambda d: (d.frame, d.id))


def positions(dets) -> np.ndarray:
    return np.array([[d.x, d.y, d.z] for d in dets], dtype=float).reshape(len(dets), 3)


def make_trajectory(track_id: int, dets, cost: float = 0.0) -> Trajectory:
    return Trajectory(track_id, [d.frame for d in dets], [d.id for d in dets], positions(dets), cost)


def renumber(trajs) -> list:
    """Sort by first (frame, det id) and number tracks from 1."""
    trajs = sorted(trajs, key=lambda t: (t.frames[0], t.det_ids[0]) if t.frames else (0, 0))
    for k, t in enumerate(trajs, start=1):
        t.track_id = k
    return trajs


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def read_detections(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_detections(fh.read().splitlines())


def parse_detections(lines) -> list:
    reader = csv.reader(lines)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ValueError("detection CSV is empty") from None
    if header[:6] != DET_HEADER:
        raise ValueError(f"detection CSV header must start with {','.join(DET_HEADER)}")
    has_box = header[6:10] == BOX_HEADER
    dets, seen = [], set()
    for lineno, row in enumerate(reader, start=2):
        if not row or not "".join(row).strip():
            continue
        try:
            d = Detection(int(row[0]), int(row[1]), float(row[2]), float(row[3]), float(row[4]),
                          float(row[5]))
            if has_box and len(row) >= 10 and row[6].strip():
                d.bbox = tuple(float(v) for v in row[6:10])
        except (ValueError, IndexError):
            raise ValueError(f"detection CSV line {lineno}: malformed row") from None
        if d.id in seen:
            raise ValueError(f"detection CSV line {lineno}: duplicate id {d.id}")
        seen.add(d.id)
        dets.append(d)
    return sort_detections(dets)


def write_detections(path, dets) -> None:
    has_box = any(d.bbox is not None for d in dets)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DET_HEADER + (BOX_HEADER if has_box else []))
        for d in sort_detections(dets):
            row = [d.frame, d.id, _fmt(d.x), _fmt(d.y), _fmt(d.z), _fmt(d.conf)]
            if has_box:
                row += [_fmt(v) for v in d.bbox] if d.bbox is not None else [""] * 4
            w.writerow(row)


def write_trajectories(path, trajs) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJ_HEADER)
        for t in trajs:
            for f, did, p in zip(t.frames, t.det_ids, t.positions):
                w.writerow([t.track_id, f, did, _fmt(p[0]), _fmt(p[1]), _fmt(p[2])])


def read_trajectories(path) -> list:
    """Read a trajectory CSV back into :class:`Trajectory` objects."""
    rows: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError("trajectory CSV is empty") from None
        if header[:6] != TRAJ_HEADER:
            raise ValueError(f"trajectory CSV header must be {','.join(TRAJ_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                r = (int(row[1]), int(row[2]), float(row[3]), float(row[4]), float(row[5]))
                rows.setdefault(int(row[0]), []).append(r)
            except (ValueError, IndexError):
                raise ValueError(f"trajectory CSV line {lineno}: malformed row") from None
    out = []
    for tid in sorted(rows):
        pts = sorted(rows[tid])
        out.append(Trajectory(tid, [p[0] for p in pts], [p[1] for p in pts],
                              np.array([p[2:] for p in pts], dtype=float).reshape(len(pts), 3)))
    return out
