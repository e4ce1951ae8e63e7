"""Side-by-side runs of the trackers on simulated scenes."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .assignment import default_bounds, track_hungarian, track_mlh
from .config import CostParams
from .metrics import evaluate
from .sim import PerturbationSpec, Scenario, generate, perturb
from .trackgraph import build, solve_tracking

COMPARE_METHODS = ("hungarian", "mlh", "lp1lev", "lp")


def run_method(method: str, dets, scene: float, cp: CostParams) -> list:
    """Trajectories of one comparison method on 2D detections."""
    bounds = default_bounds(scene, dims=2)
    step = cp.vmax * cp.frame_period
    if method == "hungarian":
        return track_hungarian(dets, bounds, step)
    if method == "mlh":
        return track_mlh(dets, bounds, step).trajectories
    if method in ("lp1lev", "lp"):
        params = replace(cp, fmax=1 if method == "lp1lev" else 5)
        return solve_tracking(build(dets, params)).trajectories
    raise ValueError(f"unknown comparison method '{method}'")


def ratios(trajs, gt) -> tuple:
    """(trajectory-count ratio, mean-length ratio); only tracks of 2+ detections count.

    Length is the frame span of a track.
    """
    hyp = [t for t in trajs if len(t) >= 2]
    truth = [t for t in gt if len(t) >= 1]
    if not truth:
        return (float("nan"), float("nan"))
    count = len(hyp) / len(truth)
    if not hyp:
        return (count, 0.0)
    mean_h = float(np.mean([t.span for t in hyp]))
    mean_g = float(np.mean([t.span for t in truth]))
    return (count, mean_h / mean_g)


@dataclass
class CompareRow:
    method: str
    missing: float
    seed: int
    count_ratio: float
    length_ratio: float
    DA: float
    TA: float
    id_switches: int


def compare_once(sc: Scenario, spec: PerturbationSpec, methods=COMPARE_METHODS,
                 cp: CostParams = None, with_metrics: bool = True, label: int = None) -> list:
    """One row per method; ``label`` is the seed recorded in the rows (default ``spec.seed``)."""
    cp = cp or CostParams(frame_period=sc.frame_period)
    ds = perturb(sc, spec)
    rows = []
    for m in methods:
        trajs = run_method(m, ds.detections, sc.scene, cp)
        cr, lr = ratios(trajs, ds.ground_truth)
        if with_metrics:
            rep = evaluate(ds.ground_truth, trajs)
            da, ta, sw = rep.DA, rep.TA, rep.id_switches
        else:
            da = ta = float("nan")
            sw = -1
        rows.append(CompareRow(m, spec.missing, spec.seed if label is None else label, cr, lr, da, ta, sw))
    return rows


def sweep(grid, seeds, methods=COMPARE_METHODS, walkers: int = 15, frames: int = 50,
          cp: CostParams = None, base_seed: int = 0, with_metrics: bool = True,
          scene: float = 20.0, speed: float = 1.4) -> list:
    """All (missing fraction, seed) combinations; seeds are ``base_seed + k``."""
    cp = cp or CostParams()
    rows = []
    for k in range(seeds):
        seed = base_seed + k
        sc = generate(walkers, frames, seed=seed, speed=speed, scene=scene,
                      frame_period=cp.frame_period)
        for g, miss in enumerate(grid):
            spec = PerturbationSpec(missing=float(miss), seed=seed * 1000 + g)
            rows.extend(compare_once(sc, spec, methods, cp, with_metrics, label=seed))
    return rows


def summarize(rows) -> list:
    """Mean of every score per (method, missing)."""
    keys = sorted({(r.method, r.missing) for r in rows}, key=lambda k: (k[1], COMPARE_METHODS.index(k[0])
                                                                         if k[0] in COMPARE_METHODS else 99))
    out = []
    for m, miss in keys:
        sel = [r for r in rows if r.method == m and r.missing == miss]
        out.append({
            "method": m, "missing": miss, "runs": len(sel),
            "count_ratio": float(np.mean([r.count_ratio for r in sel])),
            "length_ratio": float(np.mean([r.length_ratio for r in sel])),
            "DA": float(np.mean([r.DA for r in sel])),
            "TA": float(np.mean([r.TA for r in sel])),
            "id_switches": float(np.mean([r.id_switches for r in sel])),
        })
    return out
