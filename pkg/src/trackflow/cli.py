"""Command-line interface: ``trackflow <command> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible problem,
3 input/output error. ``solve-lp`` additionally returns 1 for an unbounded
program. Set ``TRACKFLOW_LOG`` (debug, info, warning) for log output on
stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .assignment import default_bounds, track_hungarian, track_mlh
from .compare import COMPARE_METHODS, compare_once, summarize
from .config import ConfigError, RunConfig, load_config
from .detections import (
    read_detections, read_trajectories, write_detections, write_trajectories,
)
from .lp import LPFormatError, Status, check_certificates, read_lp, solve
from .metrics import evaluate
from .netflow import (
    EdgeListError, FlowInfeasible, NegativeCycleError, min_cost_flow_via_lp, read_edge_list,
    successive_shortest_paths,
)
from .sim import PerturbationSpec, generate, perturb
from .social import track_batched

log = logging.getLogger("trackflow")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt_num(v: float) -> str:
    """Compact number: integers without decimals, others with 10 significant digits."""
    v = float(v)
    if not np.isfinite(v):
        return str(v)
    r = round(v)
    if abs(v - r) < 1e-9:
        return str(int(r))
    return f"{v:.10g}"


def fmt_vec(vals) -> str:
    return "[" + ",".join(fmt_num(v) for v in vals) + "]"


def _emit(text: str, out_dir, name: str) -> None:
    """Print ``text`` and, with ``--out``, also save it as ``out_dir/name``."""
    sys.stdout.write(text)
    if out_dir:
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _prepare_out(path):
    if path:
        try:
            os.makedirs(path, exist_ok=True)
        except OSError as exc:
            raise InputError(f"cannot create output directory {path}: {exc}") from None
    return path


def _config(args) -> RunConfig:
    overrides = {}
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got '{item}'")
        k, v = item.split("=", 1)
        overrides[k.strip().lower().replace("-", "_")] = v.strip()
    for key in ("method", "solver", "seed", "walkers", "frames", "groups", "missing", "outliers",
                "noise", "scene", "speed", "seeds", "grid", "methods", "match_threshold"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = str(val)
    try:
        return load_config(args.config, overrides)
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from None


# --------------------------------------------------------------------- solve-lp

def cmd_solve_lp(args) -> int:
    try:
        lp = read_lp(args.file)
    except OSError as exc:
        raise InputError(str(exc)) from None
    except LPFormatError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    res = solve(lp, trace=args.trace)
    cert = check_certificates(lp, res)
    lines = []
    if res.status == Status.OPTIMAL:
        lines.append(f"OPTIMAL z={fmt_num(res.objective)} x={fmt_vec(res.x)}")
        lines.append(f"dual={fmt_vec(res.constraint_duals)}")
        code = EXIT_OK
    elif res.status == Status.UNBOUNDED:
        lines.append(f"UNBOUNDED x={fmt_vec(res.x)} ray={fmt_vec(res.ray)}")
        code = 1
    else:
        lines.append(f"INFEASIBLE x0={fmt_num(res.auxiliary_optimum)}")
        lines.append(f"farkas={fmt_vec(res.farkas)}")
        code = EXIT_INFEASIBLE
    if lp.names:
        lines.append("variables=" + ",".join(lp.names))
    lines.append("certificate=" + ("verified" if cert.ok else "FAILED " + "; ".join(cert.failures)))
    if args.trace:
        lines.append("phase1_pivots=" + " ".join(f"{e}:{l}" for e, l in res.phase1_pivots))
        lines.append("pivots=" + " ".join(f"{e}:{l}" for e, l in res.pivots))
    _emit("\n".join(lines) + "\n", _prepare_out(args.out), "solution.txt")
    return code


# ------------------------------------------------------------------- solve-flow

def cmd_solve_flow(args) -> int:
    try:
        net = read_edge_list(args.file)
    except OSError as exc:
        raise InputError(str(exc)) from None
    except EdgeListError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    k = "until_nonnegative" if args.k is None else args.k
    lines = []
    try:
        if args.solver == "lp":
            if k == "until_nonnegative":
                raise UsageError("--solver lp needs --k")
            sol = min_cost_flow_via_lp(net, k)
            flow, cost, value = sol.flow, sol.cost, float(k)
            paths = None
        else:
            ps = successive_shortest_paths(net, k)
            if ps.truncated:
                lines.append(f"INFEASIBLE only {fmt_num(ps.flow_value)} of {k} units can be routed")
                _emit("\n".join(lines) + "\n", _prepare_out(args.out), "flow.txt")
                return EXIT_INFEASIBLE
            flow, cost, value, paths = ps.flow, ps.total_cost, ps.flow_value, ps
    except FlowInfeasible as exc:
        _emit(f"INFEASIBLE {exc}\n", _prepare_out(args.out), "flow.txt")
        return EXIT_INFEASIBLE
    except NegativeCycleError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    lines.append(f"OPTIMAL flow={fmt_num(value)} cost={fmt_num(cost)}")
    if paths is not None:
        for nodes, c, a in zip(paths.paths, paths.costs, paths.amounts):
            lines.append(f"path amount={fmt_num(a)} cost={fmt_num(c)} "
                         + " ".join(str(net.label(v)) for v in nodes))
    for a in np.flatnonzero(np.abs(flow) > 1e-9):
        lines.append(f"arc {net.label(int(net.tail[a]))} {net.label(int(net.head[a]))} "
                     f"flow={fmt_num(flow[a])}")
    _emit("\n".join(lines) + "\n", _prepare_out(args.out), "flow.txt")
    return EXIT_OK


# ------------------------------------------------------------------------ track

def run_tracker(dets, cfg: RunConfig):
    """Trajectories and EM iteration counts for ``cfg.method``."""
    step = cfg.cost.vmax * cfg.cost.frame_period
    if cfg.method in ("mlh", "hungarian"):
        bounds = default_bounds(cfg.scene, dims=2 if all(d.z == 0 for d in dets) else 3)
        if cfg.method == "mlh":
            return track_mlh(dets, bounds, step).trajectories, []
        return track_hungarian(dets, bounds, step), []
    res = track_batched(dets, cfg.cost, cfg.social_for_method(), cfg.solver)
    return res.trajectories, res.iterations


def cmd_track(args) -> int:
    cfg = _config(args)
    try:
        dets = read_detections(args.detections)
    except OSError as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(f"{args.detections}: {exc}") from None
    trajs, its = run_tracker(dets, cfg)
    out = _prepare_out(args.out)
    if out:
        write_trajectories(os.path.join(out, "trajectories.csv"), trajs)
    else:
        buf = io.StringIO()
        _write_traj_stream(buf, trajs)
        sys.stdout.write(buf.getvalue())
    lengths = [len(t) for t in trajs]
    summary = [
        f"method={cfg.method}",
        f"solver={cfg.solver}",
        f"detections={len(dets)}",
        f"trajectories={len(trajs)}",
        f"mean_length={fmt_num(np.mean(lengths)) if lengths else 0}",
        f"total_cost={fmt_num(sum(t.cost for t in trajs))}",
        "em_iterations=" + (",".join(str(i) for i in its) if its else "-"),
    ]
    text = "\n".join(summary) + "\n"
    if out:
        _emit(text, out, "summary.txt")
    else:
        sys.stderr.write(text)
    return EXIT_OK


def _write_traj_stream(fh, trajs) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["track_id", "frame", "det_id", "x", "y", "z"])
    for t in trajs:
        for f, did, p in zip(t.frames, t.det_ids, t.positions):
            w.writerow([t.track_id, f, did, f"{p[0]:.6f}", f"{p[1]:.6f}", f"{p[2]:.6f}"])


# --------------------------------------------------------------------- simulate

def _groups(text: str) -> list:
    try:
        return [int(g) for g in text.replace(";", ",").split(",") if g.strip()]
    except ValueError:
        raise UsageError(f"groups must be comma-separated sizes, got '{text}'") from None


def cmd_simulate(args) -> int:
    cfg = _config(args)
    if cfg.seed is None:
        raise UsageError("simulate requires --seed")
    try:
        sc = generate(cfg.walkers, cfg.frames, _groups(cfg.groups), seed=cfg.seed, speed=cfg.speed,
                      scene=cfg.scene, frame_period=cfg.cost.frame_period)
        spec = PerturbationSpec(cfg.missing, cfg.outliers, cfg.noise, seed=cfg.seed, conf=cfg.conf)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ds = perturb(sc, spec)
    out = _prepare_out(args.out or ".")
    det_path = os.path.join(out, f"{args.name}.csv")
    gt_path = os.path.join(out, f"{args.name}.gt.csv")
    try:
        write_detections(det_path, ds.detections)
        write_trajectories(gt_path, ds.ground_truth)
    except OSError as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(f"detections={len(ds.detections)} walkers={sc.n_walkers} frames={sc.n_frames} "
                     f"outliers={len(ds.outlier_ids)}\n{det_path}\n{gt_path}\n")
    return EXIT_OK


# --------------------------------------------------------------------- evaluate

def cmd_evaluate(args) -> int:
    cfg = _config(args)
    try:
        gt = read_trajectories(args.gt)
        hyp = read_trajectories(args.hyp)
    except OSError as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep = evaluate(gt, hyp, threshold=cfg.match_threshold, iou_threshold=cfg.iou_threshold)
    out = _prepare_out(args.out)
    sys.stdout.write(rep.to_text())
    if out:
        with open(os.path.join(out, "clear.txt"), "w", encoding="utf-8") as fh:
            fh.write(rep.to_text())
        with open(os.path.join(out, "clear.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(rep.to_csv())
    return EXIT_OK


# ---------------------------------------------------------------------- compare

def _parse_grid(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"grid must be comma-separated fractions, got '{text}'") from None


def _compare_seed(task):
    seed, grid, methods, cfg = task
    sc = generate(cfg.walkers, cfg.frames, _groups(cfg.groups), seed=seed, speed=cfg.speed,
                  scene=cfg.scene, frame_period=cfg.cost.frame_period)
    rows = []
    for g, miss in enumerate(grid):
        spec = PerturbationSpec(missing=miss, outliers=cfg.outliers, noise=cfg.noise,
                                seed=seed * 1000 + g, conf=cfg.conf)
        rows.extend(compare_once(sc, spec, methods, cfg.cost, label=seed))
    return rows


COMPARE_HEADER = ["method", "missing", "seed", "count_ratio", "length_ratio", "DA", "TA", "id_switches"]


def cmd_compare(args) -> int:
    cfg = _config(args)
    if cfg.seed is None:
        raise UsageError("compare requires --seed")
    grid = _parse_grid(cfg.grid)
    methods = [m.strip() for m in cfg.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in COMPARE_METHODS]
    if bad:
        raise UsageError(f"unknown comparison method(s): {', '.join(bad)}")
    tasks = [(cfg.seed + k, grid, methods, cfg) for k in range(cfg.seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_compare_seed, tasks))
    else:
        chunks = [_compare_seed(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r.missing, r.seed, methods.index(r.method)))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COMPARE_HEADER)
    for r in rows:
        w.writerow([r.method, f"{r.missing:.4f}", r.seed, f"{r.count_ratio:.6f}",
                    f"{r.length_ratio:.6f}", f"{r.DA:.6f}", f"{r.TA:.6f}", r.id_switches])
    sbuf = io.StringIO()
    w = csv.writer(sbuf, lineterminator="\n")
    w.writerow(["method", "missing", "runs", "count_ratio", "length_ratio", "DA", "TA", "id_switches"])
    for s in summarize(rows):
        w.writerow([s["method"], f"{s['missing']:.4f}", s["runs"], f"{s['count_ratio']:.6f}",
                    f"{s['length_ratio']:.6f}", f"{s['DA']:.6f}", f"{s['TA']:.6f}",
                    f"{s['id_switches']:.4f}"])
    out = _prepare_out(args.out)
    if out:
        with open(os.path.join(out, "compare.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        with open(os.path.join(out, "compare_summary.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(sbuf.getvalue())
    sys.stdout.write(sbuf.getvalue())
    return EXIT_OK


# ----------------------------------------------------------------------- parser

def _common(p, seed: bool = True) -> None:
    p.add_argument("--config", metavar="PATH", help="key = value config file")
    p.add_argument("--out", metavar="DIR", help="output directory")
    if seed:
        p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="trackflow", description="Network-flow multi-object tracking toolkit.")
    p.add_argument("--version", action="version", version=f"trackflow {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve-lp", help="solve an LP text file with the simplex method")
    s.add_argument("file")
    s.add_argument("--trace", action="store_true", help="also print the pivot sequence")
    _common(s, seed=False)
    s.set_defaults(func=cmd_solve_lp)

    s = sub.add_parser("solve-flow", help="min-cost flow on an edge-list file")
    s.add_argument("file")
    s.add_argument("--k", type=int, help="flow units (default: augment while paths are negative)")
    s.add_argument("--solver", choices=("ssp", "lp"), default="ssp")
    _common(s, seed=False)
    s.set_defaults(func=cmd_solve_flow)

    s = sub.add_parser("track", help="link a detection CSV into trajectories")
    s.add_argument("detections")
    s.add_argument("--method", choices=("dist", "sfm", "sfm_gr", "mlh", "hungarian"))
    s.add_argument("--solver", choices=("ssp", "lp"))
    _common(s)
    s.set_defaults(func=cmd_track)

    s = sub.add_parser("simulate", help="generate walkers, perturb, write detections + ground truth")
    _common(s)
    s.add_argument("--name", default="detections", help="output file stem")
    for flag, kind in (("walkers", int), ("frames", int), ("groups", str), ("missing", float),
                       ("outliers", float), ("noise", float), ("scene", float), ("speed", float)):
        s.add_argument(f"--{flag}", type=kind)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("evaluate", help="CLEAR scores of hypotheses against ground truth")
    s.add_argument("gt")
    s.add_argument("hyp")
    s.add_argument("--match-threshold", dest="match_threshold", type=float)
    _common(s, seed=False)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("compare", help="sweep trackers over a missing-detection grid")
    _common(s)
    for flag, kind in (("walkers", int), ("frames", int), ("seeds", int), ("grid", str),
                       ("methods", str)):
        s.add_argument(f"--{flag}", type=kind)
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.set_defaults(func=cmd_compare)
    return p


def _setup_logging() -> None:
    level = os.environ.get("TRACKFLOW_LOG", "").strip().upper()
    if not level:
        return
    logging.basicConfig(level=getattr(logging, level, logging.INFO), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        sys.stderr.write(f"trackflow: error: {exc}\n")
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        sys.stderr.write(f"trackflow: I/O error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
