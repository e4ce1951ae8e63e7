"""Tunable parameters and the flat ``key = value`` config file."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace


@dataclass
class CostParams:
    """Link/detection cost parameters of the tracking graph."""

    vmax: float = 7.0
    fmax: int = 10
    bj: float = 0.3
    bbmin: float = 1.5
    entries: list = field(default_factory=list)
    frame_period: float = 0.4
    min_prob: float = 1e-12

    def __post_init__(self):
        if self.vmax <= 0:
            raise ValueError("vmax must be positive")
        if int(self.fmax) != self.fmax or self.fmax < 1:
            raise ValueError("fmax must be an integer >= 1")
        self.fmax = int(self.fmax)
        if not 0 < self.bj < 1:
            raise ValueError("bj must lie in (0, 1)")
        if self.frame_period <= 0:
            raise ValueError("frame_period must be positive")


@dataclass
class SocialParams:
    """Social-force, grouping and EM/batching parameters."""

    alpha: float = 0.5
    neighborhood: float = 1.0
    iterations: int = 6
    batch: int = 100
    overlap: int = 10
    group_dist_mean: float = 0.75
    group_dist_std: float = 0.5
    group_speed_std: float = 0.3
    indiv_dist_mean: float = 4.0
    indiv_dist_std: float = 2.0
    indiv_speed_std: float = 1.5
    use_sfm: bool = True
    use_groups: bool = True

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.overlap < self.batch:
            raise ValueError("overlap must be smaller than the batch length")


# config-file key -> (target, attribute, type)
KEYS = {
    "vmax": ("cost", "vmax", float),
    "fmax": ("cost", "fmax", int),
    "bj": ("cost", "bj", float),
    "bbmin": ("cost", "bbmin", float),
    "frame_period": ("cost", "frame_period", float),
    "entries": ("cost", "entries", "points"),
    "alpha": ("social", "alpha", float),
    "neighborhood": ("social", "neighborhood", float),
    "iterations": ("social", "iterations", int),
    "batch": ("social", "batch", int),
    "overlap": ("social", "overlap", int),
    "group_dist_mean": ("social", "group_dist_mean", float),
    "group_dist_std": ("social", "group_dist_std", float),
    "group_speed_std": ("social", "group_speed_std", float),
    "indiv_dist_mean": ("social", "indiv_dist_mean", float),
    "indiv_dist_std": ("social", "indiv_dist_std", float),
    "indiv_speed_std": ("social", "indiv_speed_std", float),
    "method": ("run", "method", str),
    "solver": ("run", "solver", str),
    "seed": ("run", "seed", int),
    "match_threshold": ("run", "match_threshold", float),
    "iou_threshold": ("run", "iou_threshold", float),
    "walkers": ("run", "walkers", int),
    "frames": ("run", "frames", int),
    "groups": ("run", "groups", str),
    "speed": ("run", "speed", float),
    "scene": ("run", "scene", float),
    "missing": ("run", "missing", float),
    "outliers": ("run", "outliers", float),
    "noise": ("run", "noise", float),
    "conf": ("run", "conf", float),
    "seeds": ("run", "seeds", int),
    "grid": ("run", "grid", str),
    "methods": ("run", "methods", str),
}

METHODS = ("dist", "sfm", "sfm_gr", "mlh", "hungarian")
SOLVERS = ("ssp", "lp")


@dataclass
class RunConfig:
    cost: CostParams = field(default_factory=CostParams)
    social: SocialParams = field(default_factory=SocialParams)
    method: str = "sfm_gr"
    solver: str = "ssp"
    seed: int = None
    match_threshold: float = 1.0
    iou_threshold: float = 0.25
    walkers: int = 15
    frames: int = 50
    groups: str = ""
    speed: float = 1.4
    scene: float = 20.0
    missing: float = 0.0
    outliers: float = 0.0
    noise: float = 0.0
    conf: float = 0.9
    seeds: int = 10
    grid: str = "0,0.02,0.04,0.06,0.08,0.10"
    methods: str = "hungarian,mlh,lp1lev,lp"

    def social_for_method(self) -> SocialParams:
        use = {"dist": (False, False), "sfm": (True, False), "sfm_gr": (True, True)}
        sfm, grp = use.get(self.method, (False, False))
        return replace(self.social, use_sfm=sfm, use_groups=grp)


class ConfigError(ValueError):
    pass


def _parse_points(text: str) -> list:
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = [float(v) for v in chunk.split(",")]
        if len(vals) not in (2, 3):
            raise ConfigError(f"entry point '{chunk}' needs 2 or 3 coordinates")
        pts.append(tuple(vals + [0.0] * (3 - len(vals))))
    return pts


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into a dict of raw strings (``#`` comments)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, val = (p.strip() for p in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in KEYS:
            raise ConfigError(f"config line {lineno}: unknown key '{key}'")
        out[key] = val
    return out


def apply_settings(cfg: RunConfig, settings: dict) -> RunConfig:
    """Return a copy of ``cfg`` with raw ``settings`` applied (validated)."""
    cost = {f.name: getattr(cfg.cost, f.name) for f in fields(cfg.cost)}
    social = {f.name: getattr(cfg.social, f.name) for f in fields(cfg.social)}
    run = {f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name not in ("cost", "social")}
    targets = {"cost": cost, "social": social, "run": run}
    for key, raw in settings.items():
        if raw is None:
            continue
        if key not in KEYS:
            raise ConfigError(f"unknown key '{key}'")
        target, attr, kind = KEYS[key]
        try:
            if kind == "points":
                val = _parse_points(raw) if isinstance(raw, str) else list(raw)
            elif isinstance(raw, str):
                val = kind(raw)
            else:
                val = kind(raw)
        except ValueError:
            raise ConfigError(f"bad value for '{key}': {raw!r}") from None
        targets[target][attr] = val
    try:
        out = RunConfig(cost=CostParams(**cost), social=SocialParams(**social), **run)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if out.method not in METHODS:
        raise ConfigError(f"method must be one of {', '.join(METHODS)}")
    if out.solver not in SOLVERS:
        raise ConfigError(f"solver must be one of {', '.join(SOLVERS)}")
    return out


def load_config(path=None, overrides: dict = None) -> RunConfig:
    settings = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            settings.update(parse_config_text(fh.read()))
    if overrides:
        settings.update({k: v for k, v in overrides.items() if v is not None})
    return apply_settings(RunConfig(), settings)
