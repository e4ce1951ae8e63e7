"""Multi-object tracking as minimum-cost network flow.

Subpackages and modules:

* :mod:`trackflow.lp`: two-phase simplex in dictionary form, duality
  certificates, total-unimodularity check, LP text format.
* :mod:`trackflow.netflow`: flow networks, shortest paths, successive
  shortest paths, LP reference solver, edge-list format.
* :mod:`trackflow.trackgraph`: tracking graph, link costs, decoding.
* :mod:`trackflow.social`: social-force and group terms, EM, batching.
* :mod:`trackflow.assignment`: Hungarian and multi-level Hungarian trackers.
* :mod:`trackflow.metrics`: CLEAR MOT scores.
* :mod:`trackflow.sim`: synthetic walkers and perturbations.
* :mod:`trackflow.cli`: the ``trackflow`` command.

``trackflow.BACKEND`` names the kernel implementation in use ("cython" or
"python"); set ``TRACKFLOW_PURE=1`` before import to force the fallback.
"""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND  # noqa: E402
from .config import CostParams, RunConfig, SocialParams, load_config  # noqa: E402
from .detections import Detection, Trajectory, read_detections, read_trajectories  # noqa: E402
from .metrics import evaluate  # noqa: E402
from .social import em_track, track_batched  # noqa: E402
from .trackgraph import build, solve_tracking  # noqa: E402

__all__ = [
    "BACKEND", "CostParams", "Detection", "RunConfig", "SocialParams", "Trajectory", "build",
    "em_track", "evaluate", "load_config", "read_detections", "read_trajectories",
    "solve_tracking", "track_batched", "__version__",
]
