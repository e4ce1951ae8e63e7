"""Shared fixtures: textbook LPs and small detection scenes."""

import sys

import numpy as np
import pytest

from trackflow.detections import Detection
from trackflow.lp import from_arrays

Z13_LP = """\
# three resource constraints
MAXIMIZE
  5 x1 + 4 x2 + 3 x3
SUBJECT TO
  2 x1 + 3 x2 +   x3 <= 5
  4 x1 +   x2 + 2 x3 <= 11
  3 x1 + 4 x2 + 2 x3 <= 8
END
"""

PHASE1_LP = """\
MAXIMIZE
  x1 + 2 x2
SUBJECT TO
  -2 x1 + x2 <= -2
  x2 <= 4
  x1 - 2 x2 <= -2
  x1 <= 4
END
"""

INFEASIBLE_LP = """\
MAXIMIZE
  2 x1 - 3 x2
SUBJECT TO
  -x1 + x2 <= -3
  2 x1 + x2 <= 10
  x1 - 2 x2 <= -2
END
"""


def z13():
    return from_arrays([5, 4, 3], [[2, 3, 1], [4, 1, 2], [3, 4, 2]], [5, 11, 8])


def phase1_example():
    return from_arrays([1, 2], [[-2, 1], [0, 1], [1, -2], [1, 0]], [-2, 4, -2, 4])


def infeasible_example():
    return from_arrays([2, -3], [[-1, 1], [2, 1], [1, -2]], [-3, 10, -2])


def walker_dets(tracks, conf=0.9, start_id=0):
    """Detections from ``{walker: [(frame, x, y), ...]}``; ids follow (frame, walker)."""
    rows = sorted((f, w, x, y) for w, pts in tracks.items() for f, x, y in pts)
    return [Detection(f, start_id + k, x, y, 0.0, conf) for k, (f, w, x, y) in enumerate(rows)]


def parallel_walkers():
    """Two walkers 2 m apart moving in +x at 1.2 m/s, four frames."""
    step = 1.2 * 0.4
    return walker_dets({0: [(f, 1 + f * step, 5.0) for f in range(4)],
                        1: [(f, 1 + f * step, 7.0) for f in range(4)]})


def crossing_with_gap():
    """Two walkers crossing diagonally; walker 0 is missed in frame 2."""
    step = 1.0 * 0.4
    a = [(f, 2 + f * step, 2 + f * step) for f in range(5) if f != 2]
    b = [(f, 2 + f * step, 3.6 - f * step) for f in range(5)]
    return walker_dets({0: a, 1: b})


def group_scene():
    """A pair walking side by side plus a lone walker heading the other way."""
    step = 1.3 * 0.4
    return walker_dets({0: [(f, 2 + f * step, 4.0) for f in range(3)],
                        1: [(f, 2 + f * step, 4.7) for f in range(3)],
                        2: [(f, 4 - f * step, 6.0) for f in range(3)]})


FIXTURES = {"parallel": parallel_walkers, "crossing_gap": crossing_with_gap, "group": group_scene}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = [v for k, v in sorted(getattr(mod, "RESULTS", {}).items(), key=lambda kv: str(kv[0]).zfill(3))
             if isinstance(v, str)]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
