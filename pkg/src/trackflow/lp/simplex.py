"""Dictionary-form simplex with Bland's rule and a single-variable Phase I.

Variables are indexed ``0`` (auxiliary ``x0``), ``1..n`` (structural) and
``n+1..n+m`` (slacks). A dictionary row reads
``x_B[i] = const[i] + sum_j table[i, j] * x_N[j]`` and the objective reads
``z = obj_const + sum_j obj[j] * x_N[j]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .model import LinearProgram, to_canonical_form

EPS = 1e-9
MAX_PIVOTS = 200_000


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    UNBOUNDED = "Unbounded"
    INFEASIBLE = "Infeasible"


@dataclass
class Dictionary:
    basic: list
    nonbasic: list
    table: np.ndarray
    const: np.ndarray
    obj: np.ndarray
    obj_const: float = 0.0

    def copy(self) -> "Dictionary":
        return Dictionary(list(self.basic), list(self.nonbasic), self.table.copy(),
                          self.const.copy(), self.obj.copy(), float(self.obj_const))

    def is_feasible(self, eps: float = EPS) -> bool:
        return bool(np.all(self.const >= -eps))

    def values(self, n_vars: int) -> np.ndarray:
        """Current basic solution over variables ``0..n_vars-1``."""
        x = np.zeros(n_vars)
        for i, v in enumerate(self.basic):
            if v < n_vars:
                x[v] = self.const[i]
        return x

    def basis(self) -> frozenset:
        return frozenset(self.basic)

    @classmethod
    def from_canonical(cls, lp: LinearProgram) -> "Dictionary":
        """Slack basis of ``max c'x, Ax <= b, x >= 0``."""
        m, n = lp.m, lp.n
        return cls(basic=list(range(n + 1, n + m + 1)), nonbasic=list(range(1, n + 1)),
                   table=-lp.A.copy(), const=lp.b.copy(), obj=lp.c.copy())


def pivot(d: Dictionary, col: int, row: int) -> None:
    """Exchange ``nonbasic[col]`` (entering) with ``basic[row]`` (leaving), in place."""
    a = d.table[row, col]
    if abs(a) <= EPS:
        raise ZeroDivisionError("pivot element is zero")
    prow = -d.table[row] / a
    prow[col] = 1.0 / a
    pconst = -d.const[row] / a

    colvals = d.table[:, col].copy()
    d.table[:, col] = 0.0
    d.table += np.outer(colvals, prow)
    d.const += colvals * pconst
    d.table[row] = prow
    d.const[row] = pconst

    oc = d.obj[col]
    d.obj[col] = 0.0
    d.obj += oc * prow
    d.obj_const += oc * pconst

    # snap round-off so sign tests stay stable
    d.table[np.abs(d.table) < 1e-13] = 0.0
    d.const[np.abs(d.const) < 1e-13] = 0.0
    d.obj[np.abs(d.obj) < 1e-13] = 0.0
    d.basic[row], d.nonbasic[col] = d.nonbasic[col], d.basic[row]


def entering_bland(d: Dictionary, eps: float = EPS) -> Optional[int]:
    """Column of the smallest-index nonbasic variable with positive cost."""
    best = None
    for j, v in enumerate(d.nonbasic):
        if d.obj[j] > eps and (best is None or v < d.nonbasic[best]):
            best = j
    return best


def leaving_bland(d: Dictionary, col: int, eps: float = EPS, prefer: Optional[int] = None):
    """Row of the minimum-ratio basic variable; ties go to the smallest index.

    ``prefer`` names a variable that wins any tie it takes part in (used to
    drive ``x0`` out of the basis during Phase I). Returns ``None`` when no
    row limits the entering variable.
    """
    rows = np.flatnonzero(d.table[:, col] < -eps)
    if rows.size == 0:
        return None
    ratios = d.const[rows] / -d.table[rows, col]
    ratios = np.maximum(ratios, 0.0)
    rmin = ratios.min()
    tied = rows[ratios <= rmin + 1e-12 * (1.0 + abs(rmin))]
    if prefer is not None:
        for r in tied:
            if d.basic[r] == prefer:
                return int(r)
    return int(min(tied, key=lambda r: d.basic[r]))


@dataclass
class Phase2Outcome:
    status: Status
    dictionary: Dictionary
    ray_column: Optional[int] = None
    pivots: list = field(default_factory=list)
    bases: list = field(default_factory=list)


def phase2(d: Dictionary, eps: float = EPS, trace: bool = False,
           max_pivots: int = MAX_PIVOTS) -> Phase2Outcome:
    """Bland pivots from a feasible dictionary until optimal or unbounded."""
    d = d.copy()
    out = Phase2Outcome(Status.OPTIMAL, d)
    if trace:
        out.bases.append(d.basis())
    for _ in range(max_pivots):
        col = entering_bland(d, eps)
        if col is None:
            return out
        row = leaving_bland(d, col, eps)
        if row is None:
            out.status = Status.UNBOUNDED
            out.ray_column = col
            return out
        out.pivots.append((d.nonbasic[col], d.basic[row]))
        pivot(d, col, row)
        if trace:
            out.bases.append(d.basis())
    raise RuntimeError("pivot limit exceeded")


@dataclass
class Infeasible:
    """Phase I verdict: ``lam >= 0`` over canonical rows with ``lam A = 0``-ish,
    ``lam b = -1``; ``x0`` is the optimum of the auxiliary problem."""

    lam: np.ndarray
    x0: float
    pivots: list = field(default_factory=list)
    dictionary: Optional[Dictionary] = None


@dataclass
class Phase1Outcome:
    dictionary: Dictionary
    pivots: list = field(default_factory=list)
    auxiliary: Optional[Dictionary] = None


def _slack_multipliers(d: Dictionary, n: int, m: int) -> tuple:
    """Row and column multipliers read from the objective row."""
    y = np.zeros(m)
    ycol = np.zeros(n)
    for j, v in enumerate(d.nonbasic):
        if n < v <= n + m:
            y[v - n - 1] = -d.obj[j]
        elif 1 <= v <= n:
            ycol[v - 1] = -d.obj[j]
    return y, ycol


def phase1(lp: LinearProgram, eps: float = EPS) -> Union[Phase1Outcome, Infeasible]:
    """Find a feasible dictionary for ``max c'x, Ax <= b, x >= 0``.

    When the slack basis is already feasible it is returned directly. Otherwise
    the auxiliary problem ``max -x0`` with ``x0`` added to every row is solved;
    the first pivot brings ``x0`` in against the most negative row.
    """
    if not lp.is_canonical():
        raise ValueError("phase1 expects the max / <= / x >= 0 form; use to_canonical_form")
    m, n = lp.m, lp.n
    start = Dictionary.from_canonical(lp)
    if start.is_feasible(eps):
        return Phase1Outcome(start)

    aux = Dictionary(
        basic=list(range(n + 1, n + m + 1)), nonbasic=[0] + list(range(1, n + 1)),
        table=np.hstack([np.ones((m, 1)), -lp.A]), const=lp.b.copy(),
        obj=np.concatenate([[-1.0], np.zeros(n)]),
    )
    pivots = []
    bmin = aux.const.min()
    tied = np.flatnonzero(aux.const <= bmin + 1e-12 * (1.0 + abs(bmin)))
    # among equally negative rows the last one leaves
    row = int(tied[-1])
    pivots.append((0, aux.basic[row]))
    pivot(aux, 0, row)

    for _ in range(MAX_PIVOTS):
        col = entering_bland(aux, eps)
        if col is None:
            break
        row = leaving_bland(aux, col, eps, prefer=0)
        if row is None:  # cannot happen: the auxiliary objective is bounded by 0
            raise RuntimeError("auxiliary problem reported unbounded")
        pivots.append((aux.nonbasic[col], aux.basic[row]))
        pivot(aux, col, row)
    else:
        raise RuntimeError("pivot limit exceeded")

    x0 = -aux.obj_const
    scale = 1.0 + float(np.abs(lp.b).max(initial=0.0))
    if x0 > eps * scale:
        y, _ = _slack_multipliers(aux, n, m)
        denom = -float(lp.b @ y)
        lam = y / denom if denom > 0 else y / x0
        return Infeasible(lam=lam, x0=float(x0), pivots=pivots, dictionary=aux)

    if 0 in aux.basic:
        row = aux.basic.index(0)
        cols = [j for j in range(len(aux.nonbasic)) if abs(aux.table[row, j]) > eps]
        if cols:
            col = min(cols, key=lambda j: aux.nonbasic[j])
            pivots.append((aux.nonbasic[col], 0))
            pivot(aux, col, row)
        else:
            keep = [i for i in range(len(aux.basic)) if i != row]
            aux.basic = [aux.basic[i] for i in keep]
            aux.table = aux.table[keep]
            aux.const = aux.const[keep]

    auxiliary = aux.copy()
    c0 = aux.nonbasic.index(0)
    keep = [j for j in range(len(aux.nonbasic)) if j != c0]
    d = Dictionary(basic=list(aux.basic), nonbasic=[aux.nonbasic[j] for j in keep],
                   table=aux.table[:, keep].copy(), const=np.maximum(aux.const, 0.0),
                   obj=np.zeros(len(keep)))
    # rewrite the original objective over the new nonbasic set
    for j, v in enumerate(d.nonbasic):
        if 1 <= v <= n:
            d.obj[j] += lp.c[v - 1]
    for i, v in enumerate(d.basic):
        if 1 <= v <= n:
            d.obj += lp.c[v - 1] * d.table[i]
            d.obj_const += lp.c[v - 1] * d.const[i]
    return Phase1Outcome(d, pivots, auxiliary)


@dataclass
class SolveResult:
    status: Status
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    duals: Optional[np.ndarray] = None
    ray: Optional[np.ndarray] = None
    farkas: Optional[np.ndarray] = None
    auxiliary_optimum: Optional[float] = None
    phase1_point: Optional[np.ndarray] = None
    pivots: list = field(default_factory=list)
    phase1_pivots: list = field(default_factory=list)
    bases: list = field(default_factory=list)
    system: object = None

    @property
    def constraint_duals(self) -> Optional[np.ndarray]:
        """One multiplier per original constraint row (signed for ``>=``/``=``)."""
        if self.duals is None or self.system is None:
            return None
        m = 1 + max((lab[1] for lab in self.system.labels if lab[0] == "row"), default=-1)
        out = np.zeros(m)
        for r, lab in enumerate(self.system.labels):
            if lab[0] == "row":
                out[lab[1]] += lab[2] * self.duals[r]
        return out


def solve(lp: LinearProgram, eps: float = EPS, trace: bool = False) -> SolveResult:
    """Solve a general LP with the two-phase simplex method.

    Certificates are expressed over the full inequality system ``G x <= h`` of
    the original program (see :func:`full_inequality_system`):

    * optimal: ``duals >= 0``, ``G' duals = c`` (``-c`` for minimization),
    * unbounded: ``ray`` with ``G ray <= 0`` and improving objective,
    * infeasible: ``farkas >= 0``, ``G' farkas = 0``, ``h' farkas = -1``.
    """
    can, cmap = to_canonical_form(lp)
    n, m = can.n, can.m
    ph1 = phase1(can, eps)
    if isinstance(ph1, Infeasible):
        ycol = np.maximum(can.A.T @ ph1.lam, 0.0)
        farkas = cmap.lift_multipliers(ph1.lam, ycol)
        return SolveResult(Status.INFEASIBLE, farkas=farkas, auxiliary_optimum=ph1.x0,
                           phase1_pivots=ph1.pivots, system=cmap.system)

    start = ph1.dictionary
    p1_point = cmap.recover(start.values(n + 1)[1:])
    out = phase2(start, eps, trace=trace)
    d = out.dictionary
    res = SolveResult(out.status, phase1_point=p1_point, pivots=out.pivots,
                      phase1_pivots=ph1.pivots, bases=out.bases, system=cmap.system,
                      auxiliary_optimum=0.0 if ph1.auxiliary is not None else None)
    x_can = d.values(n + 1)[1:]
    if out.status == Status.UNBOUNDED:
        v = d.nonbasic[out.ray_column]
        dirn = np.zeros(n + m + 1)
        dirn[v] = 1.0
        for i, u in enumerate(d.basic):
            dirn[u] = d.table[i, out.ray_column]
        res.ray = cmap.direction(dirn[1:n + 1])
        res.x = cmap.recover(x_can)
        res.objective = None
        return res

    y, ycol = _slack_multipliers(d, n, m)
    res.x = cmap.recover(x_can)
    res.objective = float(lp.c @ res.x)
    res.duals = cmap.lift_multipliers(y, ycol)
    return res
