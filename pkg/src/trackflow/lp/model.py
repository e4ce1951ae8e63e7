"""Linear program container and the conversions between its forms.

Three views of the same problem are used throughout the package:

* the *general* form held by :class:`LinearProgram` (either sense, mixed
  relations, arbitrary variable bounds),
* the *standard* form ``min c'y, Ay = b, y >= 0`` returned by
  :func:`to_standard_form`,
* the *canonical* inequality form ``max c'y, Ay <= b, y >= 0`` returned by
  :func:`to_canonical_form`, which is what a simplex dictionary is built from.

Every conversion returns a mapping record that recovers original variable
values, and (for the canonical form) maps dual multipliers back onto the
full inequality system of the original program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

LE = "<="
EQ = "="
GE = ">="
RELATIONS = (LE, EQ, GE)


@dataclass
class LinearProgram:
    """``sense c'x`` subject to ``A x (rel) b`` and ``lower <= x <= upper``.

    ``lower``/``upper`` entries of ``None`` mean unbounded on that side. The
    default is the usual nonnegativity ``x >= 0``.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    relations: list = None
    sense: str = "max"
    lower: list = None
    upper: list = None
    names: Optional[list] = None
    row_names: Optional[list] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        m = self.b.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = np.zeros((m, n))
        self.A = A.reshape(m, n) if A.ndim != 2 else A
        if self.A.shape != (m, n):
            raise ValueError(f"A has shape {self.A.shape}, expected {(m, n)}")
        if self.relations is None:
            self.relations = [LE] * m
        self.relations = [str(r) for r in self.relations]
        if len(self.relations) != m:
            raise ValueError("one relation per constraint row is required")
        bad = [r for r in self.relations if r not in RELATIONS]
        if bad:
            raise ValueError(f"unknown relation(s) {bad}")
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        self.lower = [0.0] * n if self.lower is None else [_bound(v) for v in self.lower]
        self.upper = [None] * n if self.upper is None else [_bound(v) for v in self.upper]
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError("bounds must have one entry per variable")
        if self.names is None:
            self.names = [f"x{j + 1}" for j in range(n)]

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def m(self) -> int:
        return self.b.size

    def objective(self, x) -> float:
        return float(self.c @ np.asarray(x, dtype=float))

    def is_canonical(self) -> bool:
        """True for ``max``, all rows ``<=``, every variable exactly ``>= 0``."""
        return (
            self.sense == "max"
            and all(r == LE for r in self.relations)
            and all(lo == 0.0 for lo in self.lower)
            and all(up is None for up in self.upper)
        )

    def is_standard(self) -> bool:
        return (
            self.sense == "min"
            and all(r == EQ for r in self.relations)
            and all(lo == 0.0 for lo in self.lower)
            and all(up is None for up in self.upper)
        )


def _bound(v):
    if v is None:
        return None
    v = float(v)
    if np.isinf(v):
        return None
    return v


@dataclass
class InequalitySystem:
    """``G x <= h`` over the original variables, with a label per row.

    Labels are ``("row", i, +1)`` for a ``<=`` row (or the ``<=`` half of an
    equality), ``("row", i, -1)`` for a negated ``>=`` row, ``("lower", j)``
    for ``-x_j <= -l_j`` and ``("upper", j)`` for ``x_j <= u_j``.
    """

    G: np.ndarray
    h: np.ndarray
    labels: list


def full_inequality_system(lp: LinearProgram) -> InequalitySystem:
    rows, rhs, labels = [], [], []
    for i, rel in enumerate(lp.relations):
        if rel in (LE, EQ):
            rows.append(lp.A[i])
            rhs.append(lp.b[i])
            labels.append(("row", i, 1))
        if rel in (GE, EQ):
            rows.append(-lp.A[i])
            rhs.append(-lp.b[i])
            labels.append(("row", i, -1))
    eye = np.eye(lp.n)
    for j in range(lp.n):
        if lp.lower[j] is not None:
            rows.append(-eye[j])
            rhs.append(-lp.lower[j])
            labels.append(("lower", j))
        if lp.upper[j] is not None:
            rows.append(eye[j])
            rhs.append(lp.upper[j])
            labels.append(("upper", j))
    G = np.array(rows, dtype=float).reshape(len(rows), lp.n)
    return InequalitySystem(G, np.array(rhs, dtype=float), labels)


@dataclass
class VariableMap:
    """``x = offset + S y`` between original ``x`` and transformed ``y``.

    ``columns[k]`` is ``(j, sign)`` for a column derived from original
    variable ``j`` or ``(None, 0)`` for a slack/surplus column.
    """

    columns: list
    offset: np.ndarray
    n_original: int
    objective_offset: float = 0.0
    objective_sign: float = 1.0

    @property
    def S(self) -> np.ndarray:
        S = np.zeros((self.n_original, len(self.columns)))
        for k, (j, sign) in enumerate(self.columns):
            if j is not None:
                S[j, k] = sign
        return S

    def recover(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        x = self.offset.copy()
        for k, (j, sign) in enumerate(self.columns):
            if j is not None:
                x[j] += sign * y[k]
        return x

    def direction(self, d) -> np.ndarray:
        """Map a direction (no offset) back to original coordinates."""
        d = np.asarray(d, dtype=float)
        x = np.zeros(self.n_original)
        for k, (j, sign) in enumerate(self.columns):
            if j is not None:
                x[j] += sign * d[k]
        return x


def _substitute(lp: LinearProgram):
    """Shift, reflect or split each variable so every new column is ``>= 0``.

    Returns the column list, offset, and the indices of variables that keep
    an explicit upper-bound row (finite on both sides).
    """
    columns, offset, boxed = [], np.zeros(lp.n), []
    for j in range(lp.n):
        lo, up = lp.lower[j], lp.upper[j]
        if lo is not None:
            if up is not None and up < lo:
                raise ValueError(f"variable {lp.names[j]} has empty bounds")
            offset[j] = lo
            columns.append((j, 1))
            if up is not None:
                boxed.append((j, len(columns) - 1))
        elif up is not None:
            offset[j] = up
            columns.append((j, -1))
        else:
            columns.append((j, 1))
            columns.append((j, -1))
    return columns, offset, boxed


def to_standard_form(lp: LinearProgram):
    """Convert to ``min c'y, Ay = b, y >= 0``.

    Maximization is negated, ``<=``/``>=`` rows receive slack/surplus columns,
    finite lower bounds are shifted out, upper-only variables are reflected
    and free variables are split into a difference of two columns.

    Returns
    -------
    (LinearProgram, VariableMap)
        The standard-form program and the record that maps its solution
        back (``x = map.recover(y)``; original objective is
        ``map.objective_sign * (c_std @ y + map.objective_offset)``).
    """
    columns, offset, boxed = _substitute(lp)
    sign = 1.0 if lp.sense == "min" else -1.0
    c_min = sign * lp.c

    S = np.zeros((lp.n, len(columns)))
    for k, (j, s) in enumerate(columns):
        S[j, k] = s
    A_sub = lp.A @ S
    b_sub = lp.b - lp.A @ offset

    rows, rhs, rels = list(A_sub), list(b_sub), list(lp.relations)
    for j, k in boxed:
        row = np.zeros(len(columns))
        row[k] = 1.0
        rows.append(row)
        rhs.append(lp.upper[j] - lp.lower[j])
        rels.append(LE)

    n_struct = len(columns)
    n_slack = sum(1 for r in rels if r != EQ)
    A_std = np.zeros((len(rows), n_struct + n_slack))
    names = []
    for k, (j, s) in enumerate(columns):
        names.append(lp.names[j] if sum(1 for jj, _ in columns if jj == j) == 1
                     else f"{lp.names[j]}{'+' if s > 0 else '-'}")
    slack = n_struct
    for i, (row, rel) in enumerate(zip(rows, rels)):
        A_std[i, :n_struct] = row
        if rel == LE:
            A_std[i, slack] = 1.0
        elif rel == GE:
            A_std[i, slack] = -1.0
        if rel != EQ:
            names.append(f"s{slack - n_struct + 1}")
            slack += 1
    full_columns = columns + [(None, 0)] * n_slack
    c_std = np.concatenate([S.T @ c_min, np.zeros(n_slack)])

    std = LinearProgram(
        c=c_std, A=A_std, b=np.array(rhs, dtype=float), relations=[EQ] * len(rows),
        sense="min", names=names,
    )
    mapping = VariableMap(
        columns=full_columns, offset=offset, n_original=lp.n,
        objective_offset=float(c_min @ offset), objective_sign=sign,
    )
    return std, mapping


@dataclass
class CanonicalMap(VariableMap):
    """Variable map plus the dual bookkeeping of the canonical form.

    ``row_origin[r]`` indexes the full inequality system row that canonical
    row ``r`` came from; ``column_origin[k]`` indexes the full-system bound
    row equivalent to ``y_k >= 0`` (``-1`` for halves of a split variable).
    """

    system: InequalitySystem = None
    row_origin: list = field(default_factory=list)
    column_origin: list = field(default_factory=list)

    def lift_multipliers(self, row_mult, col_mult) -> np.ndarray:
        full = np.zeros(len(self.system.h))
        for r, mu in enumerate(row_mult):
            full[self.row_origin[r]] += mu
        for k, mu in enumerate(col_mult):
            if self.column_origin[k] >= 0:
                full[self.column_origin[k]] += mu
        return full


def to_canonical_form(lp: LinearProgram):
    """Convert to ``max c'y, Ay <= b, y >= 0`` (the dictionary starting form).

    Equalities become a ``<=`` and a negated ``>=`` row. Returns
    ``(LinearProgram, CanonicalMap)``.
    """
    system = full_inequality_system(lp)
    columns, offset, boxed = _substitute(lp)
    sign = 1.0 if lp.sense == "max" else -1.0
    c_max = sign * lp.c
    S = np.zeros((lp.n, len(columns)))
    for k, (j, s) in enumerate(columns):
        S[j, k] = s

    index = {label: r for r, label in enumerate(system.labels)}
    boxed_vars = {j for j, _ in boxed}
    rows, rhs, origin = [], [], []
    for r, label in enumerate(system.labels):
        if label[0] == "row" or (label[0] == "upper" and label[1] in boxed_vars):
            rows.append(system.G[r] @ S)
            rhs.append(system.h[r] - system.G[r] @ offset)
            origin.append(r)

    column_origin = []
    split = {j for j, s in columns if s < 0 and lp.upper[j] is None}
    for j, s in columns:
        if j in split:
            column_origin.append(-1)
        elif s > 0:
            column_origin.append(index[("lower", j)])
        else:
            column_origin.append(index[("upper", j)])

    names = []
    for j, s in columns:
        names.append(lp.names[j] if j not in split else f"{lp.names[j]}{'+' if s > 0 else '-'}")
    A = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    can = LinearProgram(c=S.T @ c_max, A=A, b=np.array(rhs, dtype=float),
                        relations=[LE] * len(rows), sense="max", names=names)
    mapping = CanonicalMap(
        columns=columns, offset=offset, n_original=lp.n,
        objective_offset=float(c_max @ offset), objective_sign=sign,
        system=system, row_origin=origin, column_origin=column_origin,
    )
    return can, mapping


def from_arrays(c: Sequence[float], rows: Sequence[Sequence[float]], rhs: Sequence[float],
                relations: Sequence[str] = None, sense: str = "max", **kw) -> LinearProgram:
    """Small convenience constructor: ``from_arrays([5, 4], [[2, 3]], [5])``."""
    return LinearProgram(c=c, A=np.array(rows, dtype=float).reshape(len(rhs), len(c)),
                         b=rhs, relations=list(relations) if relations else None,
                         sense=sense, **kw)
