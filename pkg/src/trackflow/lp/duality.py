"""Dual programs and verification of simplex certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import EQ, GE, LE, LinearProgram, full_inequality_system
from .simplex import SolveResult, Status


def _explicit_bounds(lp: LinearProgram) -> LinearProgram:
    """Move bounds other than ``>= 0``, ``<= 0`` or free into constraint rows."""
    rows, rhs, rels = list(lp.A), list(lp.b), list(lp.relations)
    lower, upper = list(lp.lower), list(lp.upper)
    for j in range(lp.n):
        lo, up = lower[j], upper[j]
        if (lo, up) in ((0.0, None), (None, 0.0), (None, None)):
            continue
        e = np.zeros(lp.n)
        e[j] = 1.0
        if lo == 0.0:
            lower[j], upper[j] = 0.0, None
            lo = None
        elif up == 0.0:
            lower[j], upper[j] = None, 0.0
            up = None
        else:
            lower[j], upper[j] = None, None
        if lo is not None:
            rows.append(e)
            rhs.append(lo)
            rels.append(GE)
        if up is not None:
            rows.append(e)
            rhs.append(up)
            rels.append(LE)
    return LinearProgram(lp.c, np.array(rows).reshape(len(rhs), lp.n), rhs, rels,
                         lp.sense, lower, upper, list(lp.names))


def dual_of(lp: LinearProgram) -> LinearProgram:
    """The LP dual, with one dual variable per constraint row.

    Nonzero finite bounds are first turned into explicit rows, so the dual has
    ``m + (number of such bounds)`` variables.
    """
    p = _explicit_bounds(lp)
    sense = "min" if p.sense == "max" else "max"
    # sign of y_i for max primal: <= -> y>=0, >= -> y<=0, = -> free; flipped for min
    flip = p.sense == "min"
    lower, upper = [], []
    for rel in p.relations:
        if rel == EQ:
            lower.append(None)
            upper.append(None)
        elif (rel == LE) != flip:
            lower.append(0.0)
            upper.append(None)
        else:
            lower.append(None)
            upper.append(0.0)
    rels = []
    for j in range(p.n):
        lo, up = p.lower[j], p.upper[j]
        if lo is None and up is None:
            rels.append(EQ)
        elif (lo == 0.0) != flip:
            rels.append(GE)
        else:
            rels.append(LE)
    return LinearProgram(c=p.b, A=p.A.T.copy(), b=p.c, relations=rels, sense=sense,
                         lower=lower, upper=upper, names=[f"y{i + 1}" for i in range(p.m)])


@dataclass
class CertificateReport:
    ok: bool
    failures: list = field(default_factory=list)
    gap: float = 0.0


def check_certificates(lp: LinearProgram, result: SolveResult, tol: float = 1e-7) -> CertificateReport:
    """Verify the certificate carried by ``result`` against ``lp``.

    Optimal results need primal feasibility, dual feasibility over the full
    inequality system and ``|c'x - h'y| <= tol * (1 + |c'x|)``. Unbounded
    results need a feasible point and an improving recession direction.
    Infeasible results need a Farkas vector.
    """
    sysm = full_inequality_system(lp)
    G, h = sysm.G, sysm.h
    c = lp.c if lp.sense == "max" else -lp.c
    fails = []
    gap = 0.0

    def primal_ok(x):
        viol = G @ x - h
        if viol.size and viol.max() > tol * (1.0 + np.abs(h).max()):
            fails.append(f"primal infeasible by {viol.max():.3g}")

    if result.status == Status.OPTIMAL:
        x, y = result.x, result.duals
        primal_ok(x)
        if y.size and y.min() < -tol:
            fails.append(f"negative multiplier {y.min():.3g}")
        resid = G.T @ y - c
        if np.abs(resid).max(initial=0.0) > tol * (1.0 + np.abs(c).max(initial=0.0)):
            fails.append(f"dual residual {np.abs(resid).max():.3g}")
        cx = float(c @ x)
        gap = abs(cx - float(h @ y))
        if gap > tol * (1.0 + abs(cx)):
            fails.append(f"duality gap {gap:.3g}")
    elif result.status == Status.UNBOUNDED:
        primal_ok(result.x)
        d = result.ray
        if d is None:
            fails.append("missing ray")
        else:
            gd = G @ d
            if gd.size and gd.max() > tol:
                fails.append(f"ray leaves the feasible set ({gd.max():.3g})")
            if c @ d <= tol:
                fails.append("ray does not improve the objective")
    else:
        lam = result.farkas
        if lam is None:
            fails.append("missing Farkas vector")
        else:
            if lam.size and lam.min() < -tol:
                fails.append("Farkas vector has a negative entry")
            if np.abs(G.T @ lam).max(initial=0.0) > tol:
                fails.append(f"lambda'G != 0 ({np.abs(G.T @ lam).max():.3g})")
            if abs(float(h @ lam) + 1.0) > tol:
                fails.append(f"lambda'h = {float(h @ lam):.6g}, expected -1")
    return CertificateReport(not fails, fails, gap)
