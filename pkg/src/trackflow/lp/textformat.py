"""Plain-text LP files.

Example::

    # production planning
    MAXIMIZE
      5 x1 + 4 x2 + 3 x3
    SUBJECT TO
      c1: 2 x1 + 3 x2 + x3 <= 5
      4 x1 + x2 + 2 x3 <= 11
    BOUNDS
      x3 free
      -1 <= x2 <= 4
    END

Variables without a ``BOUNDS`` entry are ``>= 0``.
"""

from __future__ import annotations

import re

import numpy as np

from .model import EQ, GE, LE, LinearProgram


class LPFormatError(ValueError):
    pass


_NUM = r"(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
_TERM = re.compile(rf"([+-]?)({_NUM})?\*?([A-Za-z_][\w.\[\]]*)?")
_REL = re.compile(r"(<=|>=|=<|=>|=|<|>)")
_SECTIONS = {
    "MAXIMIZE": "max", "MAXIMISE": "max", "MAX": "max",
    "MINIMIZE": "min", "MINIMISE": "min", "MIN": "min",
    "SUBJECTTO": "st", "ST": "st", "S.T.": "st", "SUCHTHAT": "st",
    "BOUNDS": "bounds", "END": "end",
}
_REL_NORM = {"<=": LE, "=<": LE, "<": LE, ">=": GE, "=>": GE, ">": GE, "=": EQ}


def _linear(expr: str, lineno: int) -> tuple[dict, float]:
    """Parse ``3x1 - x2 + 4`` into ({var: coef}, constant)."""
    s = expr.replace(" ", "").replace("\t", "")
    if not s:
        raise LPFormatError(f"line {lineno}: empty expression")
    coefs: dict = {}
    const = 0.0
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise LPFormatError(f"line {lineno}: cannot parse '{expr.strip()}' near '{s[pos:]}'")
        if pos > 0 and not m.group(1):
            raise LPFormatError(f"line {lineno}: missing operator before '{s[pos:]}'")
        sign = -1.0 if m.group(1) == "-" else 1.0
        val = float(m.group(2)) if m.group(2) else 1.0
        if m.group(3):
            coefs[m.group(3)] = coefs.get(m.group(3), 0.0) + sign * val
        else:
            const += sign * val
        pos = m.end()
    return coefs, const


def parse_lp(text: str) -> LinearProgram:
    section = None
    sense = None
    objective: list = []
    rows: list = []
    bounds: dict = {}
    order: list = []

    def note(names):
        for v in names:
            if v not in order:
                order.append(v)

    ended = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ended:
            raise LPFormatError(f"line {lineno}: content after END")
        key = line.upper().replace(" ", "").rstrip(":")
        if key in _SECTIONS:
            section = _SECTIONS[key]
            if section in ("max", "min"):
                if sense is not None:
                    raise LPFormatError(f"line {lineno}: second objective section")
                sense = section
            elif section == "end":
                ended = True
            continue
        if section is None:
            raise LPFormatError(f"line {lineno}: expected MAXIMIZE or MINIMIZE first")
        if section in ("max", "min"):
            objective.append((line, lineno))
        elif section == "st":
            label = None
            if ":" in line:
                label, line = (p.strip() for p in line.split(":", 1))
            parts = _REL.split(line)
            if len(parts) != 3:
                raise LPFormatError(f"line {lineno}: constraint needs exactly one relation")
            lhs, c1 = _linear(parts[0], lineno)
            rhs, c2 = _linear(parts[2], lineno)
            coefs = dict(lhs)
            for v, a in rhs.items():
                coefs[v] = coefs.get(v, 0.0) - a
            note(coefs)
            rows.append((label, coefs, _REL_NORM[parts[1]], c2 - c1))
        elif section == "bounds":
            _parse_bound(line, lineno, bounds)
            note(bounds_order(line))
        else:
            raise LPFormatError(f"line {lineno}: unexpected content")
    if sense is None:
        raise LPFormatError("missing MAXIMIZE/MINIMIZE section")
    if not objective:
        raise LPFormatError("empty objective")
    obj, _ = _linear(" ".join(t for t, _ in objective), objective[0][1])
    # objective variables come first in the column order
    order = list(obj) + [v for v in order if v not in obj]
    for v in bounds:
        if v not in order:
            order.append(v)
    idx = {v: j for j, v in enumerate(order)}
    n = len(order)
    c = np.zeros(n)
    for v, a in obj.items():
        c[idx[v]] = a
    A = np.zeros((len(rows), n))
    for i, (_, coefs, _, _) in enumerate(rows):
        for v, a in coefs.items():
            A[i, idx[v]] = a
    lower = [bounds.get(v, (0.0, None))[0] for v in order]
    upper = [bounds.get(v, (0.0, None))[1] for v in order]
    lp = LinearProgram(c=c, A=A, b=[r[3] for r in rows], relations=[r[2] for r in rows],
                       sense=sense, lower=lower, upper=upper, names=order)
    lp.row_names = [r[0] or f"c{i + 1}" for i, r in enumerate(rows)]
    return lp


_VAR = re.compile(r"^[A-Za-z_][\w.\[\]]*$")


def bounds_order(line: str) -> list:
    return [t for t in re.split(r"\s+|<=|>=|=", line) if _VAR.match(t) and t.lower() != "free"]


def _num(tok: str, lineno: int) -> float:
    t = tok.strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return np.inf
    if t in ("-inf", "-infinity"):
        return -np.inf
    try:
        return float(t)
    except ValueError:
        raise LPFormatError(f"line {lineno}: bad number '{tok}'") from None


def _parse_bound(line: str, lineno: int, bounds: dict) -> None:
    toks = line.split()
    if len(toks) == 2 and toks[1].lower() == "free":
        bounds[toks[0]] = (None, None)
        return
    s = line.replace(" ", "")
    parts = _REL.split(s)
    rels = parts[1::2]
    items = parts[0::2]

    def fin(v):
        return None if np.isinf(v) else v

    if len(items) == 3 and rels[0] in ("<=", "<") and rels[1] in ("<=", "<"):
        var = items[1]
        lo, up = fin(_num(items[0], lineno)), fin(_num(items[2], lineno))
    elif len(items) == 2 and _VAR.match(items[0]):
        var = items[0]
        lo, up = bounds.get(var, (0.0, None))
        val = fin(_num(items[1], lineno))
        r = _REL_NORM[rels[0]]
        if r == GE:
            lo = val
        elif r == LE:
            up = val
        else:
            lo = up = val
    elif len(items) == 2 and _VAR.match(items[1]):
        var = items[1]
        lo, up = bounds.get(var, (0.0, None))
        val = fin(_num(items[0], lineno))
        r = _REL_NORM[rels[0]]
        if r == LE:
            lo = val
        elif r == GE:
            up = val
        else:
            lo = up = val
    else:
        raise LPFormatError(f"line {lineno}: cannot parse bound '{line}'")
    if not _VAR.match(var):
        raise LPFormatError(f"line {lineno}: bad variable name '{var}'")
    bounds[var] = (lo, up)


def read_lp(path) -> LinearProgram:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_lp(fh.read())


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def format_lp(lp: LinearProgram) -> str:
    """Inverse of :func:`parse_lp` (up to whitespace).

    The objective lists every variable, zero coefficients included, so that
    parsing restores the column order.
    """

    def expr(row, keep_zero=False):
        out = []
        for a, name in zip(row, lp.names):
            if a == 0:
                if keep_zero:
                    out.append(f"+ 0 {name}")
                continue
            sign = "-" if a < 0 else "+"
            mag = "" if abs(a) == 1 else _fmt(abs(a)) + " "
            out.append(f"{sign} {mag}{name}")
        if not out:
            return "0 " + lp.names[0] if lp.names else "0"
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    lines = ["MAXIMIZE" if lp.sense == "max" else "MINIMIZE", "  " + expr(lp.c, keep_zero=True), "SUBJECT TO"]
    names = getattr(lp, "row_names", None) or [f"c{i + 1}" for i in range(lp.m)]
    for i in range(lp.m):
        lines.append(f"  {names[i]}: {expr(lp.A[i])} {lp.relations[i]} {_fmt(lp.b[i])}")
    blines = []
    for name, lo, up in zip(lp.names, lp.lower, lp.upper):
        if lo == 0.0 and up is None:
            continue
        if lo is None and up is None:
            blines.append(f"  {name} free")
        elif lo is None:
            blines.append(f"  -inf <= {name} <= {_fmt(up)}")
        elif up is None:
            blines.append(f"  {name} >= {_fmt(lo)}")
        else:
            blines.append(f"  {_fmt(lo)} <= {name} <= {_fmt(up)}")
    if blines:
        lines.append("BOUNDS")
        lines.extend(blines)
    lines.append("END")
    return "\n".join(lines) + "\n"
