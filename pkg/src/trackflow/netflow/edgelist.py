"""Edge-list text format::

    # comment
    s A
    t D
    A B 1.5 1
    B D -2 1

Node ids are arbitrary tokens and are numbered in order of first appearance.
"""

from __future__ import annotations

from .network import FlowNetwork


class EdgeListError(ValueError):
    pass


def parse_edge_list(text: str) -> FlowNetwork:
    ids: dict = {}
    arcs = []
    s = t = None

    def node(tok):
        if tok not in ids:
            ids[tok] = len(ids)
        return ids[tok]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] in ("s", "t") and len(toks) == 2:
            v = node(toks[1])
            if toks[0] == "s":
                s = v
            else:
                t = v
            continue
        if len(toks) not in (3, 4):
            raise EdgeListError(f"line {lineno}: expected 'tail head cost capacity'")
        try:
            cost = float(toks[2])
            cap = float(toks[3]) if len(toks) == 4 else 1.0
        except ValueError:
            raise EdgeListError(f"line {lineno}: bad number") from None
        if cap < 0:
            raise EdgeListError(f"line {lineno}: negative capacity")
        if toks[0] == toks[1]:
            raise EdgeListError(f"line {lineno}: self-loop")
        arcs.append((node(toks[0]), node(toks[1]), cost, cap))
    if s is None or t is None:
        raise EdgeListError("missing 's <id>' or 't <id>' header")
    if s == t:
        raise EdgeListError("source equals sink")
    labels = [None] * len(ids)
    for tok, v in ids.items():
        labels[v] = tok
    return FlowNetwork.from_arcs(len(ids), arcs, source=s, sink=t, labels=labels)


def read_edge_list(path) -> FlowNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_edge_list(net: FlowNetwork) -> str:
    lines = [f"s {net.label(net.source)}", f"t {net.label(net.sink)}"]
    for a, b, c, u in net.arcs():
        lines.append(f"{net.label(a)} {net.label(b)} {c:.12g} {u:.12g}")
    return "\n".join(lines) + "\n"
