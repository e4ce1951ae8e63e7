"""Brute-force reference solvers, independent of the package internals."""

import itertools
import math

import numpy as np


def lp_vertex_oracle(c, A, b, tol=1e-9):
    """max c'x s.t. A x <= b, x >= 0 by enumerating every basic solution.

    Returns ``(z, x)`` or ``None`` when no vertex is feasible. The feasible
    set lies in the nonnegative orthant, so it is pointed and a feasible
    program with a finite optimum attains it at a vertex.
    """
    c, A, b = (np.asarray(v, dtype=float) for v in (c, A, b))
    m, n = A.shape
    G = np.vstack([A, -np.eye(n)])
    h = np.concatenate([b, np.zeros(n)])
    best = None
    for rows in itertools.combinations(range(m + n), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x <= h + tol * (1 + np.abs(h))):
            z = float(c @ x)
            if best is None or z > best[0] + 1e-12:
                best = (z, x)
    return best


def flow_bruteforce(n_nodes, arcs, s, t, k):
    """Min cost of a 0/1 flow of value ``k`` over unit-capacity ``arcs`` (tail, head, cost)."""
    best = math.inf
    for bits in itertools.product((0, 1), repeat=len(arcs)):
        bal = [0] * n_nodes
        cost = 0.0
        for on, (u, v, w) in zip(bits, arcs):
            if on:
                bal[u] += 1
                bal[v] -= 1
                cost += w
        if bal[s] != k or bal[t] != -k:
            continue
        if any(bal[v] for v in range(n_nodes) if v not in (s, t)):
            continue
        best = min(best, cost)
    return best


def assignment_bruteforce(C):
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    best = math.inf
    for perm in itertools.permutations(range(n)):
        best = min(best, float(C[np.arange(n), perm].sum()))
    return best


def map_partition_oracle(dets, link, det_cost):
    """Minimum-cost set of disjoint trajectories by exhaustive enumeration.

    Every detection picks at most one successor and receives at most one
    predecessor; chains of two or more detections are trajectories. A
    trajectory costs the sum of its link costs plus the detection costs of
    its interior detections. ``link(i, j)`` returns ``inf`` for forbidden
    pairs. Returns ``(cost, set of det-id tuples)`` over all minimisers.
    """
    n = len(dets)
    options = [[None] + [j for j in range(n) if j != i and math.isfinite(link(i, j))]
               for i in range(n)]
    best = [math.inf, []]
    succ = [None] * n
    taken = [False] * n

    def evaluate():
        has_pred = [False] * n
        for i in range(n):
            if succ[i] is not None:
                has_pred[succ[i]] = True
        total = 0.0
        chains = []
        for i in range(n):
            if has_pred[i] or succ[i] is None:
                continue
            chain = [i]
            while succ[chain[-1]] is not None:
                prev = chain[-1]
                nxt = succ[prev]
                total += link(prev, nxt)
                chain.append(nxt)
            total += sum(det_cost(k) for k in chain[1:-1])
            chains.append(tuple(dets[k].id for k in chain))
        return total, frozenset(chains)

    def rec(i):
        if i == n:
            cost, chains = evaluate()
            if cost < best[0] - 1e-9:
                best[0], best[1] = cost, [chains]
            elif abs(cost - best[0]) <= 1e-9:
                best[1].append(chains)
            return
        for j in options[i]:
            if j is not None:
                if taken[j]:
                    continue
                taken[j] = True
            succ[i] = j
            rec(i + 1)
            succ[i] = None
            if j is not None:
                taken[j] = False

    rec(0)
    return best[0], best[1]
