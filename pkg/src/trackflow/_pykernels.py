"""Pure-Python reference versions of the compiled kernels.

Each function mirrors its counterpart in ``_ckernels.pyx`` operation by
operation so both backends produce bit-identical results.

Graphs are passed in CSR form: arcs leaving node ``u`` occupy positions
``indptr[u]:indptr[u+1]``; ``head``, ``cost`` and ``cap`` are indexed by
position. An arc is usable when ``cap > 0``.
"""

import heapq

import numpy as np

INF = float("inf")


def bellman_ford(indptr, head, cost, cap, source):
    """Sequential Bellman-Ford with early exit.

    Returns ``(dist, pred, bad)`` where ``pred[v]`` is the CSR position of the
    arc into ``v`` on the shortest walk (``-1`` if none) and ``bad`` is a node
    relaxed during the ``n``-th pass (``-1`` when there is no negative cycle).
    """
    n = len(indptr) - 1
    indptr = indptr.tolist()
    head = head.tolist()
    cost = cost.tolist()
    cap = cap.tolist()
    dist = [INF] * n
    pred = [-1] * n
    dist[source] = 0.0
    bad = -1
    for it in range(n):
        changed = False
        for u in range(n):
            du = dist[u]
            if du == INF:
                continue
            for p in range(indptr[u], indptr[u + 1]):
                if cap[p] <= 0:
                    continue
                v = head[p]
                nd = du + cost[p]
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = p
                    changed = True
                    if it == n - 1:
                        bad = v
        if not changed:
            break
    return np.array(dist), np.array(pred, dtype=np.int64), bad


def dijkstra(indptr, head, cost, cap, source):
    """Binary-heap Dijkstra; negative arc costs are treated as zero.

    Ties pop the smaller node id first. Returns ``(dist, pred)``.
    """
    n = len(indptr) - 1
    indptr = indptr.tolist()
    head = head.tolist()
    cost = cost.tolist()
    cap = cap.tolist()
    dist = [INF] * n
    pred = [-1] * n
    done = [False] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for p in range(indptr[u], indptr[u + 1]):
            if cap[p] <= 0:
                continue
            v = head[p]
            if done[v]:
                continue
            c = cost[p]
            if c < 0.0:
                c = 0.0
            nd = du + c
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = p
                heapq.heappush(heap, (nd, v))
    return np.array(dist), np.array(pred, dtype=np.int64)


def hungarian(cost):
    """Minimum-cost perfect assignment of a square matrix.

    Shortest augmenting paths with row/column potentials, O(n^3). Returns the
    column assigned to each row. Entries must be finite.
    """
    C = np.asarray(cost, dtype=float)
    n = C.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rows = C.tolist()
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    match = [0] * (n + 1)  # match[j] = row (1-based) assigned to column j
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            row = rows[i0 - 1]
            ui0 = u[i0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while True:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
            if j0 == 0:
                break
    out = np.zeros(n, dtype=np.int64)
    for j in range(1, n + 1):
        out[match[j] - 1] = j - 1
    return out
