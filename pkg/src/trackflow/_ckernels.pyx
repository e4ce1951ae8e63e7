# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled shortest-path and assignment kernels.

Operation-for-operation ports of ``_pykernels``; see there for the contracts.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def bellman_ford(cnp.int64_t[::1] indptr, cnp.int64_t[::1] head, double[::1] cost,
                 double[::1] cap, Py_ssize_t source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] dist_a = np.full(n, INFINITY)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pred_a = np.full(n, -1, dtype=np.int64)
    cdef double[::1] dist = dist_a
    cdef cnp.int64_t[::1] pred = pred_a
    cdef Py_ssize_t it, u, p, v
    cdef double du, nd
    cdef bint changed
    cdef Py_ssize_t bad = -1
    dist[source] = 0.0
    for it in range(n):
        changed = False
        for u in range(n):
            du = dist[u]
            if du == INFINITY:
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
    return dist_a, pred_a, bad


cdef inline bint _less(double da, Py_ssize_t na, double db, Py_ssize_t nb) nogil:
    return da < db or (da == db and na < nb)


def dijkstra(cnp.int64_t[::1] indptr, cnp.int64_t[::1] head, double[::1] cost,
             double[::1] cap, Py_ssize_t source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = head.shape[0]
    cdef cnp.ndarray[double, ndim=1] dist_a = np.full(n, INFINITY)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pred_a = np.full(n, -1, dtype=np.int64)
    cdef double[::1] dist = dist_a
    cdef cnp.int64_t[::1] pred = pred_a
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done_a = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] done = done_a
    # binary heap of (key, node) pairs, lazy deletion
    cdef Py_ssize_t cap_h = m + 2
    cdef double[::1] hk = np.empty(cap_h)
    cdef cnp.int64_t[::1] hn = np.empty(cap_h, dtype=np.int64)
    cdef Py_ssize_t size = 0, i, par, child, u, v, p
    cdef double du, nd, c, tk
    cdef cnp.int64_t tn
    dist[source] = 0.0
    hk[0] = 0.0
    hn[0] = source
    size = 1
    while size > 0:
        du = hk[0]
        u = hn[0]
        size -= 1
        if size > 0:
            tk = hk[size]
            tn = hn[size]
            i = 0
            while True:
                child = 2 * i + 1
                if child >= size:
                    break
                if child + 1 < size and _less(hk[child + 1], hn[child + 1], hk[child], hn[child]):
                    child += 1
                if _less(hk[child], hn[child], tk, tn):
                    hk[i] = hk[child]
                    hn[i] = hn[child]
                    i = child
                else:
                    break
            hk[i] = tk
            hn[i] = tn
        if done[u]:
            continue
        done[u] = 1
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
                i = size
                size += 1
                while i > 0:
                    par = (i - 1) // 2
                    if _less(nd, v, hk[par], hn[par]):
                        hk[i] = hk[par]
                        hn[i] = hn[par]
                        i = par
                    else:
                        break
                hk[i] = nd
                hn[i] = v
    return dist_a, pred_a


def hungarian(cost):
    cdef cnp.ndarray[double, ndim=2] C = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n = C.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    cdef double[:, ::1] Cv = C
    cdef double[::1] u = np.zeros(n + 1)
    cdef double[::1] v = np.zeros(n + 1)
    cdef double[::1] minv = np.empty(n + 1)
    cdef cnp.int64_t[::1] match = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] way = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.uint8_t[::1] used = np.zeros(n + 1, dtype=np.uint8)
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double delta, cur, ui0
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        for j in range(n + 1):
            minv[j] = INFINITY
            used[j] = 0
        while True:
            used[j0] = 1
            i0 = match[j0]
            ui0 = u[i0]
            delta = INFINITY
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = Cv[i0 - 1, j - 1] - ui0 - v[j]
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
