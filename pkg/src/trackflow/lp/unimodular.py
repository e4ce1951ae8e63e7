"""Exhaustive total-unimodularity test for small matrices."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

MAX_MINORS = 2_000_000


@dataclass
class TUResult:
    is_tu: bool
    rows: Optional[tuple] = None
    cols: Optional[tuple] = None
    det: Optional[float] = None

    def __bool__(self) -> bool:
        return self.is_tu


def count_minors(m: int, n: int) -> int:
    return sum(comb(m, k) * comb(n, k) for k in range(1, min(m, n) + 1))


def is_totally_unimodular(M, max_minors: int = MAX_MINORS) -> TUResult:
    """Check every square submatrix determinant lies in {-1, 0, 1}.

    The result is truthy iff the matrix is totally unimodular; on failure it
    carries the offending row/column subsets and their determinant.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError("matrix expected")
    if M.size and not np.all(np.isin(M, (-1.0, 0.0, 1.0))):
        bad = np.argwhere(~np.isin(M, (-1.0, 0.0, 1.0)))[0]
        return TUResult(False, (int(bad[0]),), (int(bad[1]),), float(M[tuple(bad)]))
    m, n = M.shape
    total = count_minors(m, n)
    if total > max_minors:
        raise ValueError(f"{m}x{n} matrix has {total} square minors, above the limit {max_minors}")
    for k in range(2, min(m, n) + 1):
        col_sets = np.array(list(combinations(range(n), k)))
        for rows in combinations(range(m), k):
            sub = M[np.array(rows)][:, col_sets].transpose(1, 0, 2)
            dets = np.rint(np.linalg.det(sub))
            bad = np.flatnonzero(np.abs(dets) > 1)
            if bad.size:
                i = bad[0]
                return TUResult(False, rows, tuple(int(c) for c in col_sets[i]), float(dets[i]))
    return TUResult(True)
