"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Operation order is kept identical to the Cython code so both backends give
bit-identical walk sums. They are orders of magnitude slower; see
``benchmarks/bench_kernels.py``.
"""
from __future__ import annotations

import math

import numpy as np


def egonet_walk_sums(indptr, indices, weights, radius: int, kmax: int, start: int, stop: int) -> np.ndarray:
    indptr = indptr.tolist()
    indices = indices.tolist()
    weights = weights.tolist()
    n = len(indptr) - 1
    out = np.zeros((max(stop - start, 0), kmax + 1))
    loc = [-1] * n
    for ego in range(start, stop):
        members = [ego]
        loc[ego] = 0
        level_end = [1]
        head = 0
        for d in range(1, radius + 1):
            for p in range(head, level_end[d - 1]):
                u = members[p]
                for e in range(indptr[u], indptr[u + 1]):
                    v = indices[e]
                    if loc[v] < 0:
                        loc[v] = len(members)
                        members.append(v)
            head = level_end[d - 1]
            level_end.append(len(members))
        depth = radius

        cnt = len(members)
        x = [0.0] * cnt
        y = [0.0] * cnt
        x[0] = 1.0
        row = out[ego - start]
        row[0] = 1.0
        for t in range(1, kmax + 1):
            rows = level_end[min(t, kmax - t, depth)]
            for p in range(rows):
                u = members[p]
                acc = 0.0
                for e in range(indptr[u], indptr[u + 1]):
                    q = loc[indices[e]]
                    if q >= 0:
                        acc = acc + weights[e] * x[q]
                y[p] = acc
            row[t] = y[0]
            x, y = y, x
        for u in members:
            loc[u] = -1
    return out


def jacobi_sweeps(a: np.ndarray, tol: float, max_sweeps: int) -> int:
    """Cyclic Jacobi on ``a`` in place, rotating whole rows/columns with numpy."""
    k = a.shape[0]
    frob = math.sqrt(float(np.sum(a * a)))
    iu = np.triu_indices(k, 1)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= tol * frob:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = a[p, p] - t * apq
                aqq = a[q, q] + t * apq
                g = a[:, p].copy()
                h = a[:, q].copy()
                a[:, p] = g - s * (h + g * tau)
                a[:, q] = h + s * (g - h * tau)
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app
                a[q, q] = aqq
                a[p, q] = 0.0
                a[q, p] = 0.0
    return -1


def triangle_count(indptr, indices) -> int:
    indptr = indptr.tolist()
    indices = indices.tolist()
    count = 0
    for i in range(len(indptr) - 1):
        a_end = indptr[i + 1]
        for e in range(indptr[i], a_end):
            j = indices[e]
            if j <= i:
                continue
            a = e + 1
            b, b_end = indptr[j], indptr[j + 1]
            while b < b_end and indices[b] <= j:
                b += 1
            while a < a_end and b < b_end:
                if indices[a] < indices[b]:
                    a += 1
                elif indices[a] > indices[b]:
                    b += 1
                else:
                    count += 1
                    a += 1
                    b += 1
    return count
