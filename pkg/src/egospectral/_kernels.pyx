# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Semantics and floating-point operation order match
egospectral._fallback exactly; the test suite checks bit-equality."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt
from libc.stdlib cimport free, malloc

cnp.import_array()

ctypedef long long i64


cdef int _walk_sums(const i64* indptr, const i64* indices, const double* weights,
                    i64 n, int radius, int kmax, i64 start, i64 stop,
                    double* out) noexcept nogil:
    cdef i64* loc = <i64*>malloc(n * sizeof(i64))
    cdef i64* members = <i64*>malloc(n * sizeof(i64))
    cdef i64* level_end = <i64*>malloc((radius + 1) * sizeof(i64))
    cdef double* x = <double*>malloc(n * sizeof(double))
    cdef double* y = <double*>malloc(n * sizeof(double))
    cdef double* tmp
    cdef i64 i, ego, cnt, p, u, v, e, q, head, rows
    cdef int d, t, depth
    cdef double acc
    cdef i64 stride = kmax + 1
    if loc == NULL or members == NULL or level_end == NULL or x == NULL or y == NULL:
        free(loc); free(members); free(level_end); free(x); free(y)
        return -1
    for i in range(n):
        loc[i] = -1
        x[i] = 0.0
        y[i] = 0.0

    for ego in range(start, stop):
        members[0] = ego
        loc[ego] = 0
        cnt = 1
        level_end[0] = 1
        head = 0
        depth = 0
        for d in range(1, radius + 1):
            for p in range(head, level_end[d - 1]):
                u = members[p]
                for e in range(indptr[u], indptr[u + 1]):
                    v = indices[e]
                    if loc[v] < 0:
                        loc[v] = cnt
                        members[cnt] = v
                        cnt += 1
            head = level_end[d - 1]
            level_end[d] = cnt
            depth = d

        x[0] = 1.0
        out[(ego - start) * stride] = 1.0
        for t in range(1, kmax + 1):
            # x_t vanishes beyond hop t and only hops <= kmax - t feed [A^kmax]_00
            d = t
            if kmax - t < d:
                d = kmax - t
            if depth < d:
                d = depth
            rows = level_end[d]
            for p in range(rows):
                u = members[p]
                acc = 0.0
                for e in range(indptr[u], indptr[u + 1]):
                    q = loc[indices[e]]
                    if q >= 0:
                        acc = acc + weights[e] * x[q]
                y[p] = acc
            out[(ego - start) * stride + t] = y[0]
            tmp = x
            x = y
            y = tmp

        for p in range(cnt):
            loc[members[p]] = -1
            x[p] = 0.0
            y[p] = 0.0

    free(loc); free(members); free(level_end); free(x); free(y)
    return 0


def egonet_walk_sums(const i64[::1] indptr, const i64[::1] indices, const double[::1] weights,
                     int radius, int kmax, i64 start, i64 stop):
    """Rows ``[A_{i,r}^k]_00`` for k = 0..kmax and nodes start..stop-1."""
    cdef i64 n = indptr.shape[0] - 1
    cdef cnp.ndarray[double, ndim=2, mode="c"] out = np.zeros((stop - start, kmax + 1), dtype=np.float64)
    cdef double* op = <double*>out.data
    cdef const i64* ip = &indptr[0]
    cdef const i64* ix = NULL
    cdef const double* wp = NULL
    cdef int rc
    if indices.shape[0]:
        ix = &indices[0]
        wp = &weights[0]
    if stop <= start:
        return out
    with nogil:
        rc = _walk_sums(ip, ix, wp, n, radius, kmax, start, stop, op)
    if rc != 0:
        raise MemoryError("egonet kernel allocation failed")
    return out


cdef int _jacobi(double[:, ::1] a, double tol, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t k = a.shape[0]
    cdef Py_ssize_t p, q, r
    cdef int sweep
    cdef double off, frob, apq, theta, t, c, s, tau, g, h
    frob = 0.0
    for p in range(k):
        for q in range(k):
            frob = frob + a[p, q] * a[p, q]
    frob = sqrt(frob)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(k):
            for q in range(p + 1, k):
                off = off + a[p, q] * a[p, q]
        off = sqrt(2.0 * off)
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
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                a[p, p] = a[p, p] - t * apq
                a[q, q] = a[q, q] + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(k):
                    if r == p or r == q:
                        continue
                    g = a[r, p]
                    h = a[r, q]
                    a[r, p] = g - s * (h + g * tau)
                    a[r, q] = h + s * (g - h * tau)
                    a[p, r] = a[r, p]
                    a[q, r] = a[r, q]
    return -1


def jacobi_sweeps(double[:, ::1] a, double tol, int max_sweeps):
    """Cyclic Jacobi on ``a`` in place; returns the number of sweeps used, or -1."""
    cdef int rc
    with nogil:
        rc = _jacobi(a, tol, max_sweeps)
    return rc


def triangle_count(const i64[::1] indptr, const i64[::1] indices):
    """Triangles i<j<k by merging the sorted tails of adjacent neighbor lists."""
    cdef i64 n = indptr.shape[0] - 1
    cdef i64 i, e, j, a, b, a_end, b_end, count = 0
    with nogil:
        for i in range(n):
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if j <= i:
                    continue
                a = e + 1
                a_end = indptr[i + 1]
                b = indptr[j]
                b_end = indptr[j + 1]
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
