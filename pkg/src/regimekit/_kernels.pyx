# cython: language_level=3
"""Compiled hot loops. Signatures mirror ``regimekit._fallback`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, fabs, M_PI

cnp.import_array()


def pairwise_dct(const double[:, ::1] X, double lam):
    cdef Py_ssize_t T = X.shape[0], p = X.shape[1]
    cdef Py_ssize_t t, s, j
    cdef double acc, diff, scale
    out_arr = np.zeros((T, T), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    scale = lam / (T - 1) if T > 1 else 0.0
    for t in range(T):
        for s in range(t + 1, T):
            acc = 0.0
            for j in range(p):
                diff = X[t, j] - X[s, j]
                acc += diff * diff
            acc = (1.0 + scale * (s - t)) * sqrt(acc)
            out[t, s] = acc
            out[s, t] = acc
    return out_arr


cdef Py_ssize_t _assign(const double[:, ::1] X, double[:, ::1] centers,
                        long[::1] labels, double[::1] mind) nogil:
    cdef Py_ssize_t T = X.shape[0], p = X.shape[1], k = centers.shape[0]
    cdef Py_ssize_t i, c, j, best, changed = 0
    cdef double d, diff, bestd
    for i in range(T):
        best = 0
        bestd = 0.0
        for c in range(k):
            d = 0.0
            for j in range(p):
                diff = X[i, j] - centers[c, j]
                d += diff * diff
            if c == 0 or d < bestd:
                bestd = d
                best = c
        if labels[i] != best:
            changed += 1
        labels[i] = best
        mind[i] = bestd
    return changed


cdef void _repair(long[::1] labels, double[::1] mind, long[::1] counts, Py_ssize_t k) nogil:
    cdef Py_ssize_t T = labels.shape[0]
    cdef Py_ssize_t i, c, far
    cdef double fard
    for c in range(k):
        counts[c] = 0
    for i in range(T):
        counts[labels[i]] += 1
    for c in range(k):
        if counts[c] > 0:
            continue
        far = -1
        fard = -1.0
        for i in range(T):
            if counts[labels[i]] > 1 and mind[i] > fard:
                fard = mind[i]
                far = i
        if far < 0:
            continue
        counts[labels[far]] -= 1
        labels[far] = c
        counts[c] = 1
        mind[far] = 0.0


cdef void _update(const double[:, ::1] X, long[::1] labels, long[::1] counts,
                  double[:, ::1] centers) nogil:
    cdef Py_ssize_t T = X.shape[0], p = X.shape[1], k = centers.shape[0]
    cdef Py_ssize_t i, c, j
    for c in range(k):
        counts[c] = 0
        for j in range(p):
            centers[c, j] = 0.0
    for i in range(T):
        c = labels[i]
        counts[c] += 1
        for j in range(p):
            centers[c, j] += X[i, j]
    for c in range(k):
        if counts[c] > 0:
            for j in range(p):
                centers[c, j] /= counts[c]


def lloyd(const double[:, ::1] X, double[:, ::1] init, Py_ssize_t max_iter):
    cdef Py_ssize_t T = X.shape[0], p = X.shape[1], k = init.shape[0]
    cdef Py_ssize_t it = 0, i, j, changed
    cdef double wss = 0.0, diff
    centers_arr = np.array(init, dtype=np.float64, copy=True, order="C")
    labels_arr = np.full(T, -1, dtype=np.int_)
    cdef double[:, ::1] centers = centers_arr
    cdef long[::1] labels = labels_arr
    cdef long[::1] prev = np.empty(T, dtype=np.int_)
    cdef long[::1] counts = np.zeros(k, dtype=np.int_)
    cdef double[::1] mind = np.empty(T, dtype=np.float64)
    with nogil:
        _assign(X, centers, labels, mind)
        _repair(labels, mind, counts, k)
        while it < max_iter:
            it += 1
            _update(X, labels, counts, centers)
            prev[:] = labels
            _assign(X, centers, labels, mind)
            _repair(labels, mind, counts, k)
            changed = 0
            for i in range(T):
                if labels[i] != prev[i]:
                    changed = 1
                    break
            if not changed:
                break
        _update(X, labels, counts, centers)
        for i in range(T):
            for j in range(p):
                diff = X[i, j] - centers[labels[i], j]
                wss += diff * diff
    return labels_arr.astype(np.int64), centers_arr, wss, it


def garch11_filter(const double[::1] e, double omega, double alpha, double beta, double h1):
    cdef Py_ssize_t n = e.shape[0], t
    h_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] h = h_arr
    if n == 0:
        return h_arr
    h[0] = h1
    for t in range(1, n):
        h[t] = omega + alpha * e[t - 1] * e[t - 1] + beta * h[t - 1]
    return h_arr


def garch11_loglik(const double[::1] e, double omega, double alpha, double beta, double h1):
    cdef Py_ssize_t n = e.shape[0], t
    cdef double h = h1, acc = 0.0
    for t in range(n):
        if t > 0:
            h = omega + alpha * e[t - 1] * e[t - 1] + beta * h
        if not h > 0.0:
            return -np.inf
        acc += log(h) + e[t] * e[t] / h
    return -0.5 * (n * log(2.0 * M_PI) + acc)


def majority_vote(const long[::1] codes, Py_ssize_t h, Py_ssize_t n_codes):
    cdef Py_ssize_t T = codes.shape[0], t, c, w = h + 1
    out_arr = np.array(codes, dtype=np.int_, copy=True)
    cdef long[::1] out = out_arr
    cdef long[::1] counts = np.zeros(max(n_codes, 1), dtype=np.int_)
    if h >= T:
        return out_arr.astype(np.int64)
    for t in range(h + 1):
        counts[codes[t]] += 1
    for t in range(h, T):
        if t > h:
            counts[codes[t - w]] -= 1
            counts[codes[t]] += 1
        for c in range(n_codes):
            if 2 * counts[c] > w:
                out[t] = c
                break
    return out_arr.astype(np.int64)


def silhouette_values(const double[:, ::1] D, const long[::1] labels, Py_ssize_t k):
    cdef Py_ssize_t T = D.shape[0], i, j, c, own
    cdef double a, b, m
    out_arr = np.zeros(T, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef long[::1] sizes = np.zeros(k, dtype=np.int_)
    cdef double[::1] sums = np.zeros(k, dtype=np.float64)
    for i in range(T):
        sizes[labels[i]] += 1
    for i in range(T):
        own = labels[i]
        if sizes[own] < 2:
            out[i] = 0.0
            continue
        for c in range(k):
            sums[c] = 0.0
        for j in range(T):
            sums[labels[j]] += D[i, j]
        a = sums[own] / (sizes[own] - 1)
        b = -1.0
        for c in range(k):
            if c == own or sizes[c] == 0:
                continue
            m = sums[c] / sizes[c]
            if b < 0.0 or m < b:
                b = m
        m = a if a > b else b
        out[i] = 0.0 if m == 0.0 else (b - a) / m
    return out_arr
