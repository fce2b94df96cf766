"""Pure-Python/NumPy versions of the compiled kernels in ``_kernels.pyx``.

Every function here has the same signature and return convention as its
compiled twin so ``regimekit._backend`` can swap them freely.
"""

import math

import numpy as np
from scipy.signal import lfilter


def pairwise_dct(X, lam):
    X = np.asarray(X, dtype=np.float64)
    T = X.shape[0]
    diff = X[:, None, :] - X[None, :, :]
    d = np.sqrt(np.einsum("tsj,tsj->ts", diff, diff))
    if lam == 0.0 or T < 2:
        np.fill_diagonal(d, 0.0)
        return d
    idx = np.arange(T)
    gap = np.abs(idx[:, None] - idx[None, :])
    d = (1.0 + (lam / (T - 1)) * gap) * d
    np.fill_diagonal(d, 0.0)
    return d


def _assign(X, centers):
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(X.shape[0]), labels]


def _repair(labels, mind, k):
    counts = np.bincount(labels, minlength=k)
    for c in range(k):
        if counts[c] > 0:
            continue
        movable = counts[labels] > 1
        if not movable.any():
            continue
        cand = np.where(movable, mind, -1.0)
        far = int(np.argmax(cand))
        counts[labels[far]] -= 1
        labels[far] = c
        counts[c] = 1
        mind[far] = 0.0
    return labels


def _update(X, labels, k):
    centers = np.zeros((k, X.shape[1]))
    counts = np.bincount(labels, minlength=k)
    np.add.at(centers, labels, X)
    nz = counts > 0
    centers[nz] /= counts[nz, None]
    return centers


def lloyd(X, init, max_iter):
    X = np.ascontiguousarray(X, dtype=np.float64)
    k = init.shape[0]
    centers = np.array(init, dtype=np.float64)
    labels, mind = _assign(X, centers)
    labels = _repair(labels, mind, k)
    it = 0
    while it < max_iter:
        it += 1
        centers = _update(X, labels, k)
        new, mind = _assign(X, centers)
        new = _repair(new, mind, k)
        done = np.array_equal(new, labels)
        labels = new
        if done:
            break
    centers = _update(X, labels, k)
    resid = X - centers[labels]
    wss = float(np.sum(resid * resid))
    return labels.astype(np.int64), centers, wss, it


def garch11_filter(e, omega, alpha, beta, h1):
    e = np.asarray(e, dtype=np.float64)
    n = e.shape[0]
    if n == 0:
        return np.empty(0)
    # h[t] - beta*h[t-1] = omega + alpha*e[t-1]^2, seeded so that h[0] = h1
    drive = np.empty(n)
    drive[0] = h1
    drive[1:] = omega + alpha * e[:-1] ** 2
    return lfilter([1.0], [1.0, -beta], drive)


def garch11_loglik(e, omega, alpha, beta, h1):
    e = np.asarray(e, dtype=np.float64)
    h = garch11_filter(e, omega, alpha, beta, h1)
    if not np.all(h > 0.0):
        return -math.inf
    n = e.shape[0]
    return -0.5 * (n * math.log(2.0 * math.pi) + float(np.sum(np.log(h) + e * e / h)))


def majority_vote(codes, h, n_codes):
    codes = np.asarray(codes, dtype=np.int64)
    out = codes.copy()
    T = codes.shape[0]
    w = h + 1
    if h >= T:
        return out
    counts = np.bincount(codes[: h + 1], minlength=n_codes)
    for t in range(h, T):
        if t > h:
            counts[codes[t - w]] -= 1
            counts[codes[t]] += 1
        winners = np.flatnonzero(2 * counts > w)
        if winners.size:
            out[t] = winners[0]
    return out


def silhouette_values(D, labels, k):
    D = np.asarray(D, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    T = D.shape[0]
    onehot = np.zeros((T, k))
    onehot[np.arange(T), labels] = 1.0
    sizes = onehot.sum(axis=0)
    sums = D @ onehot
    own = sizes[labels]
    a = np.where(own > 1, sums[np.arange(T), labels] / np.maximum(own - 1, 1), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        means = sums / sizes
    means[:, sizes == 0] = np.inf
    means[np.arange(T), labels] = np.inf
    b = means.min(axis=1)
    m = np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(m > 0, (b - a) / np.where(m > 0, m, 1.0), 0.0)
    s[own < 2] = 0.0
    return s
