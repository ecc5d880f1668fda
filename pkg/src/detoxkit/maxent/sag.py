"""Stochastic average gradient (SAG) and SAGA for the multinomial objective.

The per-step work is proportional to the number of nonzeros in the sampled
row: the ridge shrinkage is folded into a scalar ``wscale`` and the
averaged-gradient step is applied to each feature lazily, the next time
that feature is touched (or at the end of the epoch).
"""

from __future__ import annotations

import warnings

import numba
import numpy as np

from ..errors import SolverError
from .solvers import SolveResult


@numba.njit(cache=True)
def _epoch(indptr, indices, data, y, order, v, b, mem, S, Sb, seen, n_seen,
           eta, lam, saga):
    """Run one pass over ``order``; returns the updated seen-sample count.

    ``v`` (K x D) holds the weights with wscale already folded out, so it is
    the true weight matrix on entry and on exit.
    """
    K, D = v.shape
    N = mem.shape[0]
    wscale = 1.0
    acc = 0.0
    last = np.zeros(D)
    scores = np.empty(K)
    g_new = np.empty(K)
    for t in range(order.shape[0]):
        i = order[t]
        lo, hi = indptr[i], indptr[i + 1]
        # bring touched features up to date
        for jj in range(lo, hi):
            j = indices[jj]
            lag = acc - last[j]
            if lag != 0.0:
                for k in range(K):
                    v[k, j] -= lag * S[k, j]
            last[j] = acc
        for k in range(K):
            s = 0.0
            for jj in range(lo, hi):
                s += v[k, indices[jj]] * data[jj]
            scores[k] = wscale * s + b[k]
        m = scores[0]
        for k in range(1, K):
            if scores[k] > m:
                m = scores[k]
        z = 0.0
        for k in range(K):
            scores[k] = np.exp(scores[k] - m)
            z += scores[k]
        for k in range(K):
            g_new[k] = scores[k] / z
        g_new[y[i]] -= 1.0
        if not seen[i]:
            seen[i] = True
            n_seen += 1
        for k in range(K):
            delta = g_new[k] - mem[i, k]
            mem[i, k] = g_new[k]
            Sb[k] += delta
            for jj in range(lo, hi):
                S[k, indices[jj]] += delta * data[jj]
            g_new[k] = delta
        wscale *= 1.0 - eta * lam
        if saga:
            denom = N
            corr = eta * (1.0 - 1.0 / N)
            for k in range(K):
                for jj in range(lo, hi):
                    v[k, indices[jj]] -= corr * g_new[k] * data[jj] / wscale
                b[k] -= corr * g_new[k]
        else:
            denom = n_seen
        acc += eta / (denom * wscale)
        for k in range(K):
            b[k] -= eta * Sb[k] / denom
    # flush pending lazy updates and fold wscale back in
    for j in range(D):
        lag = acc - last[j]
        for k in range(K):
            v[k, j] = wscale * (v[k, j] - lag * S[k, j])
    return n_seen


def step_size(X, C: float) -> float:
    """Constant step 1/L with L = 0.5 max_i ||x_i||^2 + 1/C (x includes the intercept).

    The softmax cross-entropy of one sample has Hessian (diag(p) - pp^T) (x) xx^T,
    whose largest eigenvalue is at most ||x||^2 / 2. The binary logistic bound
    of ||x||^2 / 4 is too small for the K-row parameterization and makes SAGA
    oscillate.
    """
    sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
    return 1.0 / (0.5 * (sq.max() + 1.0) + 1.0 / C)


def sag(loss, X, y, n_classes, C, w0, tol=1e-4, max_iter=100, seed=42,
        saga=False) -> SolveResult:
    """Minimize the multinomial objective with SAG (or SAGA when ``saga``).

    ``loss`` is the :class:`MultinomialLoss` for the same data; it supplies
    the exact full gradient checked at the end of every epoch. ``max_iter``
    counts epochs.
    """
    X = X.tocsr()
    N, D = X.shape
    theta = w0.reshape(n_classes, D + 1).copy()
    v = np.ascontiguousarray(theta[:, :D])
    b = np.ascontiguousarray(theta[:, D])
    mem = np.zeros((N, n_classes))
    S = np.zeros((n_classes, D))
    Sb = np.zeros(n_classes)
    seen = np.zeros(N, dtype=np.bool_)
    n_seen = 0
    eta = step_size(X, C)
    lam = 1.0 / (C * N)
    rng = np.random.default_rng(seed)
    indptr = X.indptr.astype(np.int64)
    indices = X.indices.astype(np.int64)
    data = X.data.astype(np.float64)
    y = np.asarray(y, dtype=np.int64)

    def pack():
        return np.hstack([v, b[:, None]]).ravel()

    f, g = loss.value_grad(pack())
    gnorm = float(np.max(np.abs(g)))
    res = SolveResult(pack(), f, gnorm, 0, False, trace=[(0, f, gnorm)])
    first_f = None
    for epoch in range(1, max_iter + 1):
        if gnorm <= tol:
            res.converged = True
            break
        order = rng.integers(0, N, size=N)
        n_seen = _epoch(indptr, indices, data, y, order, v, b, mem, S, Sb, seen,
                        n_seen, eta, lam, saga)
        f, g = loss.value_grad(pack())
        if not np.isfinite(f):
            raise SolverError(f"non-finite objective at epoch {epoch}")
        gnorm = float(np.max(np.abs(g)))
        if first_f is None:
            first_f = f
        res.n_iter = epoch
        res.trace.append((epoch, f, gnorm))
    else:
        res.converged = gnorm <= tol
    if first_f is not None and f > first_f:
        warnings.warn(f"{'SAGA' if saga else 'SAG'} objective rose from {first_f:.6g} "
                      f"after the first epoch to {f:.6g}", RuntimeWarning, stacklevel=2)
    res.w, res.f, res.grad_norm = pack(), f, gnorm
    return res
