"""Deterministic second-order and quasi-Newton solvers.

Each solver minimizes a loss object exposing ``value_grad(w)`` and
``hessp(w, v)`` (see :mod:`detoxkit.maxent.loss`) and returns a
:class:`SolveResult`. Convergence is declared when the infinity norm of the
gradient drops to ``tol``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..errors import SolverError


@dataclass
class SolveResult:
    w: np.ndarray
    f: float
    grad_norm: float
    n_iter: int
    converged: bool
    trace: list = field(default_factory=list)  # (iteration, objective, grad_norm)
    steps: list = field(default_factory=list)  # accepted line-search steps


@dataclass(frozen=True)
class WolfeStep:
    alpha: float
    f0: float
    dphi0: float
    f: float
    dphi: float

    def satisfies(self, c1: float, c2: float) -> bool:
        armijo = self.f <= self.f0 + c1 * self.alpha * self.dphi0 + 1e-12 * abs(self.f0)
        curvature = abs(self.dphi) <= -c2 * self.dphi0
        return armijo and curvature


def _check_finite(f, it):
    if not np.isfinite(f):
        raise SolverError(f"non-finite objective at iteration {it}")


def _cubic_min(a, fa, da, b, fb, db):
    """Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), or None."""
    d1 = da + db - 3.0 * (fa - fb) / (a - b)
    rad = d1 * d1 - da * db
    if rad < 0:
        return None
    d2 = np.copysign(np.sqrt(rad), b - a)
    denom = db - da + 2.0 * d2
    if denom == 0:
        return None
    return b - (b - a) * (db + d2 - d1) / denom


def strong_wolfe(func, w, f0, g0, d, alpha1=1.0, c1=1e-4, c2=0.9, max_iter=30):
    """Line search along ``d`` satisfying the strong Wolfe conditions.

    Returns ``(alpha, f, g, WolfeStep)`` or ``None`` if no acceptable step
    was found.
    """
    dphi0 = float(g0 @ d)

    def phi(alpha):
        f, g = func(w + alpha * d)
        return f, g, float(g @ d)

    def zoom(lo, hi, f_lo, f_hi, d_lo, d_hi):
        for _ in range(max_iter):
            width = abs(hi - lo)
            a = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            left, right = min(lo, hi), max(lo, hi)
            if a is None or not (left + 0.1 * width <= a <= right - 0.1 * width):
                a = 0.5 * (lo + hi)
            f, g, da = phi(a)
            if not np.isfinite(f) or f > f0 + c1 * a * dphi0 or f >= f_lo:
                hi, f_hi, d_hi = a, f, da
            else:
                if abs(da) <= -c2 * dphi0:
                    return a, f, g, da
                if da * (hi - lo) >= 0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo = a, f, da
            if width < 1e-16 * max(1.0, abs(lo)):
                break
        return None

    a_prev, f_prev, d_prev = 0.0, f0, dphi0
    a = alpha1
    out = None
    for i in range(max_iter):
        f, g, da = phi(a)
        if not np.isfinite(f) or f > f0 + c1 * a * dphi0 or (i > 0 and f >= f_prev):
            out = zoom(a_prev, a, f_prev, f if np.isfinite(f) else np.inf, d_prev, da)
            break
        if abs(da) <= -c2 * dphi0:
            out = (a, f, g, da)
            break
        if da >= 0:
            out = zoom(a, a_prev, f, f_prev, da, d_prev)
            break
        a_prev, f_prev, d_prev = a, f, da
        a *= 2.0
    if out is None:
        return None
    a, f, g, da = out
    return a, f, g, WolfeStep(a, f0, dphi0, f, da)


def lbfgs(loss, w0, tol=1e-4, max_iter=100, memory=10, c1=1e-4, c2=0.9) -> SolveResult:
    w = w0.copy()
    f, g = loss.value_grad(w)
    _check_finite(f, 0)
    gnorm = float(np.max(np.abs(g)))
    res = SolveResult(w, f, gnorm, 0, False, trace=[(0, f, gnorm)])
    pairs: deque = deque(maxlen=memory)
    for it in range(1, max_iter + 1):
        if gnorm <= tol:
            res.converged = True
            break
        # two-loop recursion
        q = -g
        alphas = []
        for s, y, rho in reversed(pairs):
            a = rho * (s @ q)
            alphas.append(a)
            q = q - a * y
        if pairs:
            s, y, _ = pairs[-1]
            q *= (s @ y) / (y @ y)
        for (s, y, rho), a in zip(pairs, reversed(alphas)):
            b = rho * (y @ q)
            q = q + (a - b) * s
        d = q
        if g @ d >= 0:
            pairs.clear()
            d = -g
        alpha1 = 1.0 if pairs else min(1.0, 1.0 / np.linalg.norm(g))
        ls = strong_wolfe(loss.value_grad, w, f, g, d, alpha1, c1, c2)
        if ls is None:
            break
        alpha, f_new, g_new, step = ls
        _check_finite(f_new, it)
        s = alpha * d
        y = g_new - g
        sy = s @ y
        if sy > 1e-12 * (y @ y):
            pairs.append((s, y, 1.0 / sy))
        w = w + s
        f, g = f_new, g_new
        gnorm = float(np.max(np.abs(g)))
        res.n_iter = it
        res.trace.append((it, f, gnorm))
        res.steps.append(step)
    else:
        res.converged = gnorm <= tol
    res.w, res.f, res.grad_norm = w, f, gnorm
    return res


def _cg(hessp, g, tol, max_iter):
    """Conjugate gradient for H p = -g, stopping on residual or curvature loss."""
    p = np.zeros_like(g)
    r = -g.copy()
    d = r.copy()
    rr = r @ r
    for i in range(max_iter):
        if np.sqrt(rr) <= tol:
            break
        Hd = hessp(d)
        curv = d @ Hd
        if curv <= 1e-16 * (d @ d):
            if i == 0:
                p = -g.copy()
            break
        a = rr / curv
        p += a * d
        r -= a * Hd
        rr_new = r @ r
        d = r + (rr_new / rr) * d
        rr = rr_new
    return p


def newton_cg(loss, w0, tol=1e-4, max_iter=100, max_cg=200, c1=1e-4, c2=0.9) -> SolveResult:
    """Line-search Newton method with Hessian-free CG inner solves."""
    w = w0.copy()
    f, g = loss.value_grad(w)
    _check_finite(f, 0)
    gnorm = float(np.max(np.abs(g)))
    res = SolveResult(w, f, gnorm, 0, False, trace=[(0, f, gnorm)])
    for it in range(1, max_iter + 1):
        if gnorm <= tol:
            res.converged = True
            break
        g2 = np.linalg.norm(g)
        cg_tol = min(0.5, np.sqrt(g2)) * g2
        d = _cg(lambda v: loss.hessp(w, v), g, cg_tol, max_cg)
        if g @ d >= 0:
            d = -g
        ls = strong_wolfe(loss.value_grad, w, f, g, d, 1.0, c1, c2)
        if ls is None:
            break
        alpha, f, g, step = ls
        _check_finite(f, it)
        w = w + alpha * d
        gnorm = float(np.max(np.abs(g)))
        res.n_iter = it
        res.trace.append((it, f, gnorm))
        res.steps.append(step)
    else:
        res.converged = gnorm <= tol
    res.w, res.f, res.grad_norm = w, f, gnorm
    return res


def _trcg(hessp, g, delta, max_iter):
    """Steihaug CG restricted to the ball of radius ``delta``."""
    s = np.zeros_like(g)
    r = -g.copy()
    d = r.copy()
    rr = r @ r
    cg_tol = 0.1 * np.linalg.norm(g)
    for _ in range(max_iter):
        if np.sqrt(rr) <= cg_tol:
            break
        Hd = hessp(d)
        curv = d @ Hd
        if curv <= 0:
            curv = 1e-16 * (d @ d)
        a = rr / curv
        s_next = s + a * d
        if np.linalg.norm(s_next) > delta:
            std, sts, dtd = s @ d, s @ s, d @ d
            rad = np.sqrt(max(std * std + dtd * (delta * delta - sts), 0.0))
            if std >= 0:
                a = (delta * delta - sts) / (std + rad)
            else:
                a = (rad - std) / dtd
            s = s + a * d
            r = r - a * Hd
            break
        s = s_next
        r = r - a * Hd
        rr_new = r @ r
        d = r + (rr_new / rr) * d
        rr = rr_new
    return s, r


def tron(loss, w0, tol=1e-4, max_iter=100, max_cg=200) -> SolveResult:
    """Trust-region Newton method (the LIBLINEAR primal solver scheme)."""
    eta0, eta1, eta2 = 1e-4, 0.25, 0.75
    sigma1, sigma2, sigma3 = 0.25, 0.5, 4.0
    w = w0.copy()
    f, g = loss.value_grad(w)
    _check_finite(f, 0)
    gnorm = float(np.max(np.abs(g)))
    delta = np.linalg.norm(g)
    res = SolveResult(w, f, gnorm, 0, False, trace=[(0, f, gnorm)])
    for it in range(1, max_iter + 1):
        if gnorm <= tol:
            res.converged = True
            break
        s, r = _trcg(lambda v: loss.hessp(w, v), g, delta, max_cg)
        w_new = w + s
        gs = g @ s
        prered = -0.5 * (gs - s @ r)
        f_new, g_new = loss.value_grad(w_new)
        if not np.isfinite(f_new):
            raise SolverError(f"non-finite objective at iteration {it}")
        actred = f - f_new
        snorm = np.linalg.norm(s)
        if it == 1:
            delta = min(delta, snorm)
        denom = f_new - f - gs
        alpha = sigma3 if denom <= 0 else max(sigma1, -0.5 * (gs / denom))
        if actred < eta0 * prered:
            delta = min(max(alpha, sigma1) * snorm, sigma2 * delta)
        elif actred < eta1 * prered:
            delta = max(sigma1 * delta, min(alpha * snorm, sigma2 * delta))
        elif actred < eta2 * prered:
            delta = max(sigma1 * delta, min(alpha * snorm, sigma3 * delta))
        else:
            delta = max(delta, min(alpha * snorm, sigma3 * delta))
        if actred > eta0 * prered:
            w, f, g = w_new, f_new, g_new
            gnorm = float(np.max(np.abs(g)))
        res.n_iter = it
        res.trace.append((it, f, gnorm))
        if prered <= 0 and actred <= 0:
            break
        if abs(actred) <= 1e-12 * abs(f) and abs(prered) <= 1e-12 * abs(f):
            break
    else:
        res.converged = gnorm <= tol
    if gnorm <= tol:
        res.converged = True
    res.w, res.f, res.grad_norm = w, f, gnorm
    return res
