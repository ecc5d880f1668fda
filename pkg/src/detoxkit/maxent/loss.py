"""L2-regularized logistic losses over an intercept-augmented design matrix.

Parameters are stored as ``theta`` of shape (K, D + 1): the last column is
the per-class intercept, which is excluded from the ridge term.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.special import expit, log_expit, logsumexp, softmax

from ..errors import NumericError


def augment(X) -> sp.csr_matrix:
    X = sp.csr_matrix(X, dtype=np.float64)
    if not np.all(np.isfinite(X.data)):
        raise NumericError("feature matrix contains non-finite values")
    ones = sp.csr_matrix(np.ones((X.shape[0], 1)))
    return sp.hstack([X, ones], format="csr")


def ridge_mask(shape) -> np.ndarray:
    mask = np.ones(shape)
    mask[..., -1] = 0.0
    return mask


class MultinomialLoss:
    """J = sum_i -log softmax(theta x_i)[y_i] + ||W||^2 / (2C)."""

    def __init__(self, Xa: sp.csr_matrix, y: np.ndarray, n_classes: int, C: float):
        self.Xa = Xa
        self.y = np.asarray(y, dtype=np.int64)
        self.K = n_classes
        self.C = float(C)
        self.shape = (n_classes, Xa.shape[1])
        self.Y = np.zeros((Xa.shape[0], n_classes))
        self.Y[np.arange(len(self.y)), self.y] = 1.0
        self.mask = ridge_mask(self.shape)
        self._P = None
        self._P_key = None

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]

    def _scores(self, theta):
        return np.asarray(self.Xa @ theta.T)

    def value(self, w: np.ndarray) -> float:
        theta = w.reshape(self.shape)
        S = self._scores(theta)
        data = float(np.sum(logsumexp(S, axis=1) - S[np.arange(len(self.y)), self.y]))
        W = theta * self.mask
        return data + float(np.sum(W * W)) / (2.0 * self.C)

    def value_grad(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        theta = w.reshape(self.shape)
        S = self._scores(theta)
        lse = logsumexp(S, axis=1)
        data = float(np.sum(lse - S[np.arange(len(self.y)), self.y]))
        P = np.exp(S - lse[:, None])
        self._P, self._P_key = P, w.tobytes()
        W = theta * self.mask
        f = data + float(np.sum(W * W)) / (2.0 * self.C)
        G = np.asarray(self.Xa.T @ (P - self.Y)).T + W / self.C
        return f, G.ravel()

    def hessp(self, w: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self._P_key != w.tobytes():
            self.value_grad(w)
        P = self._P
        V = v.reshape(self.shape)
        R = self._scores(V)
        PR = P * R
        HR = PR - P * PR.sum(axis=1, keepdims=True)
        Hv = np.asarray(self.Xa.T @ HR).T + V * self.mask / self.C
        return Hv.ravel()


class BinaryLoss:
    """J = sum_i log(1 + exp(-t_i w.x_i)) + ||w||^2 / (2C), with t_i in {-1, +1}."""

    def __init__(self, Xa: sp.csr_matrix, t: np.ndarray, C: float):
        self.Xa = Xa
        self.t = np.asarray(t, dtype=np.float64)
        self.C = float(C)
        self.shape = (Xa.shape[1],)
        self.mask = ridge_mask(self.shape)
        self._D = None
        self._D_key = None

    @property
    def size(self) -> int:
        return self.shape[0]

    def value(self, w: np.ndarray) -> float:
        z = self.t * (self.Xa @ w)
        wm = w * self.mask
        return float(-np.sum(log_expit(z))) + float(wm @ wm) / (2.0 * self.C)

    def value_grad(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        z = self.t * (self.Xa @ w)
        sig = expit(z)
        self._D, self._D_key = sig * (1.0 - sig), w.tobytes()
        wm = w * self.mask
        f = float(-np.sum(log_expit(z))) + float(wm @ wm) / (2.0 * self.C)
        g = self.Xa.T @ ((sig - 1.0) * self.t) + wm / self.C
        return f, np.asarray(g).ravel()

    def hessp(self, w: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self._D_key != w.tobytes():
            self.value_grad(w)
        return np.asarray(self.Xa.T @ (self._D * (self.Xa @ v))).ravel() + v * self.mask / self.C


def objective(weights, bias, X, y, C: float) -> float:
    """Regularized multinomial negative log-likelihood (intercept not penalized)."""
    weights = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    theta = np.hstack([weights, np.asarray(bias, dtype=np.float64).reshape(-1, 1)])
    loss = MultinomialLoss(augment(X), y, theta.shape[0], C)
    return loss.value(theta.ravel())


def gradient(weights, bias, X, y, C: float) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of :func:`objective` as (d/dweights, d/dbias)."""
    weights = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    theta = np.hstack([weights, np.asarray(bias, dtype=np.float64).reshape(-1, 1)])
    loss = MultinomialLoss(augment(X), y, theta.shape[0], C)
    _, g = loss.value_grad(theta.ravel())
    G = g.reshape(theta.shape)
    return G[:, :-1], G[:, -1]


def class_probabilities(scores: np.ndarray, multinomial: bool) -> np.ndarray:
    if multinomial:
        return softmax(scores, axis=1)
    # sigmoid scores normalized to sum to one, computed in log space
    return softmax(log_expit(scores), axis=1)
