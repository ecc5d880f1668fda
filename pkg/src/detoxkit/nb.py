"""Naive Bayes classifiers: multinomial, Bernoulli, Gaussian and complement.

All four fit in closed form from per-class sufficient statistics computed
with sparse products, so no variant ever densifies the feature matrix.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import TrainingError

VAR_SMOOTHING = 1e-9


class NbAlgorithm(enum.Enum):
    MULTINOMIAL = "multinomial"
    BERNOULLI = "bernoulli"
    GAUSSIAN = "gaussian"
    COMPLEMENT = "complement"

    @classmethod
    def parse(cls, value) -> "NbAlgorithm":
        return value if isinstance(value, cls) else cls(str(value).lower())


@dataclass(frozen=True)
class NbModel:
    algorithm: NbAlgorithm
    class_log_prior: np.ndarray
    feature_params: dict = field(repr=False)
    alpha: float
    dimension: int
    n_classes: int


def _as_csr(X) -> sp.csr_matrix:
    X = sp.csr_matrix(X, dtype=np.float64)
    if not np.all(np.isfinite(X.data)):
        raise ValueError("feature matrix contains non-finite values")
    return X


def _one_hot(y: np.ndarray, n_classes: int) -> sp.csr_matrix:
    n = len(y)
    return sp.csr_matrix((np.ones(n), (y, np.arange(n))), shape=(n_classes, n))


def fit_nb(X, y, algorithm: NbAlgorithm | str = NbAlgorithm.MULTINOMIAL,
           alpha: float = 1.0, n_classes: int | None = None) -> NbModel:
    algorithm = NbAlgorithm.parse(algorithm)
    X = _as_csr(X)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != len(y):
        raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} labels")
    if algorithm is not NbAlgorithm.GAUSSIAN and not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    class_count = np.bincount(y, minlength=n_classes).astype(np.float64)
    if len(class_count) > n_classes:
        raise ValueError("label outside [0, n_classes)")
    missing = np.flatnonzero(class_count == 0)
    if len(missing):
        raise TrainingError(f"classes {missing.tolist()} absent from training labels")

    Y = _one_hot(y, n_classes)
    log_prior = np.log(class_count) - np.log(class_count.sum())
    D = X.shape[1]

    if algorithm is NbAlgorithm.MULTINOMIAL:
        fc = np.asarray((Y @ X).todense()) + alpha
        params = {"feature_log_prob": np.log(fc) - np.log(fc.sum(axis=1, keepdims=True))}
    elif algorithm is NbAlgorithm.BERNOULLI:
        Xb = X.copy()
        Xb.data = (Xb.data > 0).astype(np.float64)
        present = np.asarray((Y @ Xb).todense())
        p = (present + alpha) / (class_count[:, None] + 2.0 * alpha)
        params = {"log_p": np.log(p), "log_1mp": np.log1p(-p)}
    elif algorithm is NbAlgorithm.COMPLEMENT:
        fc = np.asarray((Y @ X).todense())
        comp = fc.sum(axis=0, keepdims=True) - fc + alpha
        logged = np.log(comp) - np.log(comp.sum(axis=1, keepdims=True))
        summed = logged.sum(axis=1, keepdims=True)
        # a single feature has log-probability 0 in every class; its weight is defined as 0
        safe = np.where(summed == 0, 1.0, summed)
        params = {"weights": np.where(summed == 0, 0.0, logged / safe)}
    else:
        s1 = np.asarray((Y @ X).todense())
        X2 = X.multiply(X).tocsr()
        s2 = np.asarray((Y @ X2).todense())
        mean = s1 / class_count[:, None]
        var = np.maximum(s2 / class_count[:, None] - mean ** 2, 0.0)
        top = var.max() if var.size else 0.0
        floor = VAR_SMOOTHING * top if top > 0 else VAR_SMOOTHING
        params = {"mean": mean, "var": np.maximum(var, floor), "var_floor": floor}
    return NbModel(algorithm, log_prior, params, float(alpha), D, n_classes)


def joint_log_likelihood(model: NbModel, X) -> np.ndarray:
    """Unnormalized per-class scores, shape (n_samples, n_classes)."""
    X = _as_csr(X)
    if X.shape[1] != model.dimension:
        raise ValueError(f"feature dimension {X.shape[1]} != model dimension {model.dimension}")
    p = model.feature_params
    algo = model.algorithm
    if algo is NbAlgorithm.MULTINOMIAL:
        return np.asarray(X @ p["feature_log_prob"].T) + model.class_log_prior
    if algo is NbAlgorithm.BERNOULLI:
        Xb = X.copy()
        Xb.data = (Xb.data > 0).astype(np.float64)
        # sum_t x log p + (1 - x) log(1 - p)
        delta = p["log_p"] - p["log_1mp"]
        return (np.asarray(Xb @ delta.T) + p["log_1mp"].sum(axis=1)
                + model.class_log_prior)
    if algo is NbAlgorithm.COMPLEMENT:
        return np.asarray(X @ p["weights"].T)
    mean, var = p["mean"], p["var"]
    inv = 1.0 / var
    # -1/2 sum_t [log(2 pi var) + (x - mu)^2 / var], expanded to stay sparse
    quad = (np.asarray(X.multiply(X) @ inv.T)
            - 2.0 * np.asarray(X @ (mean * inv).T)
            + (mean ** 2 * inv).sum(axis=1))
    const = -0.5 * np.log(2.0 * np.pi * var).sum(axis=1)
    return const - 0.5 * quad + model.class_log_prior


def predict_nb(model: NbModel, X) -> tuple[np.ndarray, np.ndarray]:
    """Return (predicted class per row, joint log-likelihood scores).

    Ties go to the lowest class index.
    """
    scores = joint_log_likelihood(model, X)
    return np.argmax(scores, axis=1), scores
