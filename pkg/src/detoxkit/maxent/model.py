from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from ..errors import TrainingError
from .loss import BinaryLoss, MultinomialLoss, augment, class_probabilities
from .sag import sag
from .solvers import lbfgs, newton_cg, tron


class SolverKind(enum.Enum):
    LIBLINEAR = "liblinear"
    NEWTON = "newton"
    SAG = "sag"
    SAGA = "saga"
    LBFGS = "lbfgs"

    @classmethod
    def parse(cls, value) -> "SolverKind":
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        return cls("newton" if key == "newton-cg" else key)


@dataclass(frozen=True)
class MaxentConfig:
    solver: SolverKind = SolverKind.LBFGS
    C: float = 1.0
    tol: float = 1e-4
    max_iter: int = 100
    seed: int = 42
    lbfgs_memory: int = 10

    def __post_init__(self):
        object.__setattr__(self, "solver", SolverKind.parse(self.solver))
        if not self.C > 0:
            raise ValueError(f"C must be > 0, got {self.C}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.lbfgs_memory < 1:
            raise ValueError("lbfgs_memory must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["solver"] = self.solver.value
        return d


@dataclass(frozen=True)
class MaxentModel:
    weights: np.ndarray  # (n_fitted_classes, D)
    bias: np.ndarray
    classes: np.ndarray  # class index of each weight row
    n_classes: int
    config: MaxentConfig
    multinomial: bool
    converged: bool
    n_iter: int
    final_grad_norm: float
    trace: list = field(default_factory=list, repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return self.weights.shape[1]


def _solve(loss, w0, config: MaxentConfig, X=None, y=None, n_classes=None):
    kind = config.solver
    if kind is SolverKind.LBFGS:
        return lbfgs(loss, w0, config.tol, config.max_iter, config.lbfgs_memory)
    if kind is SolverKind.NEWTON:
        return newton_cg(loss, w0, config.tol, config.max_iter)
    if kind is SolverKind.LIBLINEAR:
        return tron(loss, w0, config.tol, config.max_iter)
    return sag(loss, X, y, n_classes, config.C, w0, config.tol, config.max_iter,
               config.seed, saga=kind is SolverKind.SAGA)


def fit_maxent(X, y, config: MaxentConfig | None = None, n_classes: int | None = None) -> MaxentModel:
    """Fit L2-regularized maximum-entropy weights with the configured solver.

    Classes missing from ``y`` get no weight row and receive probability 0.
    Liblinear mode trains one binary problem per class (one-vs-rest); with
    exactly two classes a single binary problem is solved whose ridge is
    scaled so its optimum coincides with the multinomial one.
    """
    config = config or MaxentConfig()
    X = sp.csr_matrix(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != len(y):
        raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} labels")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    classes = np.unique(y)
    if len(classes) < 2:
        raise TrainingError("maximum-entropy training needs at least two classes in y")
    if classes[-1] >= n_classes:
        raise ValueError("label outside [0, n_classes)")
    Xa = augment(X)
    K, D = len(classes), X.shape[1]
    y_local = np.searchsorted(classes, y)

    if config.solver is not SolverKind.LIBLINEAR:
        loss = MultinomialLoss(Xa, y_local, K, config.C)
        res = _solve(loss, np.zeros(loss.size), config, X, y_local, K)
        theta = res.w.reshape(K, D + 1)
        return MaxentModel(theta[:, :D].copy(), theta[:, D].copy(), classes, n_classes,
                           config, True, res.converged, res.n_iter, res.grad_norm, res.trace)

    if K == 2:
        # W = [-v/2, v/2] maps the binary problem with C' = 2C onto the multinomial one
        loss = BinaryLoss(Xa, np.where(y_local == 1, 1.0, -1.0), 2.0 * config.C)
        res = _solve(loss, np.zeros(loss.size), config)
        half = 0.5 * res.w
        theta = np.vstack([-half, half])
        return MaxentModel(theta[:, :D].copy(), theta[:, D].copy(), classes, n_classes,
                           config, True, res.converged, res.n_iter, res.grad_norm, res.trace)

    rows, converged, n_iter, gnorm, trace = [], True, 0, 0.0, []
    for k in range(K):
        loss = BinaryLoss(Xa, np.where(y_local == k, 1.0, -1.0), config.C)
        res = _solve(loss, np.zeros(loss.size), config)
        rows.append(res.w)
        converged &= res.converged
        n_iter = max(n_iter, res.n_iter)
        gnorm = max(gnorm, res.grad_norm)
        trace.extend((k, it, f, g) for it, f, g in res.trace)
    theta = np.vstack(rows)
    return MaxentModel(theta[:, :D].copy(), theta[:, D].copy(), classes, n_classes, config,
                       False, converged, n_iter, gnorm, trace)


def decision_scores(model: MaxentModel, X) -> np.ndarray:
    X = sp.csr_matrix(X, dtype=np.float64)
    if X.shape[1] != model.dimension:
        raise ValueError(f"feature dimension {X.shape[1]} != model dimension {model.dimension}")
    return np.asarray(X @ model.weights.T) + model.bias


def predict_maxent(model: MaxentModel, X) -> tuple[np.ndarray, np.ndarray]:
    """Return (predicted class per row, probabilities over all ``n_classes``).

    Ties go to the lowest class index.
    """
    probs_fitted = class_probabilities(decision_scores(model, X), model.multinomial)
    probs = np.zeros((probs_fitted.shape[0], model.n_classes))
    probs[:, model.classes] = probs_fitted
    return np.argmax(probs, axis=1), probs


def write_trace_csv(model: MaxentModel, path: str | Path) -> None:
    """Convergence trace as CSV; one-vs-rest traces carry a leading ``class`` column."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if model.trace and len(model.trace[0]) == 4:
            writer.writerow(["class", "iteration", "objective", "grad_norm"])
        else:
            writer.writerow(["iteration", "objective", "grad_norm"])
        for row in model.trace:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
