"""Classification metrics for both tasks, including the ordinal CEM score."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from .corpus import LabelSchema, Task
from .errors import UndefinedProximityError


def confusion_matrix(gold: Sequence[int], pred: Sequence[int], k: int) -> np.ndarray:
    """k x k counts; rows are gold classes, columns predicted classes."""
    gold = np.asarray(gold, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if len(gold) != len(pred):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(pred)} predicted")
    if len(gold) == 0:
        raise ValueError("cannot evaluate zero items")
    for name, arr in (("gold", gold), ("pred", pred)):
        if arr.min() < 0 or arr.max() >= k:
            raise ValueError(f"{name} contains a class outside [0, {k})")
    cm = np.zeros((k, k), dtype=np.int64)
    np.add.at(cm, (gold, pred), 1)
    return cm


def _div(num: float, den: float) -> tuple[float, bool]:
    """num/den with 0/0 := 0; the flag reports whether the convention fired."""
    if den == 0:
        return 0.0, True
    return num / den, False


def _class_prf(cm: np.ndarray, c: int) -> tuple[float, float, float, bool]:
    tp = cm[c, c]
    fp = cm[:, c].sum() - tp
    fn = cm[c, :].sum() - tp
    p, dp = _div(tp, tp + fp)
    r, dr = _div(tp, tp + fn)
    f, df = _div(2 * p * r, p + r)
    return p, r, f, dp or dr or df


def binary_prf(cm: np.ndarray, positive: int = 1) -> tuple[float, float, float]:
    """(precision, recall, F1) of the positive class."""
    if cm.shape != (2, 2):
        raise ValueError("binary_prf needs a 2x2 confusion matrix")
    p, r, f, _ = _class_prf(cm, positive)
    return p, r, f


def accuracy(cm: np.ndarray) -> float:
    return float(np.trace(cm) / cm.sum())


def per_class_prf(cm: np.ndarray) -> np.ndarray:
    """Array of shape (k, 3) with one-vs-rest precision, recall, F1 per class."""
    return np.array([_class_prf(cm, c)[:3] for c in range(cm.shape[0])])


def f1_macro(cm: np.ndarray) -> float:
    return float(per_class_prf(cm)[:, 2].mean())


def f1_weighted(cm: np.ndarray) -> float:
    support = cm.sum(axis=1)
    return float((per_class_prf(cm)[:, 2] * support).sum() / support.sum())


def precision_macro(cm: np.ndarray) -> float:
    return float(per_class_prf(cm)[:, 0].mean())


def recall_macro(cm: np.ndarray) -> float:
    return float(per_class_prf(cm)[:, 1].mean())


def gold_distribution(gold: Sequence[int], k: int) -> np.ndarray:
    counts = np.bincount(np.asarray(gold, dtype=np.int64), minlength=k)
    if counts.sum() == 0:
        raise ValueError("empty gold distribution")
    return counts


def proximity(a: int, b: int, dist: Sequence[int]) -> float:
    """Informational closeness of class ``a`` to class ``b`` under ``dist``.

    ``-log2((n(a)/2 + sum of n(c) for c after a up to and including b) / N)``,
    walking the ordinal scale from ``a`` towards ``b``.
    """
    dist = np.asarray(dist, dtype=np.float64)
    total = dist.sum()
    if a == b:
        mass = dist[a] / 2.0
    elif a < b:
        mass = dist[a] / 2.0 + dist[a + 1:b + 1].sum()
    else:
        mass = dist[a] / 2.0 + dist[b:a].sum()
    if mass <= 0:
        raise UndefinedProximityError(
            f"proximity({a}, {b}) undefined: zero mass (class counts {dist.tolist()})")
    return float(-np.log2(mass / total))


def proximity_table(dist: Sequence[int]) -> np.ndarray:
    """prox[a, b] for every pair; NaN where undefined."""
    k = len(dist)
    table = np.full((k, k), np.nan)
    for a in range(k):
        for b in range(k):
            try:
                table[a, b] = proximity(a, b, dist)
            except UndefinedProximityError:
                pass
    return table


def cem(gold: Sequence[int], pred: Sequence[int], dist: Sequence[int] | None = None,
        k: int | None = None) -> float:
    """Closeness Evaluation Metric: sum prox(pred, gold) / sum prox(gold, gold).

    ``dist`` defaults to the class counts of ``gold``.
    """
    gold = np.asarray(gold, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if len(gold) != len(pred):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(pred)} predicted")
    if len(gold) == 0:
        raise ValueError("cannot evaluate zero items")
    if dist is None:
        k = k or int(max(gold.max(), pred.max())) + 1
        dist = gold_distribution(gold, k)
    table = proximity_table(dist)
    num = table[pred, gold]
    den = table[gold, gold]
    if np.isnan(num).any() or np.isnan(den).any():
        bad = np.flatnonzero(np.isnan(num) | np.isnan(den))[0]
        proximity(int(pred[bad]), int(gold[bad]), dist)  # raises with details
    return float(num.sum() / den.sum())


@dataclass(frozen=True)
class MetricSet:
    accuracy: float
    precision: float
    recall: float
    f1: float | None = None
    f1_macro: float | None = None
    f1_weighted: float | None = None
    cem: float | None = None
    degenerate: bool = False  # a 0/0 convention was used somewhere

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if getattr(self, f.name) is not None}

    def to_text(self) -> str:
        return "\n".join(f"{k}: {v:.4f}" if isinstance(v, float) else f"{k}: {v}"
                         for k, v in self.as_dict().items())

    def to_csv_row(self, header: bool = True) -> str:
        d = self.as_dict()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(d.keys())
        writer.writerow(repr(v) if isinstance(v, float) else v for v in d.values())
        return buf.getvalue()


def evaluate(gold: Sequence[int], pred: Sequence[int], schema: LabelSchema,
             binary_average: str = "positive") -> MetricSet:
    """Score predictions for the schema's task.

    Binary: accuracy plus precision/recall/F1 of the positive class (or
    macro averages with ``binary_average="macro"``). Ordinal: accuracy,
    macro precision/recall, macro and weighted F1, and CEM against the gold
    class distribution.
    """
    k = schema.n_classes
    cm = confusion_matrix(gold, pred, k)
    prf = np.array([_class_prf(cm, c) for c in range(k)], dtype=object)
    degenerate = bool(any(prf[:, 3]))
    acc = accuracy(cm)
    if schema.task is Task.BINARY:
        if binary_average == "macro":
            p, r, f = precision_macro(cm), recall_macro(cm), f1_macro(cm)
        else:
            p, r, f, degenerate = _class_prf(cm, schema.positive_class)
        return MetricSet(acc, float(p), float(r), f1=float(f), degenerate=bool(degenerate))
    return MetricSet(acc, precision_macro(cm), recall_macro(cm), f1_macro=f1_macro(cm),
                     f1_weighted=f1_weighted(cm), cem=cem(gold, pred, gold_distribution(gold, k)),
                     degenerate=degenerate)


def mean_metric_sets(sets: Sequence[MetricSet]) -> MetricSet:
    """Field-wise arithmetic mean (degenerate if any input was)."""
    if not sets:
        raise ValueError("no metric sets to average")
    out = {}
    for f in fields(MetricSet):
        vals = [getattr(m, f.name) for m in sets]
        if f.name == "degenerate":
            out[f.name] = any(vals)
        elif vals[0] is None:
            out[f.name] = None
        else:
            out[f.name] = float(np.mean(vals))
    return MetricSet(**out)
