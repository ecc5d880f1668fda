"""Cross-validated grid search, model selection and the final train/predict run."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import features
from .corpus import Dataset, LabelSchema, Task, stratified_folds
from .errors import ConfigurationError, SelectionError
from .features import NGramRange, Vocabulary
from .maxent import MaxentConfig, MaxentModel, SolverKind, fit_maxent, predict_maxent
from .metrics import MetricSet, evaluate, mean_metric_sets
from .nb import NbAlgorithm, NbModel, fit_nb, predict_nb
from .preprocess import PreprocessConfig, preprocess_corpus

ENCODERS = ("tfidf", "bow")
FAMILIES = ("maxent", "nb")
DEFAULT_MODELS = (
    ("maxent", tuple(s.value for s in SolverKind)),
    ("nb", tuple(a.value for a in NbAlgorithm)),
)
DEFAULT_HYPER = {
    "nb": {"alpha": 1.0},
    "maxent": {"C": 1.0, "tol": 1e-4, "max_iter": 100},
}
OFFICIAL_METRIC = {Task.BINARY: "f1", Task.ORDINAL: "cem"}


@dataclass(frozen=True)
class CellConfig:
    """One grid cell: model family + variant, encoder and n-gram range."""

    family: str
    variant: str
    encoder: str
    ngram_range: NGramRange
    params: tuple = ()  # sorted (name, value) hyperparameter pairs

    def __post_init__(self):
        family = self.family.lower()
        if family not in FAMILIES:
            raise ConfigurationError(f"unknown model family {self.family!r}")
        try:
            variant = (SolverKind.parse(self.variant).value if family == "maxent"
                       else NbAlgorithm.parse(self.variant).value)
        except ValueError:
            raise ConfigurationError(f"unknown {family} variant {self.variant!r}") from None
        encoder = self.encoder.lower().replace("-", "")
        if encoder not in ENCODERS:
            raise ConfigurationError(f"unknown encoder {self.encoder!r}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "encoder", encoder)
        object.__setattr__(self, "ngram_range", NGramRange.parse(self.ngram_range))
        object.__setattr__(self, "params", tuple(sorted(dict(self.params).items())))

    @property
    def config_id(self) -> str:
        r = self.ngram_range
        return f"{self.family}:{self.variant}|{self.encoder}|{r.lo}-{r.hi}"

    @classmethod
    def parse(cls, config_id: str, params=()) -> "CellConfig":
        try:
            model, encoder, rng = config_id.split("|")
            family, variant = model.split(":")
        except ValueError:
            raise ConfigurationError(
                f"malformed cell id {config_id!r}; expected family:variant|encoder|lo-hi") from None
        return cls(family, variant, encoder, NGramRange.parse(rng), params)

    def to_dict(self) -> dict:
        return {"config_id": self.config_id, "family": self.family, "variant": self.variant,
                "encoder": self.encoder, "ngram_range": [self.ngram_range.lo, self.ngram_range.hi],
                "params": dict(self.params)}


@dataclass(frozen=True)
class GridSpec:
    task: Task
    encoders: tuple = ENCODERS
    ngram_ranges: tuple = features.NGRAM_PRESETS
    models: tuple = DEFAULT_MODELS
    hyper: dict = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_HYPER.items()})
    k: int = 10
    seed: int = 42
    min_df: int = 1
    aggregation: str = "mean"  # or "pooled"
    binary_average: str = "positive"  # task-1 precision/recall/F1: "positive" or "macro"

    def __post_init__(self):
        object.__setattr__(self, "task", Task.parse(self.task))
        object.__setattr__(self, "ngram_ranges",
                           tuple(NGramRange.parse(r) for r in self.ngram_ranges))
        object.__setattr__(self, "encoders", tuple(self.encoders))
        object.__setattr__(self, "models",
                           tuple((fam, tuple(vs)) for fam, vs in self.models))
        hyper = {k: dict(v) for k, v in DEFAULT_HYPER.items()}
        for fam, overrides in (self.hyper or {}).items():
            hyper.setdefault(fam, {}).update(overrides)
        object.__setattr__(self, "hyper", hyper)
        if self.k < 2:
            raise ConfigurationError("k must be >= 2")
        if self.aggregation not in ("mean", "pooled"):
            raise ConfigurationError(f"aggregation must be 'mean' or 'pooled', got {self.aggregation!r}")
        if self.binary_average not in ("positive", "macro"):
            raise ConfigurationError(
                f"binary_average must be 'positive' or 'macro', got {self.binary_average!r}")
        if not self.cells():
            raise ConfigurationError("grid is empty")

    def cells(self) -> list[CellConfig]:
        out = []
        for family, variants in self.models:
            params = dict(self.hyper.get(family, {}))
            if family == "maxent":
                params.setdefault("seed", self.seed)
            for variant in variants:
                for encoder in self.encoders:
                    for r in self.ngram_ranges:
                        out.append(CellConfig(family, variant, encoder, r, tuple(params.items())))
        return out

    def to_dict(self) -> dict:
        return {"task": self.task.value, "encoders": list(self.encoders),
                "ngram_ranges": [[r.lo, r.hi] for r in self.ngram_ranges],
                "models": {fam: list(vs) for fam, vs in self.models},
                "hyper": self.hyper, "k": self.k, "seed": self.seed,
                "min_df": self.min_df, "aggregation": self.aggregation,
                "binary_average": self.binary_average}


@dataclass
class GridRow:
    cell: CellConfig
    metrics: MetricSet | None
    fold_metrics: list
    wall_time: float
    error: str | None = None
    converged_folds: int | None = None  # maxent only

    @property
    def poisoned(self) -> bool:
        return self.metrics is None


@dataclass
class GridResult:
    spec: GridSpec
    rows: list
    fold_sizes: list = field(default_factory=list)

    def row(self, config_id: str) -> GridRow:
        for r in self.rows:
            if r.cell.config_id == config_id:
                return r
        raise KeyError(config_id)

    def family_rows(self, family: str) -> list:
        return [r for r in self.rows if r.cell.family == family]


@dataclass(frozen=True)
class SelectionReport:
    best_config: CellConfig
    official_metric: str
    official_metric_value: float
    runner_up_margin: float | None
    best_row: GridRow = field(repr=False, compare=False)


def make_model_fitter(cell: CellConfig):
    params = dict(cell.params)
    if cell.family == "nb":
        alpha = params.get("alpha", 1.0)
        return (lambda X, y, k: fit_nb(X, y, cell.variant, alpha, n_classes=k)), predict_nb
    config = MaxentConfig(solver=cell.variant, C=params.get("C", 1.0),
                          tol=params.get("tol", 1e-4), max_iter=int(params.get("max_iter", 100)),
                          seed=int(params.get("seed", 42)))
    return (lambda X, y, k: fit_maxent(X, y, config, n_classes=k)), predict_maxent


def _run_unit(tokens, y, train_idx, test_idx, encoder, ngram_range, cells, min_df, n_classes):
    """Fit every (index, cell) pair sharing one (fold, encoder, n-gram range) feature space."""
    train_docs = [tokens[i] for i in train_idx]
    test_docs = [tokens[i] for i in test_idx]
    out = []
    try:
        vocab = features.build_vocabulary(train_docs, ngram_range, min_df)
        idf = features.fit_idf(vocab) if encoder == "tfidf" else None
        X_train = features.encode(train_docs, vocab, encoder, idf)
        X_test = features.encode(test_docs, vocab, encoder, idf)
    except Exception as exc:  # noqa: BLE001 - recorded per cell
        return [(idx, None, f"{type(exc).__name__}: {exc}", 0.0, None) for idx, _ in cells]
    for idx, cell in cells:
        start = time.perf_counter()
        try:
            fit, predict = make_model_fitter(cell)
            model = fit(X_train, y[train_idx], n_classes)
            pred, _ = predict(model, X_test)
            converged = getattr(model, "converged", None)
            out.append((idx, pred, None, time.perf_counter() - start, converged))
        except Exception as exc:  # noqa: BLE001
            out.append((idx, None, f"{type(exc).__name__}: {exc}",
                        time.perf_counter() - start, None))
    return out


def run_grid(train: Dataset, spec: GridSpec, preprocess_config: PreprocessConfig | None = None,
             n_jobs: int = 1, tokens: Sequence[Sequence[str]] | None = None) -> GridResult:
    """Stratified k-fold cross-validation over every cell of ``spec``.

    Vocabulary and IDF are refit on the training folds of each split; token
    streams are computed once for the whole corpus. A failing cell is
    recorded with its error and does not stop the rest of the grid.
    """
    schema = train.schema(spec.task)
    y = train.labels(spec.task)
    if tokens is None:
        tokens = preprocess_corpus(train.texts, preprocess_config)
    folds = stratified_folds(y, spec.k, spec.seed)
    cells = spec.cells()
    groups: dict = {}
    for idx, cell in enumerate(cells):
        groups.setdefault((cell.encoder, cell.ngram_range), []).append((idx, cell))

    units = []
    for fold in range(spec.k):
        train_idx, test_idx = folds.train_indices(fold), folds.test_indices(fold)
        for (encoder, r), group in groups.items():
            units.append((fold, (tokens, y, train_idx, test_idx, encoder, r, group,
                                 spec.min_df, schema.n_classes)))
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            futures = [(fold, pool.submit(_run_unit, *args)) for fold, args in units]
            outputs = [(fold, f.result()) for fold, f in futures]
    else:
        outputs = [(fold, _run_unit(*args)) for fold, args in units]

    per_cell: list = [{} for _ in cells]
    for fold, results in outputs:
        for idx, pred, error, elapsed, converged in results:
            per_cell[idx][fold] = (pred, error, elapsed, converged)

    rows = []
    for cell, fold_out in zip(cells, per_cell):
        errors = [fold_out[f][1] for f in range(spec.k) if fold_out[f][1] is not None]
        wall = float(sum(fold_out[f][2] for f in range(spec.k)))
        if errors:
            rows.append(GridRow(cell, None, [], wall, error=errors[0]))
            continue
        fold_metrics, pooled_pred = [], np.empty_like(y)
        for f in range(spec.k):
            test_idx = folds.test_indices(f)
            pred = fold_out[f][0]
            pooled_pred[test_idx] = pred
            fold_metrics.append(evaluate(y[test_idx], pred, schema, spec.binary_average))
        if spec.aggregation == "pooled":
            metrics = evaluate(y, pooled_pred, schema, spec.binary_average)
        else:
            metrics = mean_metric_sets(fold_metrics)
        converged = None
        if cell.family == "maxent":
            converged = sum(bool(fold_out[f][3]) for f in range(spec.k))
        rows.append(GridRow(cell, metrics, fold_metrics, wall, converged_folds=converged))
    if all(r.poisoned for r in rows):
        raise SelectionError(f"every grid cell failed; first error: {rows[0].error}")
    rows.sort(key=lambda r: r.cell.config_id)
    sizes = [int(len(folds.test_indices(f))) for f in range(spec.k)]
    return GridResult(spec, rows, sizes)


def select_best(result: GridResult, official: str | None = None) -> SelectionReport:
    """Row maximizing the official metric; ties go to higher accuracy, then the smaller config id."""
    official = official or OFFICIAL_METRIC[result.spec.task]
    valid = [r for r in result.rows if not r.poisoned]
    if not valid:
        raise SelectionError("no usable rows to select from")
    if getattr(valid[0].metrics, official, None) is None:
        raise SelectionError(f"metric {official!r} not available for task {result.spec.task.value}")
    ranked = sorted(valid, key=lambda r: (-getattr(r.metrics, official), -r.metrics.accuracy,
                                          r.cell.config_id))
    best = ranked[0]
    value = getattr(best.metrics, official)
    margin = value - getattr(ranked[1].metrics, official) if len(ranked) > 1 else None
    return SelectionReport(best.cell, official, value, margin, best)


@dataclass
class TrainedPipeline:
    """Everything needed to turn raw comments into predicted labels."""

    task: Task
    schema: LabelSchema
    preprocess: PreprocessConfig
    cell: CellConfig
    vocabulary: Vocabulary
    idf: np.ndarray | None
    model: NbModel | MaxentModel
    fingerprint: dict = field(default_factory=dict)

    def transform(self, texts: Sequence[str]):
        docs = preprocess_corpus(texts, self.preprocess)
        return features.encode(docs, self.vocabulary, self.cell.encoder, self.idf)

    def predict(self, texts: Sequence[str]) -> np.ndarray:
        X = self.transform(texts)
        predict = predict_nb if self.cell.family == "nb" else predict_maxent
        return predict(self.model, X)[0]

    def predict_labels(self, texts: Sequence[str]) -> list[str]:
        return [self.schema.label_name(int(c)) for c in self.predict(texts)]


def fit_pipeline(train: Dataset, cell: CellConfig, task: Task | str,
                 preprocess_config: PreprocessConfig | None = None,
                 min_df: int = 1, seed: int = 42) -> TrainedPipeline:
    task = Task.parse(task)
    if not train.is_labeled(task):
        raise ConfigurationError(f"training data is not labeled for task {task.value}")
    preprocess_config = preprocess_config or PreprocessConfig()
    schema = train.schema(task)
    y = train.labels(task)
    docs = preprocess_corpus(train.texts, preprocess_config)
    vocab = features.build_vocabulary(docs, cell.ngram_range, min_df)
    idf = features.fit_idf(vocab) if cell.encoder == "tfidf" else None
    X = features.encode(docs, vocab, cell.encoder, idf)
    fit, _ = make_model_fitter(cell)
    model = fit(X, y, schema.n_classes)
    from . import __version__
    fingerprint = {"dataset_sha256": train.fingerprint(), "seed": seed,
                   "toolkit_version": __version__, "n_train": len(train)}
    return TrainedPipeline(task, schema, preprocess_config, cell, vocab, idf, model, fingerprint)


def final_run(train: Dataset, test: Dataset, cell: CellConfig, task: Task | str,
              preprocess_config: PreprocessConfig | None = None, min_df: int = 1,
              seed: int = 42) -> tuple[list[tuple[str, str]], TrainedPipeline]:
    """Fit ``cell`` on all of ``train`` and label every ``test`` comment, in input order."""
    task = Task.parse(task)
    if len(test) == 0:
        raise ConfigurationError("test set is empty")
    if train.schema(task) != test.schema(task):
        raise ConfigurationError("train and test label schemas differ")
    pipeline = fit_pipeline(train, cell, task, preprocess_config, min_df, seed)
    labels = pipeline.predict_labels(test.texts)
    return list(zip(test.ids, labels)), pipeline


def write_predictions(predictions: Sequence[tuple[str, str]], path: str | Path) -> None:
    """``Comment_id<TAB>label`` rows, header first."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("Comment_id\tlabel\n")
        for cid, label in predictions:
            fh.write(f"{cid}\t{label}\n")


def read_predictions(path: str | Path) -> list[tuple[str, str]]:
    out = []
    with open(path, encoding="utf-8-sig") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if len(header) != 2:
            raise ConfigurationError(f"{path}: expected 2 tab-separated columns, got {header}")
        for line in fh:
            line = line.rstrip("\n")
            if line:
                cid, label = line.split("\t")
                out.append((cid, label))
    return out


