"""Declarative run configuration (YAML).

Example::

    task: task1
    train: data/train.tsv
    test: data/test.tsv
    output_dir: runs/task1
    seed: 42
    n_jobs: 4
    preprocess:
      stem: true
      stopwords: default        # or a path, or a list of words
    grid:
      encoders: [tfidf, bow]
      ngram_ranges: [[1, 1], [1, 2], [1, 3]]
      models:
        maxent: [liblinear, newton, sag, saga, lbfgs]
        nb: [multinomial, bernoulli, gaussian, complement]
      hyper:
        maxent: {C: 1.0, tol: 1.0e-4, max_iter: 100}
        nb: {alpha: 1.0}
      k: 10
      min_df: 1
      aggregation: mean         # or pooled
      binary_average: positive  # or macro

Only ``task`` and ``train`` are required. The environment variables
``DETOXKIT_TRAIN``, ``DETOXKIT_TEST``, ``DETOXKIT_OUTPUT_DIR`` and
``DETOXKIT_N_JOBS`` override the matching keys.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .corpus import Task
from .errors import ConfigurationError
from .features import NGramRange
from .evalharness import DEFAULT_HYPER, ENCODERS, GridSpec
from .maxent import SolverKind
from .nb import NbAlgorithm
from .preprocess import PreprocessConfig, read_stopwords

TOP_KEYS = {"task", "train", "test", "format", "output_dir", "seed", "n_jobs", "preprocess", "grid"}
PREPROCESS_KEYS = {"remove_tickers", "remove_retweet_markers", "remove_hashmark",
                   "drop_hashtag_words", "remove_urls", "number_tag", "lowercase", "stopwords",
                   "stem"}
GRID_KEYS = {"encoders", "ngram_ranges", "models", "hyper", "k", "min_df", "aggregation",
             "binary_average"}
HYPER_KEYS = {"nb": {"alpha"}, "maxent": {"C", "tol", "max_iter"}}
ENV_OVERRIDES = {"DETOXKIT_TRAIN": "train", "DETOXKIT_TEST": "test",
                 "DETOXKIT_OUTPUT_DIR": "output_dir", "DETOXKIT_N_JOBS": "n_jobs"}


@dataclass(frozen=True)
class RunConfig:
    task: Task
    train: Path
    grid: GridSpec
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    test: Path | None = None
    format: str = "tsv"
    output_dir: Path = Path("runs")
    seed: int = 42
    n_jobs: int = 1

    def to_dict(self) -> dict:
        pre = self.preprocess.to_dict()
        pre["stopwords"] = f"<{len(self.preprocess.stopwords)} words>"
        return {"task": self.task.value, "train": str(self.train),
                "test": None if self.test is None else str(self.test), "format": self.format,
                "output_dir": str(self.output_dir), "seed": self.seed, "n_jobs": self.n_jobs,
                "preprocess": pre, "grid": self.grid.to_dict()}


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_keys(d, allowed, where, errors):
    if not isinstance(d, dict):
        errors.append(f"{where}: expected a mapping, got {type(d).__name__}")
        return False
    for key in sorted(set(d) - allowed, key=str):
        errors.append(f"{where}.{key}: unknown key" if where else f"{key}: unknown key")
    return True


def _validate_preprocess(d, base_dir, errors):
    if d is None:
        return PreprocessConfig()
    if not _check_keys(d, PREPROCESS_KEYS, "preprocess", errors):
        return None
    kwargs = {}
    for key in PREPROCESS_KEYS - {"number_tag", "stopwords"}:
        if key in d:
            if not isinstance(d[key], bool):
                errors.append(f"preprocess.{key}: expected true/false, got {d[key]!r}")
            else:
                kwargs[key] = d[key]
    if "number_tag" in d:
        tag = d["number_tag"]
        if not isinstance(tag, str) or not tag or any(c.isspace() or c.isdigit() for c in tag):
            errors.append(f"preprocess.number_tag: must be a nonempty string without "
                          f"whitespace or digits, got {tag!r}")
        else:
            kwargs["number_tag"] = tag
    sw = d.get("stopwords", "default")
    if isinstance(sw, list):
        if not all(isinstance(w, str) for w in sw):
            errors.append("preprocess.stopwords: list entries must be strings")
        else:
            kwargs["stopwords"] = frozenset(sw)
    elif sw in (None, "none"):
        kwargs["stopwords"] = frozenset()
    elif isinstance(sw, str) and sw != "default":
        path = (base_dir / sw) if not Path(sw).is_absolute() else Path(sw)
        try:
            kwargs["stopwords"] = read_stopwords(path)
        except OSError as exc:
            errors.append(f"preprocess.stopwords: cannot read {path}: {exc.strerror}")
    elif sw != "default":
        errors.append(f"preprocess.stopwords: expected 'default', 'none', a path or a list, got {sw!r}")
    try:
        return PreprocessConfig(**kwargs)
    except ValueError as exc:
        errors.append(f"preprocess: {exc}")
        return None


def _validate_grid(d, task, seed, errors):
    d = {} if d is None else d
    if not _check_keys(d, GRID_KEYS, "grid", errors):
        return None
    kwargs = {"task": task, "seed": seed}
    encoders = d.get("encoders", list(ENCODERS))
    if not isinstance(encoders, list) or not encoders:
        errors.append("grid.encoders: expected a nonempty list")
    else:
        norm = [str(e).lower().replace("-", "") for e in encoders]
        bad = [e for e, n in zip(encoders, norm) if n not in ENCODERS]
        if bad:
            errors.append(f"grid.encoders: unknown encoder(s) {bad}; choose from tfidf, bow")
        kwargs["encoders"] = tuple(norm)
    ranges = d.get("ngram_ranges", [[1, 1], [1, 2], [1, 3]])
    if not isinstance(ranges, list) or not ranges:
        errors.append("grid.ngram_ranges: expected a nonempty list of [lo, hi] pairs")
    else:
        parsed = []
        for i, r in enumerate(ranges):
            try:
                parsed.append(NGramRange.parse(r))
            except (ValueError, TypeError) as exc:
                errors.append(f"grid.ngram_ranges[{i}]: invalid n-gram range {r!r} ({exc})")
        kwargs["ngram_ranges"] = tuple(parsed)
    models = d.get("models")
    if models is not None:
        if not isinstance(models, dict) or not models:
            errors.append("grid.models: expected a mapping of family to variant list")
        else:
            out = []
            for fam, variants in models.items():
                if fam not in ("maxent", "nb"):
                    errors.append(f"grid.models.{fam}: unknown family; choose maxent or nb")
                    continue
                if not isinstance(variants, list) or not variants:
                    errors.append(f"grid.models.{fam}: expected a nonempty list")
                    continue
                parser = SolverKind.parse if fam == "maxent" else NbAlgorithm.parse
                for v in variants:
                    try:
                        parser(v)
                    except ValueError:
                        errors.append(f"grid.models.{fam}: unknown variant {v!r}")
                out.append((fam, tuple(str(v).lower() for v in variants)))
            kwargs["models"] = tuple(out)
    hyper = d.get("hyper")
    if hyper is not None:
        if _check_keys(hyper, set(HYPER_KEYS), "grid.hyper", errors):
            for fam, vals in hyper.items():
                if fam not in HYPER_KEYS or not _check_keys(vals, HYPER_KEYS[fam],
                                                             f"grid.hyper.{fam}", errors):
                    continue
                for key, val in vals.items():
                    if key not in HYPER_KEYS[fam]:
                        continue
                    if key == "max_iter":
                        if not _is_int(val) or val < 1:
                            errors.append(f"grid.hyper.{fam}.max_iter: expected an integer >= 1")
                    elif not _is_num(val) or not val > 0:
                        errors.append(f"grid.hyper.{fam}.{key}: expected a number > 0, got {val!r}")
            kwargs["hyper"] = {f: dict(v) for f, v in hyper.items() if f in DEFAULT_HYPER
                               and isinstance(v, dict)}
    for key, lo in (("k", 2), ("min_df", 1)):
        if key in d:
            if not _is_int(d[key]) or d[key] < lo:
                errors.append(f"grid.{key}: expected an integer >= {lo}, got {d[key]!r}")
            else:
                kwargs[key] = d[key]
    for key, options in (("aggregation", ("mean", "pooled")),
                         ("binary_average", ("positive", "macro"))):
        if key in d:
            if d[key] not in options:
                errors.append(f"grid.{key}: expected one of {list(options)}, got {d[key]!r}")
            else:
                kwargs[key] = d[key]
    return kwargs


def validate_config(raw: dict, base_dir: Path | str = ".", env: dict | None = None) -> RunConfig:
    """Build a :class:`RunConfig`, reporting every problem in one ConfigurationError."""
    env = os.environ if env is None else env
    base_dir = Path(base_dir)
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigurationError(["config: top level must be a mapping"])
    raw = dict(raw)
    for var, key in ENV_OVERRIDES.items():
        if env.get(var):
            raw[key] = env[var]
    _check_keys(raw, TOP_KEYS, "", errors)

    task = None
    if "task" not in raw:
        errors.append("task: required (task1 or task2)")
    else:
        try:
            task = Task.parse(raw["task"])
        except ValueError:
            errors.append(f"task: unknown task {raw['task']!r}; use task1 or task2")

    def path_of(key, required):
        if key not in raw or raw[key] is None:
            if required:
                errors.append(f"{key}: required")
            return None
        p = Path(str(raw[key]))
        return p if p.is_absolute() else base_dir / p

    train = path_of("train", True)
    test = path_of("test", False)
    output_dir = path_of("output_dir", False) or base_dir / "runs"

    seed = raw.get("seed", 42)
    if not _is_int(seed) or seed < 0:
        errors.append(f"seed: expected a nonnegative integer, got {seed!r}")
        seed = 42
    n_jobs = raw.get("n_jobs", 1)
    if isinstance(n_jobs, str) and n_jobs.strip().isdigit():
        n_jobs = int(n_jobs)
    if not _is_int(n_jobs) or n_jobs < 1:
        errors.append(f"n_jobs: expected an integer >= 1, got {n_jobs!r}")
    fmt = raw.get("format", "tsv")
    if fmt not in ("tsv", "csv"):
        errors.append(f"format: expected tsv or csv, got {fmt!r}")

    preprocess = _validate_preprocess(raw.get("preprocess"), base_dir, errors)
    grid_kwargs = _validate_grid(raw.get("grid"), task or Task.BINARY, seed, errors)
    if errors:
        raise ConfigurationError(errors)
    try:
        grid = GridSpec(**grid_kwargs)
    except (ConfigurationError, ValueError) as exc:
        raise ConfigurationError([f"grid: {exc}"]) from None
    return RunConfig(task, train, grid, preprocess, test, fmt, output_dir, seed, n_jobs)


def load_config(path: str | Path, env: dict | None = None) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigurationError([f"{path}: not valid YAML: {exc}"]) from None
    return validate_config(raw or {}, path.parent, env)
