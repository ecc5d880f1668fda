"""``detoxkit`` command line: crossval, train, predict, score, report.

Exit status is 0 on success, 1 when inputs or configuration are invalid and
2 when a run fails at runtime.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import __version__
from .artifact import load_pipeline, save_pipeline
from .config import RunConfig, load_config
from .corpus import Dataset, Task, load_dataset, write_dataset
from .errors import (ArtifactVersionError, ConfigurationError, IntegrityError, ParseError,
                     SchemaError)
from .features import TFIDF_VARIANT
from .evalharness import (OFFICIAL_METRIC, CellConfig, fit_pipeline, read_predictions, run_grid,
                      select_best, write_predictions)
from .metrics import evaluate
from .reports import (fold_csv, grid_csv, grid_markdown, metadata, score_table, selection_csv,
                      selection_text, write_text)

VALIDATION_ERRORS = (ConfigurationError, SchemaError, ParseError, IntegrityError,
                     ArtifactVersionError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are validation errors
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def load_any(path, fmt="tsv") -> Dataset:
    """Load a labeled or unlabeled file, deciding from its header width."""
    with open(path, encoding="utf-8-sig") as fh:
        header = fh.readline()
    sep = "\t" if fmt == "tsv" else ","
    return load_dataset(path, has_labels=len(header.rstrip("\r\n").split(sep)) > 2, fmt=fmt)


def _decision_log(cfg: RunConfig) -> str:
    spec = cfg.grid
    official = OFFICIAL_METRIC[spec.task]
    lines = [
        f"toolkit_version: {__version__}",
        f"seed: {cfg.seed}",
        f"stratification: {spec.k}-fold; each class shuffled with seed {spec.seed}, "
        "classes concatenated in class order, dealt round-robin",
        "vocabulary and idf: fitted on the training folds of each split only",
        f"tfidf variant: {TFIDF_VARIANT}",
        f"official metric: {official}"
        + (f" ({spec.binary_average} class averaging)" if spec.task is Task.BINARY else ""),
        f"aggregation: {spec.aggregation} over folds",
        "selection tie-break: higher accuracy, then smaller config id",
        "defaults: " + json.dumps(spec.hyper, sort_keys=True),
        "config: " + json.dumps(cfg.to_dict(), sort_keys=True),
    ]
    return "\n".join(lines) + "\n"


def cmd_crossval(args) -> int:
    cfg = load_config(args.config)
    if args.pooled:
        from dataclasses import replace
        cfg = replace(cfg, grid=replace(cfg.grid, aggregation="pooled"))
    cells = cfg.grid.cells()
    if args.dry_run:
        for cell in cells:
            print(cell.config_id)
        print(f"{len(cells)} cells x {cfg.grid.k} folds")
        return 0
    n_jobs = args.n_jobs or cfg.n_jobs
    train = load_dataset(cfg.train, has_labels=True, fmt=cfg.format)
    start = time.perf_counter()
    result = run_grid(train, cfg.grid, cfg.preprocess, n_jobs=n_jobs)
    elapsed = time.perf_counter() - start
    report = select_best(result)
    out = Path(cfg.output_dir)
    meta = {"wall_time_s": round(elapsed, 3), "n_train": len(train)}
    write_text(out / "grid.csv", grid_csv(result, meta))
    write_text(out / "grid.md", grid_markdown(result, meta))
    write_text(out / "folds.csv", fold_csv(result))
    write_text(out / "selection.txt", selection_text(report, result))
    write_text(out / "selection.csv", selection_csv(report))
    write_text(out / "decisions.log", _decision_log(cfg))
    failed = sum(r.poisoned for r in result.rows)
    print(f"{len(result.rows)} cells evaluated in {elapsed:.1f}s ({failed} failed)")
    print(f"best: {report.best_config.config_id} "
          f"{report.official_metric}={report.official_metric_value:.4f}")
    print(f"reports written to {out}")
    return 0


def _selected_cell(cfg: RunConfig, cell_id: str | None) -> CellConfig:
    spec = cfg.grid
    if cell_id is None:
        sel = Path(cfg.output_dir) / "selection.csv"
        if not sel.exists():
            raise ConfigurationError(
                [f"no --cell given and {sel} does not exist; run crossval first"])
        with open(sel, encoding="utf-8") as fh:
            cell_id = next(csv.DictReader(fh))["config_id"]
    probe = CellConfig.parse(cell_id)
    hyper = dict(spec.hyper.get(probe.family, {}))
    if probe.family == "maxent":
        hyper.setdefault("seed", cfg.seed)
    return CellConfig.parse(cell_id, tuple(hyper.items()))


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    cell = _selected_cell(cfg, args.cell)
    train = load_dataset(cfg.train, has_labels=True, fmt=cfg.format)
    pipeline = fit_pipeline(train, cell, cfg.task, cfg.preprocess, cfg.grid.min_df, cfg.seed)
    out = Path(args.output or Path(cfg.output_dir) / "model.npz")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_pipeline(pipeline, out)
    print(f"trained {cell.config_id} on {len(train)} comments -> {out}")
    return 0


def cmd_predict(args) -> int:
    pipeline = load_pipeline(args.model)
    test = load_any(args.test, args.format)
    labels = pipeline.predict_labels(test.texts)
    out = args.output or "predictions.tsv"
    write_predictions(list(zip(test.ids, labels)), out)
    print(f"{len(labels)} predictions ({pipeline.cell.config_id}) -> {out}")
    return 0


def _parse_rows(items) -> list[tuple[str, float]]:
    rows = []
    for item in items or []:
        name, sep, value = item.rpartition("=")
        if not sep or not name:
            raise ConfigurationError([f"--row/--baseline: expected NAME=VALUE, got {item!r}"])
        try:
            rows.append((name.strip(), float(value)))
        except ValueError:
            raise ConfigurationError([f"--row/--baseline: {value!r} is not a number"]) from None
    return rows


def cmd_score(args) -> int:
    task = Task.parse(args.task)
    gold = load_dataset(args.gold, has_labels=True, fmt=args.format)
    schema = gold.schema(task)
    preds = read_predictions(args.predictions)
    pred_of = {}
    for cid, label in preds:
        if cid in pred_of:
            raise IntegrityError(f"duplicate prediction for {cid!r}")
        pred_of[cid] = schema.parse_label(label)
    missing = [cid for cid in gold.ids if cid not in pred_of]
    extra = sorted(set(pred_of) - set(gold.ids))
    if missing or extra:
        raise IntegrityError(f"prediction ids do not match gold ids: {len(missing)} missing "
                             f"(e.g. {missing[:3]}), {len(extra)} unknown (e.g. {extra[:3]})")
    y_true = gold.labels(task)
    y_pred = [pred_of[cid] for cid in gold.ids]
    metrics = evaluate(y_true, y_pred, schema, args.binary_average)
    print(metrics.to_text())
    print()
    print(metrics.to_csv_row(), end="")
    if args.csv:
        meta = metadata(0, {"task": task.value, "predictions": str(args.predictions),
                            "gold": str(args.gold), "binary_average": args.binary_average})
        write_text(args.csv, "# " + json.dumps(meta, sort_keys=True) + "\n" + metrics.to_csv_row())
    official = OFFICIAL_METRIC[task]
    rows = ([(args.name, getattr(metrics, official))] if args.name else []) + _parse_rows(
        args.baseline)
    if rows:
        print()
        print(score_table(rows, official, args.table_format), end="")
    return 0


def cmd_report(args) -> int:
    rows = _parse_rows(args.row)
    if args.scores:
        with open(args.scores, encoding="utf-8") as fh:
            for rec in csv.reader(ln for ln in fh if not ln.startswith("#")):
                if rec and rec[0].lower() != "model":
                    rows += _parse_rows([f"{rec[0]}={rec[1]}"])
    if not rows:
        raise ConfigurationError(["report: give --row NAME=VALUE entries or --scores FILE"])
    metric = args.metric or OFFICIAL_METRIC[Task.parse(args.task)]
    text = score_table(rows, metric, args.format, bold_best=not args.no_bold)
    if args.output:
        write_text(args.output, text)
    print(text, end="")
    return 0


def cmd_synth(args) -> int:
    from .synthetic import synthetic_corpus, train_test_split
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    train, test = train_test_split(synthetic_corpus(args.n, args.seed), args.test_fraction,
                                   args.seed)
    write_dataset(train, out / "train.tsv")
    write_dataset(test, out / "test_gold.tsv")
    write_dataset(Dataset(tuple(type(i)(i.comment_id, i.text) for i in test.instances)),
                  out / "test.tsv")
    print(f"{len(train)} train / {len(test)} test comments -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="detoxkit", description="Toxicity classification with n-gram features, "
                "naive Bayes and maximum-entropy models.")
    p.add_argument("--version", action="version", version=f"detoxkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("crossval", help="run the cross-validated grid and select the best cell")
    s.add_argument("config", help="YAML run configuration")
    s.add_argument("--dry-run", action="store_true", help="list the planned cells and exit")
    s.add_argument("--pooled", action="store_true",
                   help="score pooled out-of-fold predictions instead of averaging folds")
    s.add_argument("--n-jobs", type=int, default=None)
    s.set_defaults(func=cmd_crossval)

    s = sub.add_parser("train", help="fit one cell on the full training set")
    s.add_argument("config")
    s.add_argument("--cell", help="config id, e.g. 'maxent:lbfgs|bow|1-1' "
                   "(default: the selection written by crossval)")
    s.add_argument("-o", "--output", help="artifact path (default: <output_dir>/model.npz)")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", help="label comments with a trained artifact")
    s.add_argument("model")
    s.add_argument("test")
    s.add_argument("-o", "--output")
    s.add_argument("--format", choices=("tsv", "csv"), default="tsv")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("score", help="evaluate a predictions file against gold labels")
    s.add_argument("predictions")
    s.add_argument("gold")
    s.add_argument("--task", required=True)
    s.add_argument("--format", choices=("tsv", "csv"), default="tsv")
    s.add_argument("--binary-average", choices=("positive", "macro"), default="positive")
    s.add_argument("--csv", help="also write the metric row to this file")
    s.add_argument("--name", help="model name for the comparison table")
    s.add_argument("--baseline", action="append", metavar="NAME=VALUE",
                   help="extra row for the comparison table (repeatable)")
    s.add_argument("--table-format", choices=("markdown", "latex"), default="markdown")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("report", help="render a Model/score comparison table")
    s.add_argument("--row", action="append", metavar="NAME=VALUE")
    s.add_argument("--scores", help="CSV with model,value rows")
    s.add_argument("--task", default="task1")
    s.add_argument("--metric", help="column metric (default: the task's official metric)")
    s.add_argument("--format", choices=("markdown", "latex"), default="markdown")
    s.add_argument("--no-bold", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("synth", help="write a synthetic labeled corpus")
    s.add_argument("output_dir")
    s.add_argument("--n", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--test-fraction", type=float, default=0.2)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        errors = getattr(exc, "errors", None) or [str(exc)]
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
