"""Rendering of grid results, selection reports and score tables.

Every file written here carries a metadata block (toolkit version, seed and
the effective configuration) so outputs can be traced back to the run.
"""

from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path
from typing import Sequence

from .corpus import Task
from .evalharness import GridResult, SelectionReport

SOLVER_NAMES = {"liblinear": "Liblinear", "newton": "Newton", "sag": "Sag", "saga": "Saga",
                "lbfgs": "Lbfgs"}
NB_NAMES = {"multinomial": "Multinomial", "bernoulli": "Bernoulli", "gaussian": "Gaussian",
            "complement": "Complement"}
ENCODER_NAMES = {"tfidf": "TF-IDF", "bow": "BOW"}
FAMILY_HEADER = {"maxent": "Solver", "nb": "NB Algorithm"}

# (MetricSet field, column title) in table order
METRIC_COLUMNS = {
    Task.BINARY: (("accuracy", "Accuracy"), ("f1", "F1-score"), ("recall", "Recall"),
                  ("precision", "Precision")),
    Task.ORDINAL: (("accuracy", "Accuracy"), ("f1_macro", "F1-macro"),
                   ("f1_weighted", "F1-weighted"), ("recall", "Recall"),
                   ("precision", "Precision"), ("cem", "CEM")),
}
SCORE_TITLES = {"f1": "F1-score", "cem": "CEM", "accuracy": "Accuracy"}


def metadata(seed: int, config: dict, **extra) -> dict:
    from . import __version__
    meta = {"toolkit_version": __version__, "seed": seed, "config": config}
    meta.update(extra)
    return meta


def _grid_metadata(result: GridResult, extra: dict | None = None) -> dict:
    return metadata(result.spec.seed, result.spec.to_dict(), aggregation=result.spec.aggregation,
                    **(extra or {}))


def _display_order(result: GridResult, family: str) -> list:
    """Rows of one family in table order: variant, then encoder, then n-gram range."""
    spec = result.spec
    variants = next((vs for fam, vs in spec.models if fam == family), ())
    names = SOLVER_NAMES if family == "maxent" else NB_NAMES
    variant_rank = {}
    for v in variants:
        key = v.lower().replace("newton-cg", "newton")
        variant_rank.setdefault(key, len(variant_rank))
    enc_rank = {e: i for i, e in enumerate(spec.encoders)}
    rng_rank = {r: i for i, r in enumerate(spec.ngram_ranges)}
    rows = result.family_rows(family)
    rows.sort(key=lambda r: (variant_rank.get(r.cell.variant, len(names)), enc_rank[r.cell.encoder],
                             rng_rank[r.cell.ngram_range], r.cell.config_id))
    return rows


def grid_table(result: GridResult, family: str) -> tuple[list[str], list[list[str]]]:
    """Header and formatted rows of one family's cross-validation table."""
    cols = METRIC_COLUMNS[result.spec.task]
    names = SOLVER_NAMES if family == "maxent" else NB_NAMES
    header = [FAMILY_HEADER[family], "Encoder", "Vocabulary"] + [t for _, t in cols]
    body = []
    for row in _display_order(result, family):
        c = row.cell
        cells = [names[c.variant], ENCODER_NAMES[c.encoder], f"{c.ngram_range}-grams"]
        if row.poisoned:
            cells += ["n/a"] * len(cols)
        else:
            cells += [f"{getattr(row.metrics, f):.4f}" for f, _ in cols]
        body.append(cells)
    return header, body


def _md_cell(text) -> str:
    return str(text).replace("|", "\\|")


def markdown_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """GitHub-style table; literal pipes in cells are escaped."""
    lines = ["| " + " | ".join(map(_md_cell, header)) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(map(_md_cell, r)) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _meta_comment(meta: dict) -> str:
    return "<!-- " + json.dumps(meta, sort_keys=True, default=str) + " -->\n"


def grid_markdown(result: GridResult, extra_meta: dict | None = None) -> str:
    parts = [_meta_comment(_grid_metadata(result, extra_meta))]
    task_label = "Task 1" if result.spec.task is Task.BINARY else "Task 2"
    for family, title in (("maxent", "ME"), ("nb", "NB")):
        if not result.family_rows(family):
            continue
        header, body = grid_table(result, family)
        parts.append(f"\n### Cross-validation {title} models for {task_label}\n\n")
        parts.append(markdown_table(header, body))
    failed = [r for r in result.rows if r.poisoned]
    if failed:
        parts.append("\nFailed cells:\n\n")
        parts += [f"- `{r.cell.config_id}`: {r.error}\n" for r in failed]
    return "".join(parts)


def grid_csv(result: GridResult, extra_meta: dict | None = None) -> str:
    """One machine-readable row per cell with full-precision metrics.

    Leading ``#`` lines hold the run metadata as JSON.
    """
    buf = io.StringIO()
    buf.write("# " + json.dumps(_grid_metadata(result, extra_meta), sort_keys=True, default=str)
              + "\n")
    cols = [f for f, _ in METRIC_COLUMNS[result.spec.task]]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["config_id", "family", "variant", "encoder", "ngram_range", *cols,
                     "degenerate", "wall_time_s", "converged_folds", "error"])
    for fam in ("maxent", "nb"):
        for row in _display_order(result, fam):
            c = row.cell
            vals = ([""] * len(cols) if row.poisoned
                    else [repr(float(getattr(row.metrics, f))) for f in cols])
            writer.writerow([c.config_id, c.family, c.variant, c.encoder, str(c.ngram_range), *vals,
                             "" if row.poisoned else int(row.metrics.degenerate),
                             f"{row.wall_time:.3f}",
                             "" if row.converged_folds is None else row.converged_folds,
                             row.error or ""])
    return buf.getvalue()


def fold_csv(result: GridResult) -> str:
    """Per-fold metrics of every usable cell."""
    cols = [f for f, _ in METRIC_COLUMNS[result.spec.task]]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["config_id", "fold", *cols])
    for row in result.rows:
        for i, m in enumerate(row.fold_metrics):
            writer.writerow([row.cell.config_id, i, *(repr(float(getattr(m, f))) for f in cols)])
    return buf.getvalue()


def selection_text(report: SelectionReport, result: GridResult) -> str:
    meta = _grid_metadata(result)
    margin = "n/a" if report.runner_up_margin is None else f"{report.runner_up_margin:.6f}"
    lines = [
        f"best_config: {report.best_config.config_id}",
        f"official_metric: {report.official_metric}",
        f"official_metric_value: {report.official_metric_value:.6f}",
        f"runner_up_margin: {margin}",
        f"aggregation: {result.spec.aggregation}",
        "tie_break: higher accuracy, then lexicographically smaller config id",
        f"toolkit_version: {meta['toolkit_version']}",
        f"seed: {meta['seed']}",
        "config: " + json.dumps(meta["config"], sort_keys=True, default=str),
    ]
    return "\n".join(lines) + "\n"


def selection_csv(report: SelectionReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["config_id", "official_metric", "value", "runner_up_margin"])
    writer.writerow([report.best_config.config_id, report.official_metric,
                     repr(report.official_metric_value),
                     "" if report.runner_up_margin is None else repr(report.runner_up_margin)])
    return buf.getvalue()


def score_table(rows: Sequence[tuple[str, float]], metric: str = "f1", fmt: str = "markdown",
                bold_best: bool = True, digits: int = 4) -> str:
    """Two-column ``Model | metric`` table, rows kept in the given order.

    The best value is set in bold, as is its model name. ``fmt`` is
    ``markdown`` or ``latex`` (booktabs).
    """
    if not rows:
        raise ValueError("score table needs at least one row")
    title = SCORE_TITLES.get(metric, metric)
    best = max(v for _, v in rows)
    out_rows = []
    for name, value in rows:
        cells = [name, f"{value:.{digits}f}"]
        if bold_best and value == best:
            cells = [f"\\textbf{{{c}}}" if fmt == "latex" else f"**{c}**" for c in cells]
        out_rows.append(cells)
    if fmt == "markdown":
        return markdown_table(["Model", title], out_rows)
    if fmt != "latex":
        raise ValueError(f"unknown format {fmt!r}")
    lines = ["\\begin{tabular}{@{}cc@{}}", "\\toprule", f"Model & {title} \\\\ \\midrule"]
    for i, (name, value) in enumerate(out_rows):
        end = " \\\\ \\bottomrule" if i == len(out_rows) - 1 else " \\\\"
        lines.append(f"{name} & {value}{end}")
    lines.append("\\end{tabular}")
    return "\n".join(lines) + "\n"


def parse_markdown_table(text: str) -> tuple[list[str], list[list[str]]]:
    """Inverse of :func:`markdown_table` for the first table found in ``text``."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip().startswith("|")]
    if len(lines) < 2:
        raise ValueError("no markdown table found")

    def split(ln):
        cells = re.split(r"(?<!\\)\|", ln.strip()[1:-1])
        return [c.strip().replace("\\|", "|") for c in cells]

    return split(lines[0]), [split(ln) for ln in lines[2:]]


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
