# %% [markdown]
# # Cross-validated model selection, end to end
#
# Generate a corpus, run a reduced grid under stratified folds, pick the
# best cell by the official metric, retrain it on everything and label the
# held-out comments. Pass `--full` to run the whole 54-cell, 10-fold grid
# (about a minute per task on a laptop).

# %%
import sys
import tempfile
from pathlib import Path

from detoxkit.artifact import load_pipeline, save_pipeline
from detoxkit.corpus import Task
from detoxkit.evalharness import GridSpec, final_run, run_grid, select_best
from detoxkit.metrics import evaluate
from detoxkit.reports import grid_markdown, score_table
from detoxkit.synthetic import synthetic_corpus, train_test_split

full = "--full" in sys.argv
train, test = train_test_split(synthetic_corpus(2000, seed=0), 0.2, seed=0)
print(len(train), "train,", len(test), "test")

# %%
if full:
    spec = GridSpec(Task.ORDINAL)
else:
    spec = GridSpec(Task.ORDINAL, ngram_ranges=((1, 1), (1, 2)), k=5,
                    models=(("maxent", ("liblinear", "lbfgs")), ("nb", ("multinomial", "complement"))))
print(len(spec.cells()), "cells x", spec.k, "folds")
result = run_grid(train, spec)
print(grid_markdown(result))

# %%
report = select_best(result)
print("best:", report.best_config.config_id, f"cem={report.official_metric_value:.4f}",
      "margin:", report.runner_up_margin)

# %% [markdown]
# Retrain the winner on the full training split and score the held-out part.
# The model also survives a save/load round trip unchanged.

# %%
preds, pipeline = final_run(train, test, report.best_config, Task.ORDINAL)
schema = test.schema(Task.ORDINAL)
y_pred = [schema.parse_label(lab) for _, lab in preds]
metrics = evaluate(test.labels(Task.ORDINAL), y_pred, schema)
print(metrics.to_text())

with tempfile.TemporaryDirectory() as tmp:
    path = save_pipeline(pipeline, Path(tmp) / "model.npz")
    again = load_pipeline(path)
    assert (again.predict(test.texts) == pipeline.predict(test.texts)).all()

# %%
# a majority-class baseline for scale
majority = evaluate(test.labels(Task.ORDINAL), [0] * len(test), schema)
print(score_table([(report.best_config.config_id, metrics.cem), ("Always not toxic", majority.cem)],
                  "cem"))
