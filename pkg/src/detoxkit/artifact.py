"""Single-file persistence for trained pipelines.

An artifact is an ``.npz`` archive: numeric arrays plus one JSON ``meta``
entry that carries the format version, task, label schema, preprocessing
settings, the grid cell that was trained and the training fingerprint.
No pickles are involved, so loading never executes code.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .corpus import LabelSchema, Task
from .errors import ArtifactVersionError, SchemaError
from .features import NGramRange, Vocabulary
from .evalharness import CellConfig, TrainedPipeline
from .maxent import MaxentConfig, MaxentModel
from .nb import NbAlgorithm, NbModel
from .preprocess import PreprocessConfig

FORMAT_VERSION = 1


def save_pipeline(pipeline: TrainedPipeline, path: str | Path) -> Path:
    path = Path(path)
    model = pipeline.model
    vocab = pipeline.vocabulary
    meta = {
        "format_version": FORMAT_VERSION,
        "task": pipeline.task.value,
        "schema": {"classes": list(pipeline.schema.classes),
                   "positive_class": pipeline.schema.positive_class},
        "preprocess": pipeline.preprocess.to_dict(),
        "cell": pipeline.cell.to_dict(),
        "vocabulary": {"n_docs": vocab.n_docs,
                       "ngram_range": [vocab.ngram_range.lo, vocab.ngram_range.hi]},
        "fingerprint": pipeline.fingerprint,
    }
    arrays = {
        "vocab_terms": np.array(vocab.terms, dtype=str),
        "vocab_df": np.asarray(vocab.doc_freq),
    }
    if pipeline.idf is not None:
        arrays["idf"] = pipeline.idf
    if isinstance(model, NbModel):
        meta["model"] = {"family": "nb", "algorithm": model.algorithm.value, "alpha": model.alpha,
                         "dimension": model.dimension, "n_classes": model.n_classes,
                         "params": sorted(model.feature_params)}
        arrays["class_log_prior"] = model.class_log_prior
        for key, value in model.feature_params.items():
            arrays[f"nb_{key}"] = np.asarray(value)
    else:
        meta["model"] = {"family": "maxent", "config": model.config.to_dict(),
                         "n_classes": model.n_classes, "multinomial": model.multinomial,
                         "converged": bool(model.converged), "n_iter": int(model.n_iter),
                         "final_grad_norm": float(model.final_grad_norm)}
        arrays["weights"] = model.weights
        arrays["bias"] = model.bias
        arrays["classes"] = model.classes
    # np.savez appends .npz when missing; write through a handle to keep the name
    with open(path, "wb") as fh:
        np.savez_compressed(fh, meta=np.array(json.dumps(meta, sort_keys=True)), **arrays)
    return path


def load_pipeline(path: str | Path) -> TrainedPipeline:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        version = meta.get("format_version")
        if version != FORMAT_VERSION:
            raise ArtifactVersionError(
                f"{path}: artifact format version {version} is not supported (this toolkit reads "
                f"version {FORMAT_VERSION}); retrain the model with this toolkit version")
        arrays = {k: data[k] for k in data.files if k != "meta"}
    task = Task.parse(meta["task"])
    schema = LabelSchema(task, tuple(meta["schema"]["classes"]), meta["schema"]["positive_class"])
    vm = meta["vocabulary"]
    vocab = Vocabulary(tuple(str(t) for t in arrays["vocab_terms"]), arrays["vocab_df"],
                       vm["n_docs"], NGramRange(*vm["ngram_range"]))
    c = meta["cell"]
    cell = CellConfig(c["family"], c["variant"], c["encoder"], NGramRange(*c["ngram_range"]),
                      tuple(c["params"].items()))
    m = meta["model"]
    if m["family"] == "nb":
        params = {}
        for key in m["params"]:
            value = arrays[f"nb_{key}"]
            params[key] = float(value) if value.ndim == 0 else value
        model = NbModel(NbAlgorithm(m["algorithm"]), arrays["class_log_prior"], params,
                        m["alpha"], m["dimension"], m["n_classes"])
    else:
        model = MaxentModel(arrays["weights"], arrays["bias"], arrays["classes"], m["n_classes"],
                            MaxentConfig(**m["config"]), m["multinomial"], m["converged"],
                            m["n_iter"], m["final_grad_norm"])
    if len(vocab) != (model.dimension):
        raise SchemaError(f"{path}: vocabulary size {len(vocab)} != model dimension {model.dimension}")
    return TrainedPipeline(task, schema, PreprocessConfig.from_dict(meta["preprocess"]), cell,
                           vocab, arrays.get("idf"), model, meta["fingerprint"])


def artifact_meta(path: str | Path) -> dict:
    with np.load(path, allow_pickle=False) as data:
        return json.loads(str(data["meta"]))
