from pathlib import Path

import pytest
import yaml

from detoxkit.config import load_config, validate_config
from detoxkit.corpus import Task
from detoxkit.errors import ConfigurationError
from detoxkit.features import NGramRange


def test_minimal_config_defaults(tmp_path):
    cfg = validate_config({"task": "task1", "train": "train.tsv"}, tmp_path, env={})
    assert cfg.task is Task.BINARY and cfg.train == tmp_path / "train.tsv"
    assert len(cfg.grid.cells()) == 54 and cfg.grid.k == 10 and cfg.seed == 42
    assert cfg.output_dir == tmp_path / "runs"


def test_full_config(tmp_path):
    (tmp_path / "sw.txt").write_text("hola\nadios\n")
    raw = {"task": "task2", "train": "/data/t.tsv", "seed": 7, "n_jobs": 2,
           "preprocess": {"stem": False, "stopwords": "sw.txt"},
           "grid": {"encoders": ["bow"], "ngram_ranges": [[1, 2]],
                    "models": {"maxent": ["newton-cg"]},
                    "hyper": {"maxent": {"C": 0.5}}, "k": 5, "aggregation": "pooled"}}
    cfg = validate_config(raw, tmp_path, env={})
    assert cfg.train == Path("/data/t.tsv") and cfg.preprocess.stopwords == {"hola", "adios"}
    assert not cfg.preprocess.stem
    (cell,) = cfg.grid.cells()
    assert cell.config_id == "maxent:newton|bow|1-2"
    assert dict(cell.params)["C"] == 0.5 and dict(cell.params)["seed"] == 7
    assert cfg.to_dict()["grid"]["aggregation"] == "pooled"


def test_all_errors_reported_at_once(tmp_path):
    raw = {"task": "task9", "bogus": 1, "seed": -1,
           "grid": {"ngram_ranges": [[3, 1]], "encoders": ["word2vec"], "k": 1,
                    "hyper": {"nb": {"alpha": 0}}},
           "preprocess": {"stem": "yes", "colour": True}}
    with pytest.raises(ConfigurationError) as info:
        validate_config(raw, tmp_path, env={})
    text = "\n".join(info.value.errors)
    for needle in ("task:", "bogus", "seed", "grid.ngram_ranges[0]", "grid.encoders", "grid.k",
                   "grid.hyper.nb.alpha", "preprocess.stem", "preprocess.colour", "train: required"):
        assert needle in text, needle
    assert len(info.value.errors) >= 10


def test_invalid_range_names_field(tmp_path):
    with pytest.raises(ConfigurationError) as info:
        validate_config({"task": "task1", "train": "x", "grid": {"ngram_ranges": [[3, 1]]}},
                        tmp_path, env={})
    assert info.value.errors == [e for e in info.value.errors if "grid.ngram_ranges[0]" in e]
    with pytest.raises(ValueError):
        NGramRange(3, 1)


def test_environment_overrides(tmp_path):
    env = {"DETOXKIT_TRAIN": "/env/train.tsv", "DETOXKIT_N_JOBS": "3",
           "DETOXKIT_OUTPUT_DIR": "/env/out"}
    cfg = validate_config({"task": "task1", "train": "a.tsv", "n_jobs": 1}, tmp_path, env=env)
    assert cfg.train == Path("/env/train.tsv") and cfg.n_jobs == 3
    assert cfg.output_dir == Path("/env/out")


def test_load_config_yaml(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump({"task": "task2", "train": "t.tsv",
                                    "preprocess": {"stopwords": ["y", "o"]}}))
    cfg = load_config(path, env={})
    assert cfg.train == tmp_path / "t.tsv" and cfg.preprocess.stopwords == {"y", "o"}
    path.write_text("task: [unclosed")
    with pytest.raises(ConfigurationError, match="YAML"):
        load_config(path, env={})
