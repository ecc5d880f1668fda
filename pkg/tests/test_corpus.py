import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st

from detoxkit.corpus import (TOXICITY, TOXICITY_LEVEL, Dataset, Instance, LabelSchema, Task,
                             label_distribution, load_dataset, stratified_folds, write_dataset,
                             write_distribution_csv)
from detoxkit.errors import IntegrityError, ParseError, SchemaError

from conftest import write_tsv

LEVEL_COUNTS = (2317, 808, 269, 69)


def make_dataset(levels, prefix="c"):
    return Dataset(tuple(Instance(f"{prefix}{i}", f"texto {i}", int(lv > 0), int(lv))
                         for i, lv in enumerate(levels)))


def test_label_schema_parsing():
    assert TOXICITY.parse_label(" Toxic ") == 1
    assert TOXICITY.parse_label("NOT TOXIC") == 0
    assert TOXICITY_LEVEL.parse_label("very toxic") == 3
    assert TOXICITY_LEVEL.parse_label("2") == 2
    with pytest.raises(ParseError):
        TOXICITY.parse_label("maybe")
    with pytest.raises(ParseError):
        TOXICITY.parse_label("2")


def test_schema_invariants():
    with pytest.raises(ValueError):
        LabelSchema(Task.BINARY, ("a", "b", "c"), positive_class=1)
    with pytest.raises(ValueError):
        LabelSchema(Task.ORDINAL, ("a",))
    assert Task.parse("task1") is Task.BINARY
    assert Task.parse("Task2") is Task.ORDINAL


def test_load_three_rows(tmp_path):
    path = write_tsv(tmp_path / "t.tsv", [("1", "hola", "not toxic", "not toxic"),
                                          ("2", "fuera", "toxic", "toxic"),
                                          ("3", "bien", "not toxic", "not toxic")])
    ds = load_dataset(path)
    assert label_distribution(ds, Task.BINARY) == {"not toxic": 2, "toxic": 1}
    assert ds.texts == ["hola", "fuera", "bien"]


def test_binary_table_counts(tmp_path):
    # 2316 not toxic / 1147 toxic, as in the training-set distribution
    rows = [(f"id{i}", f"comentario {i}", "not toxic", "not toxic") for i in range(2316)]
    rows += [(f"id{2316 + i}", f"comentario {i}", "toxic", "toxic") for i in range(1147)]
    ds = load_dataset(write_tsv(tmp_path / "t.tsv", rows))
    assert label_distribution(ds, "task1") == {"not toxic": 2316, "toxic": 1147}
    assert len(ds) == 3463


def test_ordinal_table_counts():
    levels = np.repeat(np.arange(4), LEVEL_COUNTS)
    ds = make_dataset(levels)
    assert label_distribution(ds, Task.ORDINAL) == {
        "not toxic": 2317, "mildly toxic": 808, "toxic": 269, "very toxic": 69}


def test_distribution_small_cases():
    assert label_distribution(make_dataset([0]), Task.ORDINAL) == {
        "not toxic": 1, "mildly toxic": 0, "toxic": 0, "very toxic": 0}
    ds = make_dataset([0] * 50 + [1] * 50)
    assert label_distribution(ds, Task.BINARY) == {"not toxic": 50, "toxic": 50}


def test_distribution_csv_layout(tmp_path):
    ds = make_dataset([0, 0, 1, 2, 3])
    write_distribution_csv(ds, tmp_path / "d.csv")
    rows = list(csv.reader(open(tmp_path / "d.csv")))
    assert rows[0] == ["Toxicity label", "Number of instances", "Toxicity_level label",
                       "Number of instances"]
    assert rows[1] == ["not toxic", "2", "not toxic", "2"]
    assert rows[2] == ["toxic", "3", "mildly toxic", "1"]
    assert rows[4] == ["", "", "very toxic", "1"]


def test_unlabeled_distribution_names_instance():
    ds = Dataset((Instance("a", "x", 0, 0), Instance("b", "y")))
    with pytest.raises(IntegrityError, match="b"):
        label_distribution(ds, Task.BINARY)


def test_empty_file_after_header(tmp_path):
    with pytest.raises(IntegrityError):
        load_dataset(write_tsv(tmp_path / "e.tsv", []))


def test_missing_and_unknown_columns(tmp_path):
    p = write_tsv(tmp_path / "m.tsv", [("1", "x", "toxic")],
                  header=("Comment_id", "Comment", "Toxicity"))
    with pytest.raises(SchemaError, match="Toxicity_level"):
        load_dataset(p)
    p = write_tsv(tmp_path / "u.tsv", [("1", "x", "toxic", "toxic")],
                  header=("Comment_id", "Comment", "Toxicity", "Nivel"))
    with pytest.raises(SchemaError, match="Nivel"):
        load_dataset(p)


def test_bad_label_reports_row(tmp_path):
    p = write_tsv(tmp_path / "b.tsv", [("1", "x", "toxic", "toxic"), ("2", "y", "meh", "toxic")])
    with pytest.raises(ParseError, match="row 3"):
        load_dataset(p)


def test_duplicate_ids(tmp_path):
    p = write_tsv(tmp_path / "d.tsv", [("1", "x", "toxic", "toxic"), ("1", "y", "toxic", "toxic")])
    with pytest.raises(IntegrityError, match="duplicate"):
        load_dataset(p)


def test_misaligned_labels_are_reported(tmp_path):
    p = write_tsv(tmp_path / "a.tsv", [("7", "x", "not toxic", "mildly toxic")])
    with pytest.raises(IntegrityError, match="7"):
        load_dataset(p)


def test_test_file_mode(tmp_path):
    p = write_tsv(tmp_path / "t.tsv", [("9", "hola"), ("10", "adiós")],
                  header=("Comment_id", "Comment"))
    ds = load_dataset(p, has_labels=False)
    assert ds.ids == ["9", "10"] and not ds.is_labeled(Task.BINARY)


def test_csv_format_with_quotes(tmp_path):
    p = tmp_path / "q.csv"
    with open(p, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["Comment_id", "Comment", "Toxicity", "Toxicity_level"])
        w.writerow(["1", 'dijo "basta", y\tsiguió', "toxic", "mildly toxic"])
    ds = load_dataset(p, fmt="csv")
    assert ds.texts == ['dijo "basta", y\tsiguió']


text_st = st.text(alphabet=st.characters(blacklist_categories=("Cs",),
                                         blacklist_characters="\t\r\n\x0b\x0c\x1c\x1d\x1e\x85  "),
                  max_size=40)


@given(st.lists(st.tuples(text_st, st.integers(0, 3)), min_size=1, max_size=20))
def test_roundtrip_tsv(tmp_path_factory, rows):
    ds = Dataset(tuple(Instance(f"id{i}", t, int(lv > 0), lv) for i, (t, lv) in enumerate(rows)))
    path = tmp_path_factory.mktemp("rt") / "d.tsv"
    write_dataset(ds, path)
    assert load_dataset(path) == ds


def test_tsv_rejects_tabs(tmp_path):
    ds = Dataset((Instance("1", "a\tb", 0, 0),))
    with pytest.raises(ValueError):
        write_dataset(ds, tmp_path / "x.tsv")
    write_dataset(ds, tmp_path / "x.csv", fmt="csv")
    assert load_dataset(tmp_path / "x.csv", fmt="csv") == ds


def test_folds_exact_divisibility():
    y = [0] * 5 + [1] * 5
    folds = stratified_folds(y, k=5, seed=3)
    for f in range(5):
        assert sorted(np.asarray(y)[folds.test_indices(f)].tolist()) == [0, 1]


def test_folds_deterministic_and_seed_sensitive():
    y = np.repeat([0, 1, 2], [30, 20, 7])
    a = stratified_folds(y, 10, seed=42)
    b = stratified_folds(y, 10, seed=42)
    assert np.array_equal(a.fold_of, b.fold_of)
    assert not np.array_equal(a.fold_of, stratified_folds(y, 10, seed=43).fold_of)


def test_folds_from_dataset_and_errors():
    ds = make_dataset([0, 1, 2, 3, 0, 1])
    folds = stratified_folds(ds, 2, task=Task.ORDINAL)
    assert len(folds.fold_of) == 6
    with pytest.raises(ValueError):
        stratified_folds([0, 1, 0], k=4)
    with pytest.raises(ValueError):
        stratified_folds([0, 1, 0], k=1)


def recount(y, fold_of, k):
    """Brute-force (class, fold) table built by walking every instance."""
    table = {}
    for label, fold in zip(y, fold_of):
        table[(int(label), int(fold))] = table.get((int(label), int(fold)), 0) + 1
    classes = sorted(set(int(v) for v in y))
    return [[table.get((c, f), 0) for f in range(k)] for c in classes]


def test_folds_table_shaped_counts():
    y = np.repeat(np.arange(4), LEVEL_COUNTS)
    folds = stratified_folds(y, 10, seed=42)
    for row in recount(y, folds.fold_of, 10):
        assert max(row) - min(row) <= 1
    sizes = np.bincount(folds.fold_of, minlength=10)
    assert sizes.max() - sizes.min() <= 1


@given(st.lists(st.integers(0, 4), min_size=2, max_size=200), st.integers(2, 12),
       st.integers(0, 2**31))
def test_fold_invariants(labels, k, seed):
    k = min(k, len(labels))
    folds = stratified_folds(labels, k, seed)
    y = np.asarray(labels)
    tests = [folds.test_indices(f) for f in range(k)]
    # disjoint cover
    assert sorted(np.concatenate(tests).tolist()) == list(range(len(y)))
    for row in recount(y, folds.fold_of, k):
        assert max(row) - min(row) <= 1
    sizes = [len(t) for t in tests]
    assert max(sizes) - min(sizes) <= 1
    for f, (tr, te) in enumerate(folds.splits()):
        assert not set(tr) & set(te)


def test_fingerprint_changes_with_labels():
    a = make_dataset([0, 1, 2])
    b = make_dataset([0, 1, 3])
    assert a.fingerprint() == make_dataset([0, 1, 2]).fingerprint()
    assert a.fingerprint() != b.fingerprint()
