"""Dataset ingestion, label schemas and stratified fold assignment."""

from __future__ import annotations

import csv
import enum
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import IntegrityError, ParseError, SchemaError

ID_COLUMN = "Comment_id"
TEXT_COLUMN = "Comment"
BINARY_COLUMN = "Toxicity"
ORDINAL_COLUMN = "Toxicity_level"

TRAIN_COLUMNS = (ID_COLUMN, TEXT_COLUMN, BINARY_COLUMN, ORDINAL_COLUMN)
TEST_COLUMNS = (ID_COLUMN, TEXT_COLUMN)

DEFAULT_SEED = 42


class Task(enum.Enum):
    BINARY = "binary"  # Task 1: toxicity detection
    ORDINAL = "ordinal"  # Task 2: toxicity level detection

    @classmethod
    def parse(cls, value: "Task | str") -> "Task":
        if isinstance(value, Task):
            return value
        key = str(value).strip().lower()
        aliases = {"task1": cls.BINARY, "1": cls.BINARY, "binary": cls.BINARY,
                   "task2": cls.ORDINAL, "2": cls.ORDINAL, "ordinal": cls.ORDINAL}
        if key not in aliases:
            raise ValueError(f"unknown task {value!r}; expected task1 or task2")
        return aliases[key]


@dataclass(frozen=True)
class LabelSchema:
    task: Task
    classes: tuple[str, ...]
    positive_class: int | None = None

    def __post_init__(self):
        if self.task is Task.BINARY:
            if len(self.classes) != 2:
                raise ValueError("binary schema needs exactly 2 classes")
            if self.positive_class not in (0, 1):
                raise ValueError("binary schema needs positive_class 0 or 1")
        elif len(self.classes) < 2:
            raise ValueError("ordinal schema needs at least 2 classes")
        if len(set(c.lower() for c in self.classes)) != len(self.classes):
            raise ValueError("class names must be unique (case-insensitive)")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def parse_label(self, raw: str) -> int:
        """Map a label string (class name or numeric index) to a class index."""
        key = raw.strip().lower()
        for idx, name in enumerate(self.classes):
            if key == name.lower():
                return idx
        if key.isdigit() and int(key) < self.n_classes:
            return int(key)
        raise ParseError(f"unmappable label {raw!r} for classes {self.classes}")

    def label_name(self, index: int) -> str:
        return self.classes[index]


TOXICITY = LabelSchema(Task.BINARY, ("not toxic", "toxic"), positive_class=1)
TOXICITY_LEVEL = LabelSchema(
    Task.ORDINAL, ("not toxic", "mildly toxic", "toxic", "very toxic"))


@dataclass(frozen=True)
class Instance:
    comment_id: str
    text: str
    toxicity: int | None = None
    toxicity_level: int | None = None

    def label(self, task: Task) -> int | None:
        return self.toxicity if task is Task.BINARY else self.toxicity_level


@dataclass(frozen=True)
class Dataset:
    instances: tuple[Instance, ...]
    binary_schema: LabelSchema = TOXICITY
    ordinal_schema: LabelSchema = TOXICITY_LEVEL

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        if not self.instances:
            raise IntegrityError("dataset is empty")
        seen = set()
        for inst in self.instances:
            if inst.comment_id in seen:
                raise IntegrityError(f"duplicate comment_id {inst.comment_id!r}")
            seen.add(inst.comment_id)
        for task in Task:
            k = self.schema(task).n_classes
            for inst in self.instances:
                lab = inst.label(task)
                if lab is not None and not 0 <= lab < k:
                    raise IntegrityError(
                        f"{inst.comment_id}: class index {lab} invalid for {task.value} schema")
        misaligned = [
            inst.comment_id for inst in self.instances
            if inst.toxicity is not None and inst.toxicity_level is not None
            and (inst.toxicity == 0) != (inst.toxicity_level == 0)
        ]
        if misaligned:
            raise IntegrityError(
                f"{len(misaligned)} instance(s) where Toxicity and Toxicity_level disagree "
                f"on 'not toxic': {misaligned[:10]}")

    def __len__(self):
        return len(self.instances)

    def schema(self, task: Task | str) -> LabelSchema:
        return self.binary_schema if Task.parse(task) is Task.BINARY else self.ordinal_schema

    @property
    def ids(self) -> list[str]:
        return [inst.comment_id for inst in self.instances]

    @property
    def texts(self) -> list[str]:
        return [inst.text for inst in self.instances]

    def is_labeled(self, task: Task | str) -> bool:
        task = Task.parse(task)
        return all(inst.label(task) is not None for inst in self.instances)

    def labels(self, task: Task | str) -> np.ndarray:
        task = Task.parse(task)
        out = np.empty(len(self.instances), dtype=np.int64)
        for i, inst in enumerate(self.instances):
            lab = inst.label(task)
            if lab is None:
                raise IntegrityError(f"{inst.comment_id} has no {task.value} label")
            out[i] = lab
        return out

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(tuple(self.instances[i] for i in indices),
                       self.binary_schema, self.ordinal_schema)

    def fingerprint(self) -> str:
        """SHA-256 over ids, texts and labels; used to tag trained models."""
        h = hashlib.sha256()
        for inst in self.instances:
            for part in (inst.comment_id, inst.text, inst.toxicity, inst.toxicity_level):
                h.update(repr(part).encode("utf-8"))
                h.update(b"\x1f")
        return h.hexdigest()


def _open_rows(path: Path, fmt: str):
    fmt = fmt.lower()
    if fmt not in ("tsv", "csv"):
        raise ValueError(f"unknown format {fmt!r}; expected tsv or csv")
    fh = open(path, encoding="utf-8-sig", newline="")
    if fmt == "tsv":
        # unquoted TSV: one record per line, fields split on tabs
        reader = ((ln[:-2] if ln.endswith("\r\n") else ln.rstrip("\r\n")).split("\t")
                  for ln in fh if ln.strip("\r\n"))
    else:
        reader = csv.reader(fh)
    return fh, reader


def _check_header(header: Sequence[str], expected: Sequence[str]) -> None:
    header = [h.strip() for h in header]
    problems = [f"missing column {col!r}" for col in expected if col not in header]
    problems += [f"unknown column {col!r}" for col in header if col not in expected]
    if problems:
        raise SchemaError("; ".join(problems))
    if list(header) != list(expected):
        raise SchemaError(f"columns out of order: expected {list(expected)}, got {header}")


def load_dataset(path: str | Path, has_labels: bool = True, fmt: str = "tsv",
                 binary_schema: LabelSchema = TOXICITY,
                 ordinal_schema: LabelSchema = TOXICITY_LEVEL) -> Dataset:
    """Read a train (4-column) or test (2-column) file into a :class:`Dataset`.

    Label cells accept class names (case-insensitive, trimmed) or numeric
    indices. Comment text is kept exactly as stored in the file.
    """
    expected = TRAIN_COLUMNS if has_labels else TEST_COLUMNS
    fh, reader = _open_rows(Path(path), fmt)
    with fh:
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file has no header row") from None
        _check_header(header, expected)
        instances = []
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected):
                raise ParseError(f"row {rowno}: expected {len(expected)} fields, got {len(row)}")
            if has_labels:
                cid, text, tox, level = row
                try:
                    tox_i = binary_schema.parse_label(tox)
                    level_i = ordinal_schema.parse_label(level)
                except ParseError as exc:
                    raise ParseError(f"row {rowno}: {exc}") from None
                instances.append(Instance(cid, text, tox_i, level_i))
            else:
                cid, text = row
                instances.append(Instance(cid, text))
    if not instances:
        raise IntegrityError(f"{path}: no data rows after header")
    return Dataset(tuple(instances), binary_schema, ordinal_schema)


def write_dataset(dataset: Dataset, path: str | Path, fmt: str = "tsv") -> None:
    """Write a dataset in the same layout :func:`load_dataset` reads.

    TSV output is unquoted, so texts containing tabs or line breaks are
    rejected; use ``fmt="csv"`` for those.
    """
    labeled = any(i.toxicity is not None or i.toxicity_level is not None
                  for i in dataset.instances)
    columns = TRAIN_COLUMNS if labeled else TEST_COLUMNS
    rows = [list(columns)]
    for inst in dataset.instances:
        row = [inst.comment_id, inst.text]
        if labeled:
            row += [str(inst.toxicity), str(inst.toxicity_level)]
        rows.append(row)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if fmt == "tsv":
            for inst in dataset.instances:
                if any(ch in inst.text or ch in inst.comment_id for ch in "\t\r\n"):
                    raise ValueError(
                        f"{inst.comment_id}: tab or newline in text cannot be written as TSV")
            # plain join: the csv module refuses some characters (NUL) without an escape char
            fh.writelines("\t".join(row) + "\n" for row in rows)
        elif fmt == "csv":
            csv.writer(fh, lineterminator="\n").writerows(rows)
        else:
            raise ValueError(f"unknown format {fmt!r}")


def label_distribution(dataset: Dataset, task: Task | str) -> dict[str, int]:
    """Per-class counts ordered by the schema's class order."""
    schema = dataset.schema(task)
    y = dataset.labels(task)
    counts = np.bincount(y, minlength=schema.n_classes)
    return {name: int(c) for name, c in zip(schema.classes, counts)}


def write_distribution_csv(dataset: Dataset, path: str | Path) -> None:
    """Export both tasks' class counts side by side, as in the data-distribution table."""
    left = list(label_distribution(dataset, Task.BINARY).items())
    right = list(label_distribution(dataset, Task.ORDINAL).items())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["Toxicity label", "Number of instances",
                         "Toxicity_level label", "Number of instances"])
        for i in range(max(len(left), len(right))):
            a = left[i] if i < len(left) else ("", "")
            b = right[i] if i < len(right) else ("", "")
            writer.writerow([a[0], a[1], b[0], b[1]])


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    fold_of: np.ndarray = field(repr=False)
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.fold_of, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "fold_of", arr)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)

    def splits(self):
        for f in range(self.k):
            yield self.train_indices(f), self.test_indices(f)


def stratified_folds(labels: Dataset | Sequence[int] | np.ndarray, k: int,
                     seed: int = DEFAULT_SEED, task: Task | str = Task.BINARY) -> FoldAssignment:
    """Assign every instance to one of ``k`` folds, stratified by class.

    Each class is shuffled with a seeded permutation; the per-class runs are
    then concatenated in class order and dealt round-robin, which keeps both
    overall fold sizes and per-class fold counts within one of each other.
    """
    if isinstance(labels, Dataset):
        y = labels.labels(task)
    else:
        y = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > len(y):
        raise ValueError(f"k={k} exceeds dataset size {len(y)}")
    rng = np.random.default_rng(seed)
    order = []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        order.append(members[rng.permutation(len(members))])
    order = np.concatenate(order)
    fold_of = np.empty(len(y), dtype=np.int64)
    fold_of[order] = np.arange(len(y)) % k
    return FoldAssignment(k, fold_of, seed)
