"""Classification datasets: schema, CSV loading, synthetic generators, fold splits.

Attribute values are stored integer-encoded in ``Dataset.X``: nominal values as
indices into the attribute's value list, continuous values as the raw integer.
Class labels are indices into ``Dataset.class_values``.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

NOMINAL = "nominal"
CONTINUOUS = "continuous"


class DataError(ValueError):
    """Raised for malformed or inconsistent datasets."""


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    kind: str
    values: tuple[str, ...] = ()
    min: int = 0
    max: int = 0

    def __post_init__(self):
        if self.kind == NOMINAL:
            if not self.values:
                raise DataError(f"attribute {self.name!r}: empty value list")
            if len(set(self.values)) != len(self.values):
                raise DataError(f"attribute {self.name!r}: duplicate values")
        elif self.kind == CONTINUOUS:
            if self.min > self.max:
                raise DataError(f"attribute {self.name!r}: min > max")
        else:
            raise DataError(f"attribute {self.name!r}: unknown kind {self.kind!r}")

    @classmethod
    def nominal(cls, name: str, values: Sequence[str]) -> "AttributeSchema":
        return cls(name, NOMINAL, values=tuple(values))

    @classmethod
    def continuous(cls, name: str, lo: int, hi: int) -> "AttributeSchema":
        return cls(name, CONTINUOUS, min=int(lo), max=int(hi))

    @property
    def is_nominal(self) -> bool:
        return self.kind == NOMINAL

    def encode(self, raw: str) -> int:
        if self.is_nominal:
            try:
                return self.values.index(raw)
            except ValueError:
                raise DataError(f"{raw!r} is not a value of {self.name!r}") from None
        v = int(raw)
        if not self.min <= v <= self.max:
            raise DataError(f"{v} outside [{self.min}..{self.max}] for {self.name!r}")
        return v

    def decode(self, code: int):
        return self.values[code] if self.is_nominal else int(code)

    def format_value(self, code: int) -> str:
        return str(self.decode(code))


@dataclass(frozen=True)
class Instance:
    id: int
    values: tuple
    cls: str


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable training data; instance ids are the row indices 0..n-1."""

    attributes: tuple[AttributeSchema, ...]
    class_values: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    name: str = field(default="data")

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.int64).reshape(-1, len(self.attributes))
        y = np.ascontiguousarray(self.y, dtype=np.int64).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise DataError("X and y row counts differ")
        if len(self.class_values) < 2:
            raise DataError("need at least 2 distinct class values")
        if len(set(self.class_values)) != len(self.class_values):
            raise DataError("duplicate class values")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "class_values", tuple(self.class_values))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        self.validate()

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    def validate(self) -> None:
        """Exhaustive schema-conformance check of every instance."""
        if self.n and (self.y.min() < 0 or self.y.max() >= len(self.class_values)):
            raise DataError("class code out of range")
        for j, a in enumerate(self.attributes):
            if not self.n:
                break
            col = self.X[:, j]
            lo, hi = (0, len(a.values) - 1) if a.is_nominal else (a.min, a.max)
            if col.min() < lo or col.max() > hi:
                raise DataError(f"column {a.name!r} has values outside its schema")

    @cached_property
    def instances(self) -> tuple[Instance, ...]:
        return tuple(self.instance(i) for i in range(self.n))

    def instance(self, i: int) -> Instance:
        row = self.X[i]
        values = tuple(a.decode(int(v)) for a, v in zip(self.attributes, row))
        return Instance(i, values, self.class_values[int(self.y[i])])

    def attribute_index(self, name: str) -> int:
        for j, a in enumerate(self.attributes):
            if a.name == name:
                return j
        raise KeyError(name)

    def subset(self, ids: Sequence[int]) -> "Dataset":
        """New dataset holding rows ``ids`` (re-numbered 0..len-1), same schema."""
        ids = np.asarray(ids, dtype=np.int64)
        return Dataset(self.attributes, self.class_values, self.X[ids], self.y[ids], self.name)

    def csv_text(self, class_name: str = "class") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([a.name for a in self.attributes] + [class_name])
        for row, c in zip(self.X, self.y):
            w.writerow([a.format_value(int(v)) for a, v in zip(self.attributes, row)]
                       + [self.class_values[int(c)]])
        return buf.getvalue()

    def to_csv(self, path, class_name: str = "class") -> None:
        Path(path).write_text(self.csv_text(class_name), encoding="utf-8")


def _is_int(text: str) -> bool:
    try:
        int(text)
    except ValueError:
        return False
    return True


def _is_real(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(path, class_column: str | int | None = None,
             overrides: Mapping[str, str] | None = None) -> Dataset:
    """Load a headered CSV file, inferring each column's schema.

    A column whose every cell parses as an integer becomes continuous with the
    observed range; any other column is nominal with values in first-appearance
    order. ``overrides`` maps column names to ``"nominal"`` or ``"continuous"``.
    The class column (name, index, or the last column when None) is always nominal.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise DataError("missing header row")
    header, body = [h.strip() for h in rows[0]], rows[1:]
    if len(header) < 2:
        raise DataError("need at least 2 columns")
    if not body:
        raise DataError("empty data section")
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise DataError(f"ragged row at line {lineno}: {len(r)} cells, expected {len(header)}")
    cells = [[c.strip() for c in r] for r in body]
    for lineno, r in enumerate(cells, start=2):
        if any(c == "" for c in r):
            raise DataError(f"blank cell at line {lineno} (missing values are not supported)")

    if class_column is None:
        cidx = len(header) - 1
    elif isinstance(class_column, int):
        cidx = class_column if class_column >= 0 else len(header) + class_column
        if not 0 <= cidx < len(header):
            raise DataError(f"class column index {class_column} out of range")
    else:
        if class_column not in header:
            raise DataError(f"no column named {class_column!r}")
        cidx = header.index(class_column)

    overrides = dict(overrides or {})
    unknown = set(overrides) - set(header)
    if unknown:
        raise DataError(f"overrides name unknown columns: {sorted(unknown)}")

    attributes, columns = [], []
    for j, name in enumerate(header):
        if j == cidx:
            continue
        col = [r[j] for r in cells]
        kind = overrides.get(name)
        if kind is None:
            if all(_is_int(c) for c in col):
                kind = CONTINUOUS
            elif all(_is_real(c) for c in col):
                raise DataError(f"column {name!r} is real-valued; only integer continuous "
                                "attributes are supported (override it as nominal if intended)")
            else:
                kind = NOMINAL
        if kind == CONTINUOUS:
            if not all(_is_int(c) for c in col):
                raise DataError(f"column {name!r} forced continuous but has non-integer cells")
            ints = [int(c) for c in col]
            attributes.append(AttributeSchema.continuous(name, min(ints), max(ints)))
        elif kind == NOMINAL:
            attributes.append(AttributeSchema.nominal(name, list(dict.fromkeys(col))))
        else:
            raise DataError(f"unknown override kind {kind!r} for column {name!r}")
        columns.append(col)

    class_col = [r[cidx] for r in cells]
    class_values = tuple(dict.fromkeys(class_col))
    if len(class_values) < 2:
        raise DataError("fewer than 2 distinct class values")
    X = np.array([[a.encode(v) for a, v in zip(attributes, vals)] for vals in zip(*columns)],
                 dtype=np.int64).reshape(len(cells), len(attributes))
    y = np.array([class_values.index(c) for c in class_col], dtype=np.int64)
    return Dataset(tuple(attributes), class_values, X, y, name=path.stem)


BINARY = ("0", "1")


def generate_multiplexor(address_bits: int) -> Dataset:
    """Full truth table of the multiplexor with ``address_bits`` selector bits.

    Attributes are A0..A{a-1} (A0 most significant) followed by D0..D{2^a-1};
    the class is the data bit addressed by the A bits. Rows are in lexicographic
    order of the attribute vector.
    """
    if not 1 <= address_bits <= 4:
        raise DataError("address_bits must be in [1..4]")
    a = address_bits
    d = 1 << a
    names = [f"A{i}" for i in range(a)] + [f"D{i}" for i in range(d)]
    X = np.array(list(itertools.product((0, 1), repeat=a + d)), dtype=np.int64)
    address = X[:, :a] @ (1 << np.arange(a - 1, -1, -1))
    y = X[np.arange(len(X)), a + address]
    attrs = tuple(AttributeSchema.nominal(nm, BINARY) for nm in names)
    return Dataset(attrs, BINARY, X, y, name=f"multiplexor{a}")


def generate_parity(bits: int) -> Dataset:
    """All 2^bits binary rows (lexicographic, B0 most significant); class = XOR."""
    if not 1 <= bits <= 16:
        raise DataError("bits must be in [1..16]")
    X = np.array(list(itertools.product((0, 1), repeat=bits)), dtype=np.int64)
    y = X.sum(axis=1) % 2
    attrs = tuple(AttributeSchema.nominal(f"B{i}", BINARY) for i in range(bits))
    return Dataset(attrs, BINARY, X, y, name=f"parity{bits}")


def split_folds(dataset: Dataset, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded shuffle, then round-robin deal into ``k`` test folds."""
    n = dataset.n
    if k < 2:
        raise DataError("k must be at least 2")
    if k > n:
        raise DataError(f"k={k} exceeds n={n}")
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    folds = []
    for i in range(k):
        test = np.sort(perm[i::k])
        mask = np.ones(n, dtype=bool)
        mask[test] = False
        folds.append((np.flatnonzero(mask), test))
    return folds
