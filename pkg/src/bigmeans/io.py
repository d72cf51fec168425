"""Dataset ingestion, min-max normalization and the bundled dataset registry."""

from __future__ import annotations

import csv
import gzip
import io as _io
import json
import math
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from bigmeans.core import Dataset, as_points
from bigmeans.exceptions import ConfigurationError, ParseError

FORMATS = ("csv", "whitespace", "tsplib")
DATA_DIR_ENV = "BIGMEANS_DATA_DIR"


@dataclass(frozen=True)
class DatasetSpec:
    path: str
    format: str = "csv"
    has_header: bool = False
    normalize: bool = False
    columns: Sequence[int] | None = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigurationError(f"unknown format {self.format!r}; expected one of {FORMATS}")


def _open_text(path):
    path = Path(path)
    if path.suffix == ".gz":
        return _io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, encoding="utf-8", newline="")


def _to_float(cell: str, path, line: int, col: int) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"not a number: {cell!r}", path, line, col) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {cell!r}", path, line, col)
    return v


def _rows_from_cells(records, path, columns):
    """records: iterable of (line_number, [cells]). Returns an m x n array."""
    out = []
    width = None
    for lineno, cells in records:
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(f"expected {width} fields, found {len(cells)}", path, lineno)
        if columns is not None:
            for c in columns:
                if not 0 <= c < width:
                    raise ParseError(f"selected column {c} does not exist (row has {width} fields)", path, lineno)
            picked = [(c, cells[c]) for c in columns]
        else:
            picked = list(enumerate(cells))
        out.append([_to_float(cell.strip(), path, lineno, c + 1) for c, cell in picked])
    if not out:
        raise ParseError("no data rows", path)
    return np.array(out, dtype=np.float64)


def _csv_records(fh, has_header):
    reader = csv.reader(fh)
    first = True
    for cells in reader:
        lineno = reader.line_num
        if not cells or all(not c.strip() for c in cells):
            continue
        if first and has_header:
            first = False
            continue
        first = False
        yield lineno, cells


def _whitespace_records(fh, has_header):
    first = True
    for lineno, line in enumerate(fh, start=1):
        cells = line.split()
        if not cells:
            continue
        if first and has_header:
            first = False
            continue
        first = False
        yield lineno, cells


_TSPLIB_END = {"EOF"}


def _looks_numeric(tokens) -> bool:
    try:
        [float(t) for t in tokens]
    except ValueError:
        return False
    return True


def _tsplib_records(fh, path):
    in_body = False
    for lineno, line in enumerate(fh, start=1):
        text = line.strip()
        if not text:
            continue
        tokens = text.split()
        if not in_body:
            key = text.split(":")[0].strip().upper()
            if key == "NODE_COORD_SECTION":
                in_body = True
                continue
            if key == "EDGE_WEIGHT_TYPE" and ":" in text and text.split(":", 1)[1].strip().upper() == "EXPLICIT":
                raise ParseError("explicit edge weights carry no coordinates", path, lineno)
            if ":" not in text and _looks_numeric(tokens):
                in_body = True
            else:
                continue
        if text.upper() in _TSPLIB_END or text.upper().endswith("_SECTION"):
            break
        if len(tokens) < 2:
            raise ParseError("coordinate line needs an index and at least one coordinate", path, lineno)
        # drop the node index column
        yield lineno, tokens[1:]


def load(spec: DatasetSpec) -> Dataset:
    path = spec.path
    if not Path(path).exists():
        raise FileNotFoundError(path)
    with _open_text(path) as fh:
        if spec.format == "csv":
            records = _csv_records(fh, spec.has_header)
        elif spec.format == "whitespace":
            records = _whitespace_records(fh, spec.has_header)
        else:
            records = _tsplib_records(fh, path)
        X = _rows_from_cells(records, path, spec.columns)
    data = Dataset(X, name=Path(path).name)
    return min_max_normalize(data) if spec.normalize else data


def min_max_normalize(data) -> Dataset:
    """Scale every column to [0, 1]; constant columns become 0."""
    X = as_points(data)
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    safe = np.where(span > 0, span, 1.0)
    Y = np.where(span > 0, (X - lo) / safe, 0.0)
    # guard the upper end against rounding just past 1
    Y = np.clip(Y, 0.0, 1.0)
    name = data.name if isinstance(data, Dataset) else None
    return Dataset(Y, name=name)


def format_float(v: float) -> str:
    # shortest repr round-trips bit-exactly
    return repr(float(v))


def write_csv(data, path, lineterminator: str = "\n"):
    X = as_points(data)
    with open(path, "w", newline="") as fh:
        for row in X:
            fh.write(",".join(format_float(v) for v in row))
            fh.write(lineterminator)


def write_labels(labels, path):
    with open(path, "w", newline="") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")


def load_registry(path=None) -> dict:
    if path is None:
        text = resources.files("bigmeans").joinpath("registry.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)["datasets"]


def data_dir(override=None) -> Path:
    if override is not None:
        return Path(override)
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


def registry_spec(name: str, registry: dict | None = None, directory=None) -> DatasetSpec:
    """DatasetSpec for a registry entry, resolved against the data directory."""
    reg = registry if registry is not None else load_registry()
    if name not in reg:
        raise ConfigurationError(f"unknown dataset {name!r}")
    entry = reg[name]
    if not entry.get("path") or not entry.get("format"):
        raise ConfigurationError(f"registry entry {name!r} has no file layout; supply path and format explicitly")
    base = data_dir(directory)
    path = base / entry["path"]
    if not path.exists() and (base / (entry["path"] + ".gz")).exists():
        path = base / (entry["path"] + ".gz")
    return DatasetSpec(str(path), entry["format"], bool(entry.get("has_header", False)),
                       bool(entry.get("normalize", False)), entry.get("columns"))


def registry_f_best(name: str, k: int, registry: dict | None = None) -> float | None:
    reg = registry if registry is not None else load_registry()
    entry = reg.get(name)
    if entry is None:
        return None
    return entry.get("f_best", {}).get(str(k))
