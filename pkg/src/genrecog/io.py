"""Flat-file formats: model files, labelled datasets, and CSV outputs.

Model file grammar (UTF-8 text, one statement per line)::

    # comment lines and blank lines are ignored
    format = genrecog-model/1
    features = wheels, horizontal, handlebar, seat

    [classes]
    bicycle = 2.0, 1.0, 1.0, 1.0
    unicycle = 1.0, 0.0, 0.0, 1.0

Each line under ``[classes]`` holds one class in the classes-as-rows display
form, so the stored N x H matrix is its transpose. Labels are stripped of
surrounding whitespace and may not contain ``,`` or ``=`` or start with
``#`` or ``[``. Numbers are written with ``repr`` (shortest round-trip), so
a written model reloads bit for bit.
"""

from __future__ import annotations

import csv
import io as _io
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analysis import PairExperimentResult
from .core import ExpectationMatrix, FeedforwardMatrix, GenrecogError, SolverTrace
from .learning import LabeledDataset

MODEL_FORMAT = "genrecog-model/1"


class ParseError(GenrecogError, ValueError):
    def __init__(self, source, line: int | None, column: int | None, message: str):
        self.source = str(source)
        self.line = line
        self.column = column
        self.message = message
        where = self.source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


def format_number(x: float) -> str:
    return repr(float(x))


def _check_label(label: str, kind: str):
    if (
        not label
        or label != label.strip()
        or any(ch in label for ch in ",=\n\r")
        or label[0] in "#["
    ):
        raise ValueError(f"{kind} label {label!r} cannot be written to a model file")


def dumps_model(M: ExpectationMatrix) -> str:
    for f in M.feature_labels:
        _check_label(f, "feature")
    for c in M.class_labels:
        _check_label(c, "class")
    lines = [
        "# genrecog expectation model (one row per class)",
        f"format = {MODEL_FORMAT}",
        "features = " + ", ".join(M.feature_labels),
        "",
        "[classes]",
    ]
    for label, row in zip(M.class_labels, M.rows):
        lines.append(f"{label} = " + ", ".join(format_number(v) for v in row))
    return "\n".join(lines) + "\n"


def _parse_number(text: str, source, lineno: int, column: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(source, lineno, column, f"not a number: {text.strip()!r}") from None
    if not math.isfinite(value):
        raise ParseError(source, lineno, column, f"non-finite number: {text.strip()!r}")
    return value


def _split_fields(text: str, offset: int):
    """Yield (field, 1-based column) for a comma-separated list."""
    col = offset
    for part in text.split(","):
        lead = len(part) - len(part.lstrip())
        yield part.strip(), col + lead
        col += len(part) + 1


def loads_model(text: str, source="<string>") -> ExpectationMatrix:
    header: dict[str, tuple[str, int, int]] = {}
    class_labels: list[str] = []
    rows: list[list[float]] = []
    in_classes = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            if stripped != "[classes]":
                raise ParseError(source, lineno, 1, f"unknown section {stripped!r}")
            in_classes = True
            continue
        if "=" not in raw:
            raise ParseError(source, lineno, 1, "expected 'key = value'")
        key, value = raw.split("=", 1)
        value_col = len(key) + 2
        key = key.strip()
        if not in_classes:
            if key not in ("format", "features"):
                raise ParseError(source, lineno, 1, f"unknown header key {key!r}")
            header[key] = (value, lineno, value_col)
            continue
        if not key:
            raise ParseError(source, lineno, 1, "empty class label")
        if key in class_labels:
            raise ParseError(source, lineno, 1, f"duplicate class label {key!r}")
        class_labels.append(key)
        rows.append([_parse_number(f, source, lineno, c) for f, c in _split_fields(value, value_col)])

    if "format" not in header:
        raise ParseError(source, None, None, "missing 'format' header")
    fmt, lineno, col = header["format"]
    if fmt.strip() != MODEL_FORMAT:
        col += len(fmt) - len(fmt.lstrip())
        raise ParseError(source, lineno, col, f"unsupported format {fmt.strip()!r}, expected {MODEL_FORMAT!r}")
    if "features" not in header:
        raise ParseError(source, None, None, "missing 'features' header")
    feats_text, flineno, fcol = header["features"]
    features = [f for f, _ in _split_fields(feats_text, fcol)]
    if not features or any(not f for f in features):
        raise ParseError(source, flineno, fcol, "empty feature label")
    if not rows:
        raise ParseError(source, None, None, "model has no classes")
    for label, row in zip(class_labels, rows):
        if len(row) != len(features):
            raise ParseError(
                source, None, None, f"class {label!r} has {len(row)} values, expected {len(features)}"
            )
    return ExpectationMatrix.from_rows(rows, features, class_labels)


def write_model(M: ExpectationMatrix, path) -> None:
    Path(path).write_text(dumps_model(M), encoding="utf-8")


def read_model(path) -> ExpectationMatrix:
    path = Path(path)
    return loads_model(path.read_text(encoding="utf-8"), source=path)


def parse_dataset(text: str, source="<string>") -> LabeledDataset:
    """Parse a CSV with a header row: label column then one column per feature."""
    reader = csv.reader(_io.StringIO(text))
    rows = [(n, r) for n, r in enumerate(reader, start=1) if any(cell.strip() for cell in r)]
    if not rows:
        raise ParseError(source, None, None, "empty dataset: no header row")
    _, header = rows[0]
    if len(header) < 2:
        raise ParseError(source, rows[0][0], 1, "header needs a label column and at least one feature")
    features = [h.strip() for h in header[1:]]
    for col, f in enumerate(features, start=2):
        if not f:
            raise ParseError(source, rows[0][0], col, "empty feature name in header")
    exemplars = []
    for lineno, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(source, lineno, None, f"expected {len(header)} cells, got {len(row)}")
        label = row[0].strip()
        if not label:
            raise ParseError(source, lineno, 1, "empty label")
        values = [_parse_number(cell, source, lineno, col) for col, cell in enumerate(row[1:], start=2)]
        exemplars.append((np.array(values), label))
    if not exemplars:
        raise ParseError(source, None, None, "dataset has no exemplars")
    return LabeledDataset(exemplars, tuple(features))


def read_dataset(path) -> LabeledDataset:
    path = Path(path)
    return parse_dataset(path.read_text(encoding="utf-8"), source=path)


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trace_csv(trace: SolverTrace) -> str:
    labels = trace.class_labels or tuple(f"y{i + 1}" for i in range(trace.activations.shape[1]))
    rows = (
        [str(int(s))] + [format_number(v) for v in y] + [format_number(e)]
        for s, y, e in zip(trace.steps, trace.activations, trace.energies)
    )
    return _csv_text(["step", *labels, "energy"], rows)


def write_trace(trace: SolverTrace, path) -> None:
    Path(path).write_text(trace_csv(trace), encoding="utf-8")


def weights_csv(W: FeedforwardMatrix) -> str:
    rows = ([c] + [format_number(v) for v in row] for c, row in zip(W.class_labels, W.entries))
    return _csv_text(["class", *W.feature_labels], rows)


def write_weights(W: FeedforwardMatrix, path) -> None:
    Path(path).write_text(weights_csv(W), encoding="utf-8")


def read_weights(path) -> FeedforwardMatrix:
    rows = list(csv.reader(Path(path).read_text(encoding="utf-8").splitlines()))
    header, body = rows[0], rows[1:]
    return FeedforwardMatrix(
        [[float(v) for v in r[1:]] for r in body], header[1:], [r[0] for r in body]
    )


EXPERIMENT_COLUMNS = (
    "i",
    "j",
    "similarity",
    "condition_number",
    "iterations_ls",
    "iterations_rf",
    "converged_ls",
    "converged_rf",
    "singular",
)


def _flag(b: bool) -> str:
    return "true" if b else "false"


def experiment_csv(results: Sequence[PairExperimentResult]) -> str:
    rows = (
        [
            str(r.i),
            str(r.j),
            format_number(r.similarity),
            format_number(r.condition_number),
            format_number(r.iterations_ls),
            format_number(r.iterations_rf),
            _flag(r.converged_ls),
            _flag(r.converged_rf),
            _flag(r.singular),
        ]
        for r in results
    )
    return _csv_text(EXPERIMENT_COLUMNS, rows)


def write_experiment(results: Sequence[PairExperimentResult], path) -> None:
    Path(path).write_text(experiment_csv(results), encoding="utf-8")


def read_experiment(path) -> list[PairExperimentResult]:
    reader = csv.DictReader(_io.StringIO(Path(path).read_text(encoding="utf-8")))
    return [
        PairExperimentResult(
            i=int(row["i"]),
            j=int(row["j"]),
            similarity=float(row["similarity"]),
            condition_number=float(row["condition_number"]),
            iterations_ls=float(row["iterations_ls"]),
            iterations_rf=float(row["iterations_rf"]),
            converged_ls=row["converged_ls"] == "true",
            converged_rf=row["converged_rf"] == "true",
        )
        for row in reader
    ]
