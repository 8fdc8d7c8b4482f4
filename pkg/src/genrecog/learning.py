"""One-shot expectation learning and localized online edits of M.

Every edit returns a new matrix; untouched entries are copied bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DimensionError,
    ExpectationMatrix,
    InvalidMatrixError,
    UnreachableClassError,
    validate,
)


@dataclass(frozen=True)
class LabeledDataset:
    exemplars: list[tuple[np.ndarray, str]]
    feature_labels: tuple[str, ...]

    def __post_init__(self):
        n = len(self.feature_labels)
        rows = []
        for idx, (vec, label) in enumerate(self.exemplars):
            vec = np.asarray(vec, dtype=np.float64)
            if vec.shape != (n,):
                raise DimensionError(f"exemplar {idx} has shape {vec.shape}, expected ({n},)")
            if not isinstance(label, str) or not label:
                raise ValueError(f"exemplar {idx} has an empty label")
            rows.append((vec, label))
        object.__setattr__(self, "exemplars", rows)
        object.__setattr__(self, "feature_labels", tuple(self.feature_labels))

    @property
    def class_labels(self) -> tuple[str, ...]:
        """Labels in order of first appearance."""
        return tuple(dict.fromkeys(label for _, label in self.exemplars))


def learn_expectations(data: LabeledDataset) -> ExpectationMatrix:
    """Average the exemplars of each class into one column of M.

    Sums run in dataset order so a given dataset always yields the same bits.
    """
    if not data.exemplars:
        raise ValueError("dataset has no exemplars")
    classes = data.class_labels
    index = {c: i for i, c in enumerate(classes)}
    sums = np.zeros((len(data.feature_labels), len(classes)))
    counts = np.zeros(len(classes))
    for vec, label in data.exemplars:
        i = index[label]
        sums[:, i] += vec
        counts[i] += 1
    means = sums / counts
    for i, c in enumerate(classes):
        if not np.any(means[:, i] > 0):
            raise UnreachableClassError(c)
    matrix = ExpectationMatrix(means, data.feature_labels, classes)
    violations = validate(matrix)
    if violations:
        raise InvalidMatrixError(violations)
    return matrix


def add_class(M: ExpectationMatrix, label: str, expectations) -> ExpectationMatrix:
    if label in M.class_labels:
        raise ValueError(f"class {label!r} already exists")
    col = np.asarray(expectations, dtype=np.float64)
    if col.shape != (M.n_features,):
        raise DimensionError(f"expectations for {label!r} must have length {M.n_features}, got {col.shape}")
    if not np.all(np.isfinite(col)) or np.any(col < 0):
        raise ValueError(f"expectations for {label!r} must be finite and nonnegative")
    if not np.any(col > 0):
        raise UnreachableClassError(label)
    entries = np.empty((M.n_features, M.n_classes + 1))
    entries[:, :-1] = M.entries
    entries[:, -1] = col
    return ExpectationMatrix(entries, M.feature_labels, M.class_labels + (label,))


def set_expectation(M: ExpectationMatrix, class_label: str, feature_label: str, value: float) -> ExpectationMatrix:
    i = M.class_index(class_label)
    k = M.feature_index(feature_label)
    value = float(value)
    if not (np.isfinite(value) and value >= 0):
        raise ValueError(f"expectation must be finite and nonnegative, got {value!r}")
    entries = M.entries.copy()
    entries[k, i] = value
    if not np.any(entries[:, i] > 0):
        raise UnreachableClassError(class_label)
    return ExpectationMatrix(entries, M.feature_labels, M.class_labels)


def remove_class(M: ExpectationMatrix, label: str) -> ExpectationMatrix:
    i = M.class_index(label)
    if M.n_classes == 1:
        raise ValueError(f"cannot remove {label!r}: it is the only class")
    keep = [j for j in range(M.n_classes) if j != i]
    return ExpectationMatrix(
        M.entries[:, keep], M.feature_labels, tuple(M.class_labels[j] for j in keep)
    )


@dataclass(frozen=True)
class EditReport:
    changed_entries: list[tuple[str, str]] = field(default_factory=list)
    added_classes: list[str] = field(default_factory=list)
    removed_classes: list[str] = field(default_factory=list)

    @property
    def n_changed(self) -> int:
        return len(self.changed_entries)

    def lines(self) -> list[str]:
        out = [f"added class {c}" for c in self.added_classes]
        out += [f"removed class {c}" for c in self.removed_classes]
        out += [f"changed entry class={c} feature={f}" for c, f in self.changed_entries]
        return out or ["no entries changed"]


def edit_report(before: ExpectationMatrix, after: ExpectationMatrix) -> EditReport:
    """Which stored entries an edit touched. Shared entries are compared bitwise."""
    if before.feature_labels != after.feature_labels:
        raise DimensionError("edit report needs matching feature labels")
    changed = []
    for c in before.class_labels:
        if c not in after.class_labels:
            continue
        b = np.ascontiguousarray(before.column(c))
        a = np.ascontiguousarray(after.column(c))
        same = b.view(np.uint64) == a.view(np.uint64)
        changed += [(c, before.feature_labels[k]) for k in np.nonzero(~same)[0]]
    return EditReport(
        changed_entries=changed,
        added_classes=[c for c in after.class_labels if c not in before.class_labels],
        removed_classes=[c for c in before.class_labels if c not in after.class_labels],
    )
