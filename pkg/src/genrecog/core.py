"""Shared domain types: expectation and feedforward matrices, solver config and traces."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class GenrecogError(Exception):
    """Base class for all library errors."""


class DimensionError(GenrecogError, ValueError):
    pass


class InvalidMatrixError(GenrecogError, ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnreachableClassError(GenrecogError, ValueError):
    """A class has zero expectation on every feature."""

    def __init__(self, label):
        self.label = label
        super().__init__(f"class {label!r} has no positive expectation and is unreachable")


class LabelError(GenrecogError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class SingularMatrixError(GenrecogError, ArithmeticError):
    def __init__(self, message: str, dependent_classes: Sequence = ()):
        self.dependent_classes = list(dependent_classes)
        super().__init__(message)


class NonPositiveActivationError(GenrecogError, ValueError):
    pass


class DivergenceError(GenrecogError, ArithmeticError):
    """Iteration produced non-finite activations (step size too large)."""


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _default_labels(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{k + 1}" for k in range(n))


@dataclass(frozen=True, eq=False)
class ExpectationMatrix:
    """Fixed-point store M, stored features x classes (N x H).

    ``entries[k, i]`` is the expected amplitude of feature ``k`` when class ``i``
    is present. The human-readable display form (and the file format) is the
    transpose, one row per class; see :attr:`rows` and :meth:`from_rows`.

    Construction only checks shapes. Content invariants are reported by
    :func:`validate` and enforced by :meth:`check`.
    """

    entries: np.ndarray
    feature_labels: tuple[str, ...] = None
    class_labels: tuple[str, ...] = None

    def __post_init__(self):
        entries = _frozen_array(self.entries, 2, "expectation matrix")
        n, h = entries.shape
        object.__setattr__(self, "entries", entries)
        feats = tuple(self.feature_labels) if self.feature_labels is not None else _default_labels("x", n)
        classes = tuple(self.class_labels) if self.class_labels is not None else _default_labels("y", h)
        if len(feats) != n:
            raise DimensionError(f"expected {n} feature labels, got {len(feats)}")
        if len(classes) != h:
            raise DimensionError(f"expected {h} class labels, got {len(classes)}")
        object.__setattr__(self, "feature_labels", feats)
        object.__setattr__(self, "class_labels", classes)

    @classmethod
    def from_rows(cls, rows, feature_labels=None, class_labels=None) -> "ExpectationMatrix":
        """Build from the classes-as-rows display form."""
        rows = np.array(rows, dtype=np.float64)
        if rows.ndim != 2:
            raise DimensionError(f"rows must be 2-dimensional, got shape {rows.shape}")
        return cls(rows.T, feature_labels, class_labels)

    @property
    def rows(self) -> np.ndarray:
        """Classes-as-rows display form (H x N)."""
        return self.entries.T

    @property
    def n_features(self) -> int:
        return self.entries.shape[0]

    @property
    def n_classes(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def class_index(self, label) -> int:
        try:
            return self.class_labels.index(label)
        except ValueError:
            raise LabelError(f"unknown class {label!r}; known classes: {', '.join(map(str, self.class_labels))}") from None

    def feature_index(self, label) -> int:
        try:
            return self.feature_labels.index(label)
        except ValueError:
            raise LabelError(f"unknown feature {label!r}; known features: {', '.join(map(str, self.feature_labels))}") from None

    def column(self, label) -> np.ndarray:
        return self.entries[:, self.class_index(label)]

    def column_sums(self) -> np.ndarray:
        """Total expectation per class (the normaliser of regulatory feedback)."""
        return self.entries.sum(axis=0)

    def check(self) -> "ExpectationMatrix":
        violations = validate(self)
        if violations:
            raise InvalidMatrixError(violations)
        return self

    def __eq__(self, other):
        if not isinstance(other, ExpectationMatrix):
            return NotImplemented
        return (
            self.feature_labels == other.feature_labels
            and self.class_labels == other.class_labels
            and self.entries.shape == other.entries.shape
            and bool(np.array_equal(self.entries, other.entries))
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"ExpectationMatrix(features={list(self.feature_labels)}, "
            f"classes={list(self.class_labels)}, rows={self.rows.tolist()})"
        )


def validate(matrix: ExpectationMatrix) -> list[str]:
    """Return a list of invariant violations; empty when the matrix is valid."""
    problems = []
    m = matrix.entries
    n, h = m.shape
    if n < 1:
        problems.append("matrix has no features")
    if h < 1:
        problems.append("matrix has no classes")
    for labels, kind in ((matrix.class_labels, "class"), (matrix.feature_labels, "feature")):
        seen = set()
        for label in labels:
            if label in seen:
                problems.append(f"duplicate {kind} label {label!r}")
            seen.add(label)
    for k, i in zip(*np.nonzero(~np.isfinite(m))):
        problems.append(
            f"non-finite entry at feature {matrix.feature_labels[k]!r}, class {matrix.class_labels[i]!r}"
        )
    with np.errstate(invalid="ignore"):
        negative = np.isfinite(m) & (m < 0)
    for k, i in zip(*np.nonzero(negative)):
        problems.append(
            f"negative entry {m[k, i]!r} at feature {matrix.feature_labels[k]!r}, "
            f"class {matrix.class_labels[i]!r}"
        )
    for i in range(h):
        col = m[:, i]
        if not np.any(np.isfinite(col) & (col > 0)):
            problems.append(f"class {matrix.class_labels[i]!r} has no positive entry (unreachable)")
    return problems


@dataclass(frozen=True, eq=False)
class FeedforwardMatrix:
    """Feedforward weights W (classes x features), so that ``Y = W @ X``."""

    entries: np.ndarray
    feature_labels: tuple[str, ...] = None
    class_labels: tuple[str, ...] = None

    def __post_init__(self):
        entries = _frozen_array(self.entries, 2, "feedforward matrix")
        h, n = entries.shape
        object.__setattr__(self, "entries", entries)
        feats = tuple(self.feature_labels) if self.feature_labels is not None else _default_labels("x", n)
        classes = tuple(self.class_labels) if self.class_labels is not None else _default_labels("y", h)
        if len(feats) != n or len(classes) != h:
            raise DimensionError(
                f"feedforward matrix of shape {entries.shape} needs {h} class and {n} feature labels"
            )
        object.__setattr__(self, "feature_labels", feats)
        object.__setattr__(self, "class_labels", classes)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


class StopReason(str, enum.Enum):
    TOLERANCE = "tolerance"
    TARGET_THRESHOLD = "target_threshold"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class SolverConfig:
    """Iteration settings shared by both dynamic solvers.

    ``dt=None`` picks a step per solver: ``1 / ||M^T M||_2`` for least squares
    (the largest step with monotone energy descent) and 1.0 for regulatory
    feedback.
    """

    dt: float | None = None
    convergence_tol: float = 1e-9
    max_iterations: int = 100_000
    target_threshold: float | None = None
    epsilon_floor: float = 1e-12

    def __post_init__(self):
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be a positive finite number, got {self.dt!r}")
        if not self.convergence_tol > 0:
            raise ValueError(f"convergence_tol must be positive, got {self.convergence_tol!r}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be a positive integer, got {self.max_iterations!r}")
        if self.target_threshold is not None and not 0 < self.target_threshold <= 1:
            raise ValueError(f"target_threshold must lie in (0, 1], got {self.target_threshold!r}")
        if not self.epsilon_floor > 0:
            raise ValueError(f"epsilon_floor must be positive, got {self.epsilon_floor!r}")


@dataclass(frozen=True)
class SolverTrace:
    """Per-iteration record of a solve; row 0 is the initial state."""

    steps: np.ndarray
    activations: np.ndarray
    energies: np.ndarray
    stop_reason: StopReason
    dt: float
    class_labels: tuple[str, ...] = field(default=())

    @property
    def converged(self) -> bool:
        return self.stop_reason is not StopReason.MAX_ITERATIONS

    @property
    def n_iterations(self) -> int:
        return int(self.steps[-1])

    @property
    def final(self) -> np.ndarray:
        return self.activations[-1]

    def __len__(self):
        return len(self.steps)
