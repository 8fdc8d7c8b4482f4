"""Feedforward baseline: W derived from M by pseudoinverse, one-pass Y = W X."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import DimensionError, ExpectationMatrix, FeedforwardMatrix, SingularMatrixError

RANK_RTOL = 1e-10
NORMAL_EQUATIONS_MAX_COND = 1e8
CHANGE_ATOL = 1e-9


def _as_expectation(M) -> ExpectationMatrix:
    return M if isinstance(M, ExpectationMatrix) else ExpectationMatrix(M)


def _near_dependent_classes(vt_last: np.ndarray, labels) -> list:
    weights = np.abs(vt_last)
    return [labels[i] for i in np.nonzero(weights > 0.1 * weights.max())[0]]


def pseudoinverse(M) -> FeedforwardMatrix:
    """Left inverse ``W = (M^T M)^{-1} M^T`` of a full-column-rank M.

    The normal equations are solved by Cholesky factorisation. When
    ``cond(M^T M)`` exceeds 1e8 the SVD is used instead.

    Raises
    ------
    SingularMatrixError
        If ``sigma_min < 1e-10 * sigma_max``; ``dependent_classes`` lists the
        classes carrying the null direction.
    """
    M = _as_expectation(M)
    m = M.entries
    n, h = m.shape
    if h > n:
        raise SingularMatrixError(
            f"{h} classes but only {n} features: M cannot have full column rank",
            list(M.class_labels),
        )
    _, s, vt = np.linalg.svd(m, full_matrices=False)
    if s[-1] < RANK_RTOL * s[0]:
        dependent = _near_dependent_classes(vt[-1], M.class_labels)
        raise SingularMatrixError(
            "expectation matrix is rank deficient; near-dependent classes: "
            + ", ".join(map(str, dependent)),
            dependent,
        )
    if (s[0] / s[-1]) ** 2 > NORMAL_EQUATIONS_MAX_COND:
        w = np.linalg.pinv(m)
    else:
        gram = scipy.linalg.cho_factor(m.T @ m)
        w = scipy.linalg.cho_solve(gram, m.T)
    return FeedforwardMatrix(w, M.feature_labels, M.class_labels)


def naive_weights(M) -> FeedforwardMatrix:
    """Expectations reused directly as feedforward weights (W0 = rows of M)."""
    M = _as_expectation(M)
    return FeedforwardMatrix(M.rows, M.feature_labels, M.class_labels)


def classify_feedforward(W, X) -> np.ndarray:
    w = W.entries if isinstance(W, FeedforwardMatrix) else np.asarray(W, dtype=np.float64)
    x = np.asarray(X, dtype=np.float64)
    if w.ndim != 2 or x.ndim != 1 or w.shape[1] != x.shape[0]:
        raise DimensionError(f"W has shape {w.shape} but X has shape {x.shape}")
    return w @ x


@dataclass(frozen=True)
class WeightChange:
    n_changed: int
    n_compared: int
    max_abs_change: float
    shape_before: tuple[int, int]
    shape_after: tuple[int, int]

    @property
    def fraction_changed(self) -> float:
        return self.n_changed / self.n_compared if self.n_compared else 0.0

    @property
    def shape_changed(self) -> bool:
        return self.shape_before != self.shape_after


def _aligned(before, after):
    if isinstance(before, FeedforwardMatrix) and isinstance(after, FeedforwardMatrix):
        rows = [c for c in before.class_labels if c in after.class_labels]
        cols = [f for f in before.feature_labels if f in after.feature_labels]
        rb = [before.class_labels.index(c) for c in rows]
        ra = [after.class_labels.index(c) for c in rows]
        cb = [before.feature_labels.index(f) for f in cols]
        ca = [after.feature_labels.index(f) for f in cols]
        return before.entries[np.ix_(rb, cb)], after.entries[np.ix_(ra, ca)]
    b = before.entries if isinstance(before, FeedforwardMatrix) else np.asarray(before, float)
    a = after.entries if isinstance(after, FeedforwardMatrix) else np.asarray(after, float)
    h = min(b.shape[0], a.shape[0])
    n = min(b.shape[1], a.shape[1])
    return b[:h, :n], a[:h, :n]


def weight_change_report(W_before, W_after) -> WeightChange:
    """Summarise how many entries differ by more than 1e-9.

    Labelled matrices are compared on their shared classes and features;
    raw arrays on the overlapping top-left block.
    """
    b, a = _aligned(W_before, W_after)
    diff = np.abs(a - b)
    shape = lambda w: tuple((w.entries if isinstance(w, FeedforwardMatrix) else np.asarray(w)).shape)
    return WeightChange(
        n_changed=int(np.count_nonzero(diff > CHANGE_ATOL)),
        n_compared=int(diff.size),
        max_abs_change=float(diff.max()) if diff.size else 0.0,
        shape_before=shape(W_before),
        shape_after=shape(W_after),
    )
