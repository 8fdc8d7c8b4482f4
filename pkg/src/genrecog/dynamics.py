"""Feedforward-feedback solvers iterating Y toward the fixed points of M Y = X.

Both solvers are explicit Euler integrations with a fixed step, because the
number of discrete iterations is itself a measured quantity.

* least squares: ``Y <- Y + dt * M^T (X - M Y)``, gradient descent on
  ``E = ||X - M Y||^2``;
* regulatory feedback: ``Y_i <- Y_i + dt * (Y_i / V_i * sum_k M_ki X_k / (M Y)_k - Y_i)``
  with ``V_i`` the column sums of M. Multiplicative, so activations stay
  positive.
"""

from __future__ import annotations

import enum

import numpy as np

from .core import (
    DimensionError,
    DivergenceError,
    ExpectationMatrix,
    NonPositiveActivationError,
    SolverConfig,
    SolverTrace,
    StopReason,
    UnreachableClassError,
)

DEFAULT_SEED = 1e-4


class SolverKind(str, enum.Enum):
    LEAST_SQUARES = "ls"
    REGULATORY_FEEDBACK = "rf"


def _matrix(M) -> tuple[np.ndarray, tuple]:
    if isinstance(M, ExpectationMatrix):
        return M.entries, M.class_labels
    arr = np.asarray(M, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"M must be 2-dimensional, got shape {arr.shape}")
    return arr, tuple(f"y{i + 1}" for i in range(arr.shape[1]))


def _vector(v, length: int, name: str, dim_name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise DimensionError(f"{name} must have length {dim_name}={length}, got shape {arr.shape}")
    return arr


def _checked(M, X, Y):
    m, labels = _matrix(M)
    n, h = m.shape
    x = _vector(X, n, "X", "N")
    y = _vector(Y, h, "Y", "H")
    return m, x, y, labels


def energy(M, X, Y) -> float:
    """Squared reconstruction residual ``||X - M Y||^2``."""
    m, x, y, _ = _checked(M, X, Y)
    r = x - m @ y
    return float(r @ r)


def least_squares_step(M, X, Y, dt: float) -> np.ndarray:
    m, x, y, _ = _checked(M, X, Y)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    return y + dt * (m.T @ (x - m @ y))


def _column_sums(m: np.ndarray, labels) -> np.ndarray:
    v = m.sum(axis=0)
    bad = np.nonzero(~(v > 0))[0]
    if bad.size:
        raise UnreachableClassError(labels[bad[0]])
    return v


def _check_rf_dt(dt: float):
    if not 0 < dt <= 1:
        raise ValueError(f"regulatory feedback requires 0 < dt <= 1, got {dt!r}")


def _check_positive(y: np.ndarray, labels):
    bad = np.nonzero(~(y > 0))[0]
    if bad.size:
        raise NonPositiveActivationError(
            f"regulatory feedback needs strictly positive activations; "
            f"class {labels[bad[0]]!r} has {y[bad[0]]!r}"
        )


def _rf_update(m, x, y, v, dt, eps):
    recon = np.maximum(m @ y, eps)
    y_new = y + dt * (y / v * (m.T @ (x / recon)) - y)
    # dt == 1 can drive a class with no supported input to exactly zero
    return np.maximum(y_new, eps)


def regulatory_feedback_step(M, X, Y, dt: float = 1.0, epsilon_floor: float = 1e-12) -> np.ndarray:
    """One regulatory-feedback Euler step.

    Reconstructions ``(M Y)_k`` below ``epsilon_floor`` are clamped before
    dividing, and the returned activations are floored at ``epsilon_floor``
    so the multiplicative dynamics never reach an unrecoverable zero.
    """
    m, x, y, labels = _checked(M, X, Y)
    _check_rf_dt(dt)
    if not epsilon_floor > 0:
        raise ValueError("epsilon_floor must be positive")
    v = _column_sums(m, labels)
    _check_positive(y, labels)
    return _rf_update(m, x, y, v, dt, epsilon_floor)


def default_dt(M, kind: SolverKind) -> float:
    """Step used when ``SolverConfig.dt`` is None."""
    kind = SolverKind(kind)
    if kind is SolverKind.REGULATORY_FEEDBACK:
        return 1.0
    m, _ = _matrix(M)
    top = np.linalg.norm(m, 2) ** 2
    return 1.0 / top if top > 0 else 1.0


def initial_activations(h: int, seed: float = DEFAULT_SEED) -> np.ndarray:
    return np.full(h, seed)


def solve(
    M,
    X,
    Y0=None,
    kind: SolverKind = SolverKind.REGULATORY_FEEDBACK,
    config: SolverConfig | None = None,
    target: int | None = None,
) -> tuple[np.ndarray, SolverTrace]:
    """Iterate one solver from ``Y0`` until it stops.

    Stops at the first of: the designated ``target`` class reaching
    ``config.target_threshold`` (when both are set); ``||dY||_inf`` below
    ``config.convergence_tol``; ``config.max_iterations`` steps. Every
    iterate and its energy is recorded in the returned trace.

    Raises DivergenceError if the iteration blows up.
    """
    kind = SolverKind(kind)
    config = config or SolverConfig()
    m, labels = _matrix(M)
    n, h = m.shape
    x = _vector(X, n, "X", "N")
    y = initial_activations(h) if Y0 is None else _vector(Y0, h, "Y0", "H").copy()
    dt = config.dt if config.dt is not None else default_dt(m, kind)

    threshold = config.target_threshold
    if threshold is not None:
        if target is None:
            raise ValueError("target_threshold is set but no target class was given")
        if not 0 <= target < h:
            raise DimensionError(f"target class index {target} out of range for H={h}")

    if kind is SolverKind.REGULATORY_FEEDBACK:
        _check_rf_dt(dt)
        v = _column_sums(m, labels)
        _check_positive(y, labels)
        eps = config.epsilon_floor

        def step(y):
            return _rf_update(m, x, y, v, dt, eps)
    else:
        mt = m.T

        def step(y):
            return y + dt * (mt @ (x - m @ y))

    def residual_energy(y):
        with np.errstate(over="ignore", invalid="ignore"):
            r = x - m @ y
            return float(r @ r)

    ys = [y.copy()]
    es = [residual_energy(y)]
    tol = config.convergence_tol
    reason = StopReason.MAX_ITERATIONS
    for _ in range(int(config.max_iterations)):
        with np.errstate(over="ignore", invalid="ignore"):
            y_new = step(y)
        if not np.all(np.isfinite(y_new)):
            raise DivergenceError(
                f"{kind.name.lower()} iteration diverged after {len(ys) - 1} steps with dt={dt!r}"
            )
        change = float(np.max(np.abs(y_new - y))) if h else 0.0
        y = y_new
        ys.append(y)
        es.append(residual_energy(y))
        if threshold is not None and y[target] >= threshold:
            reason = StopReason.TARGET_THRESHOLD
            break
        if change < tol:
            reason = StopReason.TOLERANCE
            break

    trace = SolverTrace(
        steps=np.arange(len(ys)),
        activations=np.array(ys),
        energies=np.array(es),
        stop_reason=reason,
        dt=float(dt),
        class_labels=labels,
    )
    return y, trace
