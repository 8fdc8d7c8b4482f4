import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genrecog import (
    DimensionError,
    DivergenceError,
    ExpectationMatrix,
    NonPositiveActivationError,
    SolverConfig,
    SolverKind,
    StopReason,
    UnreachableClassError,
    energy,
    least_squares_step,
    pseudoinverse,
    regulatory_feedback_step,
    solve,
)
from genrecog.dynamics import default_dt

from oracles import energy_fd_gradient, random_instance

LS, RF = SolverKind.LEAST_SQUARES, SolverKind.REGULATORY_FEEDBACK


# --- energy ---------------------------------------------------------------

def test_energy_identity_exact():
    assert energy(np.eye(2), [1, 0], [1, 0]) == 0.0


def test_energy_bicycle_exact(m1):
    assert energy(m1, [2, 1, 1, 1], [1, 0]) == 0.0


def test_energy_unicycle_vs_bicycle(m1):
    # residual [1,0,0,1] - [2,1,1,1] = [-1,-1,-1,0]
    assert energy(m1, [1, 0, 0, 1], [1, 0]) == 3.0


def test_energy_dimension_error(m1):
    with pytest.raises(DimensionError, match="N=4"):
        energy(m1, [1, 0, 0], [1, 0])
    with pytest.raises(DimensionError, match="H=2"):
        energy(m1, [1, 0, 0, 1], [1, 0, 0])


# --- least squares step ---------------------------------------------------

def test_ls_step_identity_one_step():
    np.testing.assert_array_equal(least_squares_step(np.eye(2), [1, 0], [0, 0], dt=1.0), [1, 0])


def test_ls_step_rejects_bad_dt():
    with pytest.raises(ValueError):
        least_squares_step(np.eye(2), [1, 0], [0, 0], dt=0.0)


def test_ls_direction_matches_finite_differences(rng):
    for _ in range(20):
        M, _ = random_instance(rng, n_max=20, h_max=6)
        X = rng.uniform(0, 1, M.shape[0])
        Y = rng.uniform(-1, 1, M.shape[1])
        step = least_squares_step(M, X, Y, dt=1.0) - Y
        np.testing.assert_allclose(step, -0.5 * energy_fd_gradient(M, X, Y), rtol=1e-5, atol=1e-9)


def test_ls_unicycle_small_fixed_dt(m1):
    y, trace = solve(m1, [1, 0, 0, 1], kind=LS, config=SolverConfig(dt=0.02))
    assert trace.converged
    np.testing.assert_allclose(y, [0, 1], atol=1e-3)


def test_ls_recovers_known_solution(rng):
    M = rng.uniform(0, 1, (8, 3))
    y_star = rng.uniform(0.1, 1, 3)
    y, trace = solve(M, M @ y_star, kind=LS)
    assert trace.stop_reason is StopReason.TOLERANCE
    oracle = np.linalg.lstsq(M, M @ y_star, rcond=None)[0]
    np.testing.assert_allclose(oracle, y_star, atol=1e-12)
    np.testing.assert_allclose(y, oracle, atol=1e-6)


def test_ls_zero_input_goes_to_zero(m1):
    y, trace = solve(m1, [0, 0, 0, 0], np.array([0.3, 0.7]), kind=LS)
    assert trace.converged
    np.testing.assert_allclose(y, 0, atol=1e-6)


def test_ls_divergence_raises(m1):
    with pytest.raises(DivergenceError):
        solve(m1, [1, 0, 0, 1], kind=LS, config=SolverConfig(dt=5.0))


def test_default_dt(m1):
    assert default_dt(m1, RF) == 1.0
    lam = np.linalg.eigvalsh(m1.entries.T @ m1.entries).max()
    assert default_dt(m1, LS) == pytest.approx(1 / lam, rel=1e-12)


# --- regulatory feedback step ---------------------------------------------

def test_rf_identity_single_step_hand_iterated():
    # Y1' = 0.5 + (0.5/1 * 1 * 1/0.5 - 0.5) = 1; Y2' = 0.5 + (0.5 * 0/0.5 - 0.5) = 0 -> floor
    y = regulatory_feedback_step(np.eye(2), [1, 0], [0.5, 0.5], dt=1.0)
    assert y[0] == 1.0
    assert y[1] == 1e-12


def test_rf_identity_decays_with_small_dt():
    y = np.array([0.5, 0.5])
    history = []
    for _ in range(5):
        y = regulatory_feedback_step(np.eye(2), [1, 0], y, dt=0.5)
        history.append(y[1])
    np.testing.assert_allclose(history, 0.5 * 0.5 ** np.arange(1, 6))
    assert all(v > 0 for v in history)


def test_rf_rejects_zero_column():
    M = np.array([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(UnreachableClassError):
        regulatory_feedback_step(M, [1, 1], [0.5, 0.5])


def test_rf_rejects_nonpositive_activation(m1):
    with pytest.raises(NonPositiveActivationError):
        regulatory_feedback_step(m1, [1, 0, 0, 1], [0.0, 1.0])
    with pytest.raises(NonPositiveActivationError):
        solve(m1, [1, 0, 0, 1], np.array([0.0, 1.0]), kind=RF)


@pytest.mark.parametrize("dt", [0.0, 1.5])
def test_rf_rejects_dt(m1, dt):
    with pytest.raises(ValueError):
        regulatory_feedback_step(m1, [1, 0, 0, 1], [0.5, 0.5], dt=dt)


@pytest.mark.parametrize(
    "x, y0, expected",
    [([2, 1, 1, 1], [0.0001, 1.0], [1, 0]), ([2, 1, 1, 1], None, [1, 0]), ([1, 0, 0, 1], None, [0, 1])],
)
def test_rf_worked_examples(m1, x, y0, expected):
    y, trace = solve(m1, x, None if y0 is None else np.array(y0), kind=RF)
    assert trace.converged
    np.testing.assert_allclose(y, expected, atol=1e-3)


def test_rf_unicycle_from_default_seed(m1):
    y, trace = solve(m1, [1, 0, 0, 1], np.array([1e-4, 1e-4]), kind=RF)
    assert trace.stop_reason is StopReason.TOLERANCE
    np.testing.assert_allclose(y, [0, 1], atol=1e-3)


# --- solve bookkeeping ----------------------------------------------------

def test_trace_records_every_iterate(m1):
    y, trace = solve(m1, [1, 0, 0, 1], kind=RF)
    assert len(trace) == trace.n_iterations + 1
    assert np.all(np.diff(trace.steps) == 1)
    assert np.all(np.isfinite(trace.energies))
    np.testing.assert_array_equal(trace.activations[0], [1e-4, 1e-4])
    np.testing.assert_array_equal(trace.final, y)
    assert trace.energies[-1] == pytest.approx(energy(m1, [1, 0, 0, 1], y))


def test_max_iterations_reported_not_raised(m1):
    y, trace = solve(m1, [1, 0, 0, 1], kind=LS, config=SolverConfig(dt=0.02, max_iterations=5))
    assert trace.stop_reason is StopReason.MAX_ITERATIONS
    assert not trace.converged
    assert trace.n_iterations == 5


def test_target_threshold_stops_early(m1):
    cfg = SolverConfig(target_threshold=0.9)
    y, trace = solve(m1, [1, 0, 0, 1], np.array([1.0, 1e-4]), kind=RF, config=cfg, target=1)
    assert trace.stop_reason is StopReason.TARGET_THRESHOLD
    assert y[1] >= 0.9
    assert trace.activations[-2][1] < 0.9


def test_target_threshold_requires_target(m1):
    with pytest.raises(ValueError):
        solve(m1, [1, 0, 0, 1], kind=RF, config=SolverConfig(target_threshold=0.9))


# --- properties -----------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_energy_descent_with_safe_step(seed):
    rng = np.random.default_rng(seed)
    M, _ = random_instance(rng, n_max=30, h_max=8)
    X = rng.uniform(0, 1, M.shape[0])
    dt = 1.0 / np.linalg.norm(M.T @ M, 2)
    _, trace = solve(M, X, kind=LS, config=SolverConfig(dt=dt, max_iterations=3000))
    slack = 1e-12 * trace.energies[0]
    assert np.all(np.diff(trace.energies) <= slack)


@given(seeds)
def test_rf_stays_positive(seed):
    rng = np.random.default_rng(seed)
    M, _ = random_instance(rng, n_max=20, h_max=6)
    M[rng.uniform(size=M.shape) < 0.3] = 0.0
    M[0] = np.maximum(M[0], 0.05)  # keep every column reachable
    X = rng.uniform(0, 1, M.shape[0]) * (rng.uniform(size=M.shape[0]) < 0.7)
    dt = float(rng.uniform(0.05, 1.0))
    _, trace = solve(M, X, kind=RF, config=SolverConfig(dt=dt, max_iterations=2000))
    assert np.all(trace.activations > 0)


@settings(max_examples=25)
@given(seeds)
def test_fixed_points_agree(seed):
    rng = np.random.default_rng(seed)
    M, y_star = random_instance(rng, n_max=24, h_max=6, n_min=12)
    X = M @ y_star
    y_ls, t_ls = solve(M, X, kind=LS)
    y_rf, t_rf = solve(M, X, kind=RF)
    if not (t_ls.converged and t_rf.converged):
        return
    w_x = pseudoinverse(M).entries @ X
    np.testing.assert_allclose(y_ls, y_star, atol=1e-4)
    np.testing.assert_allclose(y_rf, y_star, atol=1e-4)
    np.testing.assert_allclose(y_ls, y_rf, atol=1e-4)
    np.testing.assert_allclose(y_ls, w_x, atol=1e-5)
