"""Supervised recognition by feedforward-feedback dynamics over an expectation matrix."""

from .analysis import (
    PairExperimentResult,
    SingularPairError,
    condition_number,
    pair_iteration_experiment,
    random_patterns,
    rank_correlation,
    similarity,
    sweep_all_pairs,
)
from .core import (
    DimensionError,
    DivergenceError,
    ExpectationMatrix,
    FeedforwardMatrix,
    GenrecogError,
    InvalidMatrixError,
    LabelError,
    NonPositiveActivationError,
    SingularMatrixError,
    SolverConfig,
    SolverTrace,
    StopReason,
    UnreachableClassError,
    validate,
)
from .dynamics import SolverKind, energy, least_squares_step, regulatory_feedback_step, solve
from .feedforward import classify_feedforward, naive_weights, pseudoinverse, weight_change_report
from .learning import LabeledDataset, add_class, learn_expectations, remove_class, set_expectation

__version__ = "0.1.0"
