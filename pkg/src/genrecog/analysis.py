"""Pattern similarity, conditioning, and the iterations-to-threshold experiment.

Two patterns form a two-class expectation matrix. Each pattern is then
presented with its own class seeded small (1e-4) and the rival class at 1.
The difficulty of the pair is the mean number of iterations until the
correct activation reaches the threshold (0.9 by default). Similar pairs
are badly conditioned and take longer.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DimensionError, ExpectationMatrix, GenrecogError, SolverConfig, StopReason
from .dynamics import SolverKind, solve

SINGULAR_RTOL = 1e-12
DEFAULT_THRESHOLD = 0.9
SEED_ACTIVATION = 1e-4


class SingularPairError(GenrecogError, ArithmeticError):
    pass


def similarity(p1, p2) -> float:
    """Shared amplitude over total coverage: ``sum(min) / sum(max)``."""
    a = np.asarray(p1, dtype=np.float64)
    b = np.asarray(p2, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"patterns must be 1-d of equal length, got {a.shape} and {b.shape}")
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("similarity is defined for nonnegative patterns only")
    cover = np.maximum(a, b).sum()
    if cover == 0:
        raise ValueError("similarity is undefined when both patterns are all zero")
    return float(np.minimum(a, b).sum() / cover)


def condition_number(M) -> float:
    """Spectral condition number ``sigma_max / sigma_min`` of M.

    Returns ``math.inf`` as the singular flag when ``sigma_min < 1e-12 *
    sigma_max`` or when M has more classes than features.
    """
    m = M.entries if isinstance(M, ExpectationMatrix) else np.asarray(M, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] < 1:
        raise DimensionError(f"condition number needs an N x H matrix with H >= 1, got {m.shape}")
    if m.shape[1] > m.shape[0]:
        return math.inf
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0 or s[-1] < SINGULAR_RTOL * s[0]:
        return math.inf
    return float(s[0] / s[-1])


def pair_matrix(p1, p2) -> np.ndarray:
    return np.column_stack([np.asarray(p1, dtype=np.float64), np.asarray(p2, dtype=np.float64)])


@dataclass(frozen=True)
class PairIterations:
    mean_iterations: float
    converged: bool
    counts: tuple[int, int]


def pair_iteration_experiment(p1, p2, kind: SolverKind, config: SolverConfig | None = None) -> PairIterations:
    """Mean iterations to threshold over both presentation orders.

    A presentation that hits ``max_iterations`` (or settles below threshold)
    counts as ``max_iterations`` and marks the pair unconverged.
    """
    config = config or SolverConfig()
    if config.target_threshold is None:
        config = dataclasses.replace(config, target_threshold=DEFAULT_THRESHOLD)
    m = pair_matrix(p1, p2)
    if math.isinf(condition_number(m)):
        raise SingularPairError("pattern pair is linearly dependent; difficulty is unbounded")

    counts = []
    converged = True
    for target, y0 in ((0, [SEED_ACTIVATION, 1.0]), (1, [1.0, SEED_ACTIVATION])):
        _, trace = solve(m, m[:, target], np.array(y0), kind, config, target=target)
        if trace.stop_reason is StopReason.TARGET_THRESHOLD:
            counts.append(trace.n_iterations)
        else:
            converged = False
            counts.append(int(config.max_iterations))
    return PairIterations(sum(counts) / 2, converged, (counts[0], counts[1]))


@dataclass(frozen=True)
class PairExperimentResult:
    i: int
    j: int
    similarity: float
    condition_number: float
    iterations_ls: float
    iterations_rf: float
    converged_ls: bool
    converged_rf: bool

    @property
    def singular(self) -> bool:
        return math.isinf(self.condition_number)


def sweep_all_pairs(patterns: Sequence, config: SolverConfig | None = None) -> list[PairExperimentResult]:
    """Run both solvers on every unordered pattern pair.

    Linearly dependent pairs are kept with ``condition_number=inf`` and NaN
    iteration counts. Results are sorted by similarity, ties by ``(i, j)``.
    """
    pats = [np.asarray(p, dtype=np.float64) for p in patterns]
    if len(pats) < 2:
        raise ValueError("need at least two patterns")
    n = pats[0].shape
    for idx, p in enumerate(pats):
        if p.shape != n or p.ndim != 1:
            raise DimensionError(f"pattern {idx} has shape {p.shape}, expected {n}")

    results = []
    for i, j in itertools.combinations(range(len(pats)), 2):
        sim = similarity(pats[i], pats[j])
        kappa = condition_number(pair_matrix(pats[i], pats[j]))
        if math.isinf(kappa):
            results.append(PairExperimentResult(i, j, sim, kappa, math.nan, math.nan, False, False))
            continue
        ls = pair_iteration_experiment(pats[i], pats[j], SolverKind.LEAST_SQUARES, config)
        rf = pair_iteration_experiment(pats[i], pats[j], SolverKind.REGULATORY_FEEDBACK, config)
        results.append(
            PairExperimentResult(
                i, j, sim, kappa, ls.mean_iterations, rf.mean_iterations, ls.converged, rf.converged
            )
        )
    results.sort(key=lambda r: (r.similarity, r.i, r.j))
    return results


def _ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    start = 0
    while start < len(values):
        stop = start
        while stop + 1 < len(values) and sorted_vals[stop + 1] == sorted_vals[start]:
            stop += 1
        ranks[order[start : stop + 1]] = (start + stop) / 2 + 1
        start = stop + 1
    return ranks


def rank_correlation(a, b) -> float:
    """Spearman correlation: Pearson correlation of tie-averaged ranks."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError("rank correlation needs two 1-d series of equal length")
    ra = _ranks(a) - (len(a) + 1) / 2
    rb = _ranks(b) - (len(b) + 1) / 2
    denom = math.sqrt(float(ra @ ra) * float(rb @ rb))
    return float(ra @ rb) / denom if denom > 0 else math.nan


@dataclass(frozen=True)
class SweepSummary:
    n_pairs: int
    n_used: int
    rho_iterations_ls: float
    rho_iterations_rf: float
    rho_condition: float


def summarize(results: Sequence[PairExperimentResult]) -> SweepSummary:
    """Rank correlations against similarity, over non-singular pairs where both solvers converged."""
    used = [r for r in results if not r.singular and r.converged_ls and r.converged_rf]
    sim = [r.similarity for r in used]
    if len(used) < 2:
        return SweepSummary(len(results), len(used), math.nan, math.nan, math.nan)
    return SweepSummary(
        n_pairs=len(results),
        n_used=len(used),
        rho_iterations_ls=rank_correlation(sim, [r.iterations_ls for r in used]),
        rho_iterations_rf=rank_correlation(sim, [r.iterations_rf for r in used]),
        rho_condition=rank_correlation(sim, [r.condition_number for r in used]),
    )


def random_patterns(count: int = 26, dim: int = 512, seed: int = 0, kind: str = "composite") -> np.ndarray:
    """Seeded random patterns with entries in [0, 1], one per row.

    ``kind="composite"`` builds each pattern as the elementwise max of 3 to 5
    distinct sparse random parts drawn from a shared pool of 14, so pairs
    that share parts overlap strongly and similarities spread widely.
    ``kind="uniform"`` draws i.i.d. uniform entries.
    """
    if count < 1 or dim < 1:
        raise ValueError("count and dim must be positive")
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        return rng.uniform(0.0, 1.0, size=(count, dim))
    if kind != "composite":
        raise ValueError(f"unknown pattern kind {kind!r}")

    n_parts, density = 14, 0.08
    n_subsets = sum(math.comb(n_parts, k) for k in (3, 4, 5))
    if count > n_subsets:
        raise ValueError(f"composite generator supports at most {n_subsets} patterns")
    parts = (rng.uniform(size=(n_parts, dim)) < density) * rng.uniform(0.5, 1.0, size=(n_parts, dim))
    for row in parts:
        if not row.any():
            row[rng.integers(dim)] = rng.uniform(0.5, 1.0)

    chosen: list[tuple[int, ...]] = []
    seen = set()
    while len(chosen) < count:
        k = int(rng.integers(3, 6))
        subset = tuple(sorted(int(s) for s in rng.choice(n_parts, size=k, replace=False)))
        if subset not in seen:
            seen.add(subset)
            chosen.append(subset)
    return np.array([parts[list(s)].max(axis=0) for s in chosen])


def blend_path(p1, p_other, ts: Sequence[float]) -> list[np.ndarray]:
    """Patterns ``(1 - t) * p_other + t * p1``, growing more similar to p1 with t."""
    a = np.asarray(p1, dtype=np.float64)
    b = np.asarray(p_other, dtype=np.float64)
    return [(1.0 - t) * b + t * a for t in ts]
