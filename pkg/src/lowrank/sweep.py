"""Multi-trial accuracy sweeps over rank and iteration count.

For each requested rank the sweep runs the randomized decomposition over a
batch of derived seeds at every iteration count, then appends one baseline
row built from the truncated exact SVD. Only the decomposition itself is
timed; error measurement happens outside the clock. The baseline's error
is not measured at all: a rank-``k`` truncation's spectral error equals
the first dropped singular value by the optimality of truncation, so its
normalized error is 1 by definition (the raw value is the dropped singular
value itself). Measuring it with the iterative estimator would only add
estimator noise to a known quantity.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .decomposition import (
    RsiConfig,
    normalized_spectral_error,
    rsi,
    split_factors,
    truncate_svd,
)
from .errors import ParameterError
from .matrix import SvdFactors, exact_svd, spectral_norm
from .validation import as_matrix, check_positive_int, check_seed

__all__ = ["SweepConfig", "SweepRow", "run_sweep"]

# Reference singular values at or below this fraction of the top one are
# treated as zero: the normalized metric is undefined there.
_DEGENERATE_RTOL = 1e-12

BASELINE_ITERATIONS = 0


@dataclass(frozen=True)
class SweepConfig:
    """Grid and measurement settings for one sweep."""

    ranks: tuple[int, ...]
    iteration_counts: tuple[int, ...]
    trials: int = 20
    seed: int = 0
    rel_tol: float = 1e-6

    def __post_init__(self):
        if not self.ranks:
            raise ParameterError("sweep needs at least one rank")
        if not self.iteration_counts:
            raise ParameterError("sweep needs at least one iteration count")
        for rank in self.ranks:
            check_positive_int(rank, "rank")
        for count in self.iteration_counts:
            check_positive_int(count, "iteration count")
        check_positive_int(self.trials, "trials")
        check_seed(self.seed)


@dataclass(frozen=True)
class SweepRow:
    """Aggregated result for one (rank, iteration count) cell.

    ``iterations == 0`` marks the exact-SVD baseline row. ``metric`` is
    ``"normalized"`` in the usual case; when the reference singular value
    vanishes (the matrix already has the target rank) the row reports the
    raw spectral error instead and says so with ``"raw"``.
    """

    rank: int
    iterations: int
    mean_error: float
    std_error: float
    mean_wall_time: float
    metric: str


def run_sweep(w, config: SweepConfig, reference: SvdFactors | None = None) -> list[SweepRow]:
    """Run the full grid. Rows are ordered by rank, then iteration count,
    with each rank's baseline row last.

    ``reference`` lets the caller reuse an exact SVD computed once; it is
    computed here otherwise. Trial seeds derive from ``config.seed`` XOR
    the trial index, so results do not depend on execution order.
    """
    w = as_matrix(w, "w")
    limit = min(w.shape)
    for rank in config.ranks:
        if rank > limit:
            raise ParameterError(f"rank {rank} exceeds min(rows, cols) = {limit}")
    if reference is None:
        reference = exact_svd(w)
    top = float(reference.s[0]) if reference.rank else 0.0
    rows = []
    for rank in config.ranks:
        reference_sv = float(reference.s[rank]) if rank < reference.rank else 0.0
        degenerate = reference_sv <= _DEGENERATE_RTOL * top
        metric = "raw" if degenerate else "normalized"
        for iterations in config.iteration_counts:
            values = []
            timings = []
            for trial in range(config.trials):
                trial_config = RsiConfig(
                    rank=rank, iterations=iterations, seed=config.seed ^ trial
                )
                start = time.perf_counter()
                factors = rsi(w, trial_config)
                timings.append(time.perf_counter() - start)
                values.append(
                    _error_value(w, split_factors(factors), reference_sv, degenerate, config.rel_tol)
                )
            rows.append(
                SweepRow(
                    rank=rank,
                    iterations=iterations,
                    mean_error=statistics.fmean(values),
                    std_error=statistics.pstdev(values),
                    mean_wall_time=statistics.fmean(timings),
                    metric=metric,
                )
            )
        start = time.perf_counter()
        baseline = split_factors(truncate_svd(reference, rank))
        baseline.product()
        elapsed = time.perf_counter() - start
        rows.append(
            SweepRow(
                rank=rank,
                iterations=BASELINE_ITERATIONS,
                mean_error=reference_sv if degenerate else 1.0,
                std_error=0.0,
                mean_wall_time=elapsed,
                metric=metric,
            )
        )
    return rows


def _error_value(w, pair, reference_sv, degenerate, rel_tol):
    if degenerate:
        return spectral_norm(w - pair.product(), rel_tol)
    report = normalized_spectral_error(w, pair, reference_sv, rel_tol)
    return report.normalized_error
