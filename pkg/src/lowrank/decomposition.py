"""Randomized low-rank decomposition.

The core routine sketches the row space with a seeded Gaussian matrix and
alternates multiplications by the matrix and its transpose, orthonormalizing
the column-side iterate each pass. One pass is the plain randomized SVD;
more passes sharpen the captured subspace on slowly decaying spectra. The
module also houses factor splitting, hard truncation of an exact SVD, and
the normalized spectral-error metric used to compare the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError, ShapeError
from .matrix import SvdFactors, exact_svd, gaussian_matrix, qr_orthonormalize, spectral_norm
from .validation import as_matrix, as_vector, check_positive_int, check_seed

__all__ = [
    "RsiConfig",
    "LowRankFactors",
    "ApproximationReport",
    "rsi",
    "rsvd",
    "truncate_svd",
    "split_factors",
    "raw_power_iterate",
    "normalized_spectral_error",
]

# Condition estimate above which the optional stabilizer re-orthonormalizes.
_STABILIZE_CONDITION = 1e12


@dataclass(frozen=True)
class RsiConfig:
    """Settings for one randomized decomposition run.

    ``iterations=1`` is the single-pass randomized SVD. ``oversample``
    widens the sketch by extra columns that are dropped after the final
    small SVD, trading work for accuracy. ``stabilize`` re-orthonormalizes
    the row-side iterate between passes when its condition estimate exceeds
    1e12; it is off by default because it changes iterates bit-for-bit and
    is only needed for extremely fast-decaying spectra at high iteration
    counts.
    """

    rank: int
    iterations: int = 1
    seed: int = 0
    oversample: int = 0
    stabilize: bool = False

    def __post_init__(self):
        check_positive_int(self.rank, "rank")
        check_positive_int(self.iterations, "iterations")
        check_seed(self.seed)
        if self.oversample < 0:
            raise ParameterError(f"oversample must be >= 0, got {self.oversample}")


@dataclass(frozen=True)
class LowRankFactors:
    """Factor pair ``a @ b`` with ``a`` of shape (rows, rank) and ``b`` of
    shape (rank, cols)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.a.ndim != 2 or self.b.ndim != 2:
            raise ShapeError("factors must be 2-D")
        if self.a.shape[1] != self.b.shape[0]:
            raise ShapeError(
                f"inner factor dimensions disagree: {self.a.shape} vs {self.b.shape}"
            )

    @property
    def rank(self) -> int:
        return self.a.shape[1]

    def product(self) -> np.ndarray:
        return self.a @ self.b


@dataclass(frozen=True)
class ApproximationReport:
    """Error and timing record for one low-rank approximation.

    ``normalized_error`` is the spectral error divided by the reference
    singular value (the first one a rank-``rank`` approximation must drop),
    so 1.0 marks the best achievable value and the excess over 1.0 is the
    price paid for randomization. ``iterations`` is None when the
    approximation did not come from the randomized path.
    """

    rank: int
    iterations: int | None
    spectral_error: float
    reference_sv: float
    normalized_error: float
    wall_time: float


def rsi(w, config: RsiConfig) -> SvdFactors:
    """Randomized subspace iteration.

    Draws a Gaussian sketch of the row space from ``config.seed``, runs
    ``config.iterations`` alternating passes, then recovers the rank-
    ``config.rank`` factors from an exact SVD of the small projected
    matrix. Deterministic for fixed inputs and configuration.
    """
    w = as_matrix(w, "w")
    rows, cols = w.shape
    limit = min(rows, cols)
    if config.rank > limit:
        raise ParameterError(f"rank {config.rank} exceeds min(rows, cols) = {limit}")
    sketch_width = config.rank + config.oversample
    if sketch_width > limit:
        raise ParameterError(
            f"rank + oversample = {sketch_width} exceeds min(rows, cols) = {limit}"
        )
    y = gaussian_matrix(cols, sketch_width, config.seed)
    x = None
    for step in range(config.iterations):
        x = qr_orthonormalize(w @ y)
        y = w.T @ x
        if config.stabilize and step < config.iterations - 1 and _ill_conditioned(y):
            y = qr_orthonormalize(y)
    inner = exact_svd(y.T)
    u = x @ inner.u
    k = config.rank
    return SvdFactors(u=u[:, :k], s=inner.s[:k], v=inner.v[:, :k])


def _ill_conditioned(y) -> bool:
    sv = np.linalg.svd(y, compute_uv=False)
    smallest = float(sv[-1])
    return smallest == 0.0 or float(sv[0]) / smallest > _STABILIZE_CONDITION


def rsvd(w, rank: int, seed: int = 0, oversample: int = 0) -> SvdFactors:
    """Single-pass randomized SVD; shorthand for ``rsi`` with one iteration."""
    return rsi(w, RsiConfig(rank=rank, iterations=1, seed=seed, oversample=oversample))


def truncate_svd(factors: SvdFactors, rank: int) -> SvdFactors:
    """Keep the leading ``rank`` singular triples.

    Applied to an exact SVD this yields the best rank-``rank``
    approximation in the spectral norm, with error equal to the first
    dropped singular value.
    """
    rank = check_positive_int(rank, "rank")
    if rank > factors.rank:
        raise ParameterError(f"rank {rank} exceeds available rank {factors.rank}")
    return SvdFactors(
        u=factors.u[:, :rank], s=factors.s[:rank], v=factors.v[:, :rank]
    )


def split_factors(factors: SvdFactors) -> LowRankFactors:
    """Split ``u s v^T`` into the storable pair ``(u sqrt(s), sqrt(s) v^T)``."""
    if factors.rank and float(factors.s.min()) < 0.0:
        raise ContractError("cannot split factors with negative singular values")
    root = np.sqrt(factors.s)
    return LowRankFactors(a=factors.u * root, b=root[:, None] * factors.v.T)


def raw_power_iterate(w, vector, iterations: int) -> np.ndarray:
    """Un-normalized power iterate of a single probe vector.

    Multiplies by ``w`` once, then by the Gram operator ``iterations - 1``
    times, with no orthonormalization. Diagnostic helper for checking how
    repeated passes amplify leading directions; the decomposition itself
    never calls this.
    """
    w = as_matrix(w, "w")
    vector = as_vector(vector, "vector")
    if vector.shape[0] != w.shape[1]:
        raise ShapeError(
            f"vector length {vector.shape[0]} does not match {w.shape[1]} columns"
        )
    check_positive_int(iterations, "iterations")
    result = w @ vector
    for _ in range(iterations - 1):
        result = w @ (w.T @ result)
    return result


def normalized_spectral_error(
    w,
    approx: LowRankFactors,
    reference_sv: float,
    rel_tol: float = 1e-6,
    *,
    iterations: int | None = None,
    wall_time: float = 0.0,
) -> ApproximationReport:
    """Measure an approximation against the best-achievable spectral error.

    ``reference_sv`` must be the first singular value a rank-``approx.rank``
    approximation necessarily drops; passing zero (a matrix of exactly that
    rank) is rejected because the ratio is undefined there.
    """
    w = as_matrix(w, "w")
    if not isinstance(reference_sv, (int, float)) or reference_sv <= 0.0:
        raise ParameterError(
            "reference singular value must be positive; the normalized metric "
            "is undefined when the matrix already has the target rank"
        )
    product = approx.product()
    if product.shape != w.shape:
        raise ShapeError(
            f"factor product shape {product.shape} does not match matrix shape {w.shape}"
        )
    error = spectral_norm(w - product, rel_tol)
    return ApproximationReport(
        rank=approx.rank,
        iterations=iterations,
        spectral_error=error,
        reference_sv=float(reference_sv),
        normalized_error=error / float(reference_sv),
        wall_time=wall_time,
    )
