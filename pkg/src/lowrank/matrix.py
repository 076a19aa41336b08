"""Dense numerical substrate: seeded Gaussian sketches, Householder QR,
an exact-SVD oracle, and power-iteration spectral-norm estimation.

Everything here is a pure function of its inputs. Random draws come from
a counter-based generator keyed on the caller's seed, so results are
bit-for-bit reproducible across platforms and thread schedules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NumericalFailureError, ParameterError, RankDeficiencyError, ShapeError
from .validation import as_matrix, check_positive_int, check_seed

__all__ = [
    "SvdFactors",
    "gaussian_matrix",
    "qr_orthonormalize",
    "exact_svd",
    "spectral_norm",
]

# A Gaussian draw above this element count would not fit a desk machine.
_MAX_ELEMENTS = 2**31

# Fixed start seed for the spectral-norm power iteration.
_POWER_SEED = 0x9E3779B9

# A pivot below this fraction of the largest input entry counts as collapsed.
_PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class SvdFactors:
    """Thin singular value decomposition: ``u @ diag(s) @ v.T``.

    ``u`` and ``v`` hold orthonormal columns and ``s`` is sorted in
    non-increasing order with no negative entries.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if self.u.ndim != 2 or self.v.ndim != 2:
            raise ShapeError("u and v must be 2-D")
        if self.s.ndim != 1:
            raise ShapeError("s must be 1-D")
        r = self.s.shape[0]
        if self.u.shape[1] != r or self.v.shape[1] != r:
            raise ShapeError(
                f"factor widths disagree: u has {self.u.shape[1]} columns, "
                f"v has {self.v.shape[1]}, s has {r} entries"
            )
        if r and float(self.s.min()) < 0.0:
            raise ContractError("singular values must be nonnegative")
        if np.any(np.diff(self.s) > 0):
            raise ContractError("singular values must be sorted in non-increasing order")

    @property
    def rank(self) -> int:
        return self.s.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Dense matrix represented by the factors."""
        return (self.u * self.s) @ self.v.T


def gaussian_matrix(rows: int, cols: int, seed: int) -> np.ndarray:
    """Deterministic standard-normal matrix.

    Uniform draws come from a counter-based Philox stream and pass through
    the Box-Muller transform, so a given ``(rows, cols, seed)`` always
    yields the same matrix, independent of global RNG state.
    """
    rows = check_positive_int(rows, "rows")
    cols = check_positive_int(cols, "cols")
    seed = check_seed(seed)
    count = rows * cols
    if count > _MAX_ELEMENTS:
        raise ParameterError(f"requested {rows} x {cols} draw exceeds the size limit")
    gen = np.random.Generator(np.random.Philox(key=seed))
    half = (count + 1) // 2
    u1 = gen.random(half)
    u2 = gen.random(half)
    # 1 - u1 lies in (0, 1], so the log below never hits zero.
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = (2.0 * math.pi) * u2
    draws = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return draws[:count].reshape(rows, cols)


def qr_orthonormalize(x) -> np.ndarray:
    """Orthonormal basis for the column space, via Householder reflections.

    Requires at least as many rows as columns. When a pivot collapses below
    ``1e-12 * max|x|`` the input columns are numerically dependent and a
    :class:`RankDeficiencyError` reports the offending column together with
    the number of independent columns found before it.
    """
    x = as_matrix(x, "x")
    m, k = x.shape
    if m < k:
        raise ShapeError(f"need rows >= cols to orthonormalize, got {m} x {k}")
    scale = float(np.max(np.abs(x)))
    if scale == 0.0:
        raise RankDeficiencyError(detected_rank=0, column=1)
    tol = _PIVOT_RTOL * scale
    a = x.copy()
    reflectors = []
    for j in range(k):
        pivot = float(np.linalg.norm(a[j:, j]))
        if pivot < tol:
            raise RankDeficiencyError(detected_rank=j, column=j + 1)
        v = a[j:, j].copy()
        v[0] += math.copysign(pivot, v[0])
        v /= np.linalg.norm(v)
        a[j:, j:] -= 2.0 * np.outer(v, v @ a[j:, j:])
        reflectors.append(v)
    q = np.zeros((m, k))
    np.fill_diagonal(q, 1.0)
    for j in range(k - 1, -1, -1):
        v = reflectors[j]
        q[j:, :] -= 2.0 * np.outer(v, v @ q[j:, :])
    return q


def exact_svd(w) -> SvdFactors:
    """Full-accuracy thin SVD with a deterministic sign convention.

    For each right-singular column, the entry of largest magnitude (first
    such entry on ties) is made nonnegative and the paired left column
    flips with it, so factors compare reproducibly across runs.
    """
    w = as_matrix(w, "w")
    try:
        u, s, vt = np.linalg.svd(w, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    u, v = _fix_signs(u, vt.T)
    return SvdFactors(u=u, s=s, v=v)


def _fix_signs(u, v):
    leads = np.argmax(np.abs(v), axis=0)
    lead_values = v[leads, np.arange(v.shape[1])]
    signs = np.where(lead_values < 0, -1.0, 1.0)
    return u * signs, v * signs


def spectral_norm(w, rel_tol: float) -> float:
    """Largest singular value, estimated by power iteration.

    Runs power iteration on the Gram operator from a seeded start vector
    and stops once successive estimates agree to ``rel_tol`` relatively.
    The iteration cap scales with ``log(1 / rel_tol)``; hitting it raises
    :class:`NumericalFailureError` rather than returning a stale estimate.
    """
    w = as_matrix(w, "w")
    if not isinstance(rel_tol, float) or not 0.0 < rel_tol < 1.0:
        raise ParameterError(f"rel_tol must lie in (0, 1), got {rel_tol!r}")
    cap = 10 * math.ceil(math.log(1.0 / rel_tol)) + 100
    v = gaussian_matrix(w.shape[1], 1, _POWER_SEED)[:, 0]
    v /= np.linalg.norm(v)
    estimate = 0.0
    increment = math.inf
    for _ in range(cap):
        z = w @ v
        new_estimate = float(np.linalg.norm(z))
        if new_estimate == 0.0:
            return 0.0
        increment = abs(new_estimate - estimate)
        estimate = new_estimate
        if increment <= rel_tol * estimate:
            return estimate
        v = w.T @ z
        v /= np.linalg.norm(v)
    raise NumericalFailureError(
        f"power iteration did not reach rel_tol={rel_tol:g} within {cap} steps",
        residual=increment,
    )
