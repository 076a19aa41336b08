"""Softmax sensitivity to weight perturbation.

Replacing a classifier weight matrix by an approximation shifts every
logit by at most the feature norm times the spectral norm of the weight
difference, and softmax contracts infinity-norm logit changes by a factor
of one half. Chaining the two gives a certificate on output probabilities:

    max_i |p_i - p~_i| <= 0.5 * radius * ||w - w~||_2

for every feature with Euclidean norm at most ``radius``. This module
computes the certificate and measures observed deviations against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import LowRankFactors
from .errors import ContractError, ParameterError, ShapeError
from .matrix import spectral_norm
from .validation import as_matrix, as_vector

__all__ = [
    "BoundReport",
    "softmax",
    "softmax_jacobian",
    "perturbation_bound",
    "empirical_deviation",
]

# Measured deviation may exceed the certificate by at most this much
# before we call the numerics broken.
_VIOLATION_SLACK = 1e-10

# Relative slack when checking feature norms against the radius, so a
# feature scaled to lie exactly on the sphere is not rejected for roundoff.
_RADIUS_SLACK = 1e-9


def softmax(logits) -> np.ndarray:
    """Probability vector from logits.

    The maximum is subtracted before exponentiation, so arbitrarily large
    logits cannot overflow.
    """
    logits = as_vector(logits, "logits")
    shifted = logits - logits.max()
    weights = np.exp(shifted)
    return weights / weights.sum()


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    weights = np.exp(shifted)
    return weights / weights.sum(axis=1, keepdims=True)


def softmax_jacobian(logits) -> np.ndarray:
    """Jacobian ``diag(p) - p p^T`` of softmax at the given logits.

    Symmetric, rows sum to zero, and each absolute row sum equals
    ``2 p_i (1 - p_i)``, which never exceeds one half. That last fact is
    what makes softmax a 1/2-contraction from logit changes (infinity
    norm) to probability changes.
    """
    p = softmax(logits)
    return np.diag(p) - np.outer(p, p)


def _as_dense(approx, like: np.ndarray) -> np.ndarray:
    if isinstance(approx, LowRankFactors):
        dense = approx.product()
    else:
        dense = as_matrix(approx, "approximation")
    if dense.shape != like.shape:
        raise ShapeError(
            f"approximation shape {dense.shape} does not match weights {like.shape}"
        )
    return dense


def perturbation_bound(w, approx, radius: float, rel_tol: float = 1e-8) -> float:
    """Certified worst-case probability deviation.

    ``approx`` may be a dense matrix or a :class:`LowRankFactors` pair.
    The certificate covers every feature vector of Euclidean norm at most
    ``radius`` and any bias, since adding one bias to both logit vectors
    cancels in the difference.
    """
    w = as_matrix(w, "w")
    if not radius > 0.0:
        raise ParameterError(f"radius must be positive, got {radius}")
    dense = _as_dense(approx, like=w)
    return 0.5 * radius * spectral_norm(w - dense, rel_tol)


@dataclass(frozen=True)
class BoundReport:
    """Certificate next to the deviations actually observed."""

    radius: float
    spectral_error: float
    theoretical_bound: float
    empirical_max_dev: float
    samples_tested: int

    def to_dict(self) -> dict:
        return {
            "R": self.radius,
            "spectral_error": self.spectral_error,
            "theoretical_bound": self.theoretical_bound,
            "empirical_max_dev": self.empirical_max_dev,
            "samples_tested": self.samples_tested,
        }


def empirical_deviation(
    w,
    approx,
    bias,
    features,
    radius: float | None = None,
    rel_tol: float = 1e-8,
) -> BoundReport:
    """Measure softmax deviations over a feature set against the certificate.

    ``features`` holds one feature per row. When ``radius`` is omitted it
    defaults to the largest feature norm; when given, every feature must fit
    inside it (up to roundoff slack). A measured deviation above the
    certificate raises :class:`ContractError`: the inequality is a theorem,
    so a violation means broken numerics, not an unlucky sample.
    """
    w = as_matrix(w, "w")
    dense = _as_dense(approx, like=w)
    features = np.asarray(features)
    if features.ndim == 1:
        features = features.reshape(1, -1)
    features = as_matrix(features, "features")
    if features.shape[1] != w.shape[1]:
        raise ShapeError(
            f"features have {features.shape[1]} columns but weights expect {w.shape[1]}"
        )
    if bias is None:
        bias = np.zeros(w.shape[0])
    else:
        bias = as_vector(bias, "bias")
        if bias.shape[0] != w.shape[0]:
            raise ShapeError(
                f"bias length {bias.shape[0]} does not match {w.shape[0]} outputs"
            )
    norms = np.linalg.norm(features, axis=1)
    if radius is None:
        radius = float(norms.max())
    if not radius > 0.0:
        raise ParameterError(f"radius must be positive, got {radius}")
    over = np.nonzero(norms > radius * (1.0 + _RADIUS_SLACK))[0]
    if over.size:
        raise ParameterError(
            f"feature {over[0]} has norm {norms[over[0]]:.6g}, "
            f"outside the stated radius {radius:.6g}"
        )
    logits = features @ w.T + bias
    approx_logits = features @ dense.T + bias
    deviation = float(np.abs(_softmax_rows(approx_logits) - _softmax_rows(logits)).max())
    error = spectral_norm(w - dense, rel_tol)
    bound = 0.5 * radius * error
    if deviation > bound + _VIOLATION_SLACK:
        raise ContractError(
            f"measured deviation {deviation:.6g} exceeds the certificate "
            f"{bound:.6g}; numerics are broken"
        )
    return BoundReport(
        radius=float(radius),
        spectral_error=error,
        theoretical_bound=bound,
        empirical_max_dev=deviation,
        samples_tested=features.shape[0],
    )
