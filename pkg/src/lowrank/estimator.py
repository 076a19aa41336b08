"""Estimator-style wrapper around the randomized decomposition.

Mirrors the fit/transform conventions of scikit-learn's truncated SVD so the
decomposition can sit in a pipeline: ``fit`` factorizes the training matrix,
``transform`` projects rows onto the learned right-singular basis.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .decomposition import LowRankFactors, RsiConfig, rsi, split_factors
from .errors import ShapeError
from .validation import as_matrix

__all__ = ["SubspaceIterationSVD"]


class SubspaceIterationSVD(TransformerMixin, BaseEstimator):
    """Low-rank transformer backed by randomized subspace iteration.

    Parameters mirror :class:`~lowrank.decomposition.RsiConfig`. After
    fitting, ``components_`` holds the right-singular basis (rank x
    features), ``singular_values_`` the leading singular values, and
    ``factors_`` the full factor triple for direct reconstruction.
    """

    def __init__(self, rank=2, iterations=2, seed=0, oversample=0, stabilize=False):
        self.rank = rank
        self.iterations = iterations
        self.seed = seed
        self.oversample = oversample
        self.stabilize = stabilize

    def _config(self) -> RsiConfig:
        return RsiConfig(
            rank=self.rank,
            iterations=self.iterations,
            seed=self.seed,
            oversample=self.oversample,
            stabilize=self.stabilize,
        )

    def fit(self, X, y=None):
        X = as_matrix(X, "X")
        self.factors_ = rsi(X, self._config())
        self.components_ = self.factors_.v.T
        self.singular_values_ = self.factors_.s
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "components_"):
            raise NotFittedError(
                "this SubspaceIterationSVD instance is not fitted yet; call fit first"
            )

    def transform(self, X):
        self._check_fitted()
        X = as_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(
                f"X has {X.shape[1]} features but the estimator was fitted "
                f"with {self.n_features_in_}"
            )
        return X @ self.components_.T

    def inverse_transform(self, Z):
        self._check_fitted()
        Z = as_matrix(Z, "Z")
        if Z.shape[1] != self.components_.shape[0]:
            raise ShapeError(
                f"Z has {Z.shape[1]} columns but the fitted rank is "
                f"{self.components_.shape[0]}"
            )
        return Z @ self.components_

    def factor_pair(self) -> LowRankFactors:
        """Storable ``(a, b)`` pair whose product approximates the fitted matrix."""
        self._check_fitted()
        return split_factors(self.factors_)
