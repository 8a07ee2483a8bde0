"""Scikit-learn style estimator wrapping the full pipeline.

fit() forms the Gram matrix of the data (or accepts a precomputed
symmetric matrix), solves the SDP relaxation, and rounds it to a k-sparse
unit loading vector; transform() projects data onto that single component.
Composes with sklearn pipelines, cloning, and grid search through the
standard get_params/set_params machinery.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .certificates import ssr_report
from .rounding import multi_round
from .sdp import CgalConfig, solve_spca_sdp


class RandomizedSparsePCA(TransformerMixin, BaseEstimator):
    """Single sparse principal component via SDP relaxation plus rounding.

    Parameters
    ----------
    k : sparsity budget, the loading vector has at most k nonzeros.
    n_trials : rounding trials beyond the deterministic initializer.
    sdp_iterations, lambda0 : conditional-gradient solver knobs.
    covariance : 'gram' treats X as samples and uses X^T X (after optional
        centering), 'precomputed' treats X as the symmetric matrix itself.
    center : subtract column means before forming the Gram matrix.
    random_state : seed for the rounding trials (None means 0).

    Attributes
    ----------
    component_ : (n_features,) unit loading vector, k-sparse.
    support_ : indices of the nonzero loadings.
    objective_ : value z^T A z attained by the component.
    sdp_objective_ : value of the relaxation, an upper bound proxy.
    budget_ratio_ : normalized diagonal budget of the SDP solution
        (values near 1 mean rounding is operating in its sweet spot).
    """

    def __init__(
        self,
        k: int = 2,
        n_trials: int = 3000,
        sdp_iterations: int = 100,
        lambda0: float = 1.0,
        covariance: str = "gram",
        center: bool = True,
        random_state: int | None = None,
    ):
        self.k = k
        self.n_trials = n_trials
        self.sdp_iterations = sdp_iterations
        self.lambda0 = lambda0
        self.covariance = covariance
        self.center = center
        self.random_state = random_state

    def _gram(self, X: np.ndarray) -> np.ndarray:
        if self.covariance == "precomputed":
            if X.shape[0] != X.shape[1]:
                raise ValueError("precomputed covariance must be square")
            return (X + X.T) / 2.0
        if self.covariance != "gram":
            raise ValueError("covariance must be 'gram' or 'precomputed'")
        if self.center:
            X = X - X.mean(axis=0, keepdims=True)
        return X.T @ X

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        A = self._gram(X)
        seed = 0 if self.random_state is None else int(self.random_state)
        config = CgalConfig(
            iterations=self.sdp_iterations, lambda0=self.lambda0, seed=seed
        )
        sdp = solve_spca_sdp(A, self.k, config)
        best = multi_round(A, sdp.W, self.k, self.n_trials, seed)
        self.n_features_in_ = A.shape[0]
        self.component_ = best.z
        self.support_ = np.asarray(best.support, dtype=int)
        self.objective_ = best.objective
        self.sdp_objective_ = sdp.objective
        self.budget_ratio_ = ssr_report(sdp.W, self.k).c0
        return self

    def transform(self, X):
        check_is_fitted(self, "component_")
        X = check_array(X, dtype=float)
        if self.covariance == "precomputed":
            raise ValueError("transform is undefined for precomputed covariance")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X @ self.component_[:, None]
