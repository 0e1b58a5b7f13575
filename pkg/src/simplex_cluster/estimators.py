"""scikit-learn estimators wrapping the CM engine and the k sweep."""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cm import loss_matrix, run_cm_restarts
from .exceptions import DimensionMismatch
from .model_selection import DEFAULT_ALPHA, DEFAULT_BETA, RegularizationParams, select_k
from .simplex import check_simplex_array, check_theta


class _SimplexPredictMixin:
    def _validate_new(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_simplex_array(X)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(
                f"X has {X.shape[1]} components, estimator was fitted with {self.n_features_in_}"
            )
        return X

    def predict(self, X):
        """Index of the nearest prototype for each row of ``X``."""
        return np.argmin(self.transform(X), axis=1)

    def transform(self, X):
        """Divergence of each row of ``X`` to every prototype, shape (n, k)."""
        X = self._validate_new(X)
        return loss_matrix(X, self.cluster_centers_, self.theta)

    def score(self, X, y=None):
        """Negative empirical risk of ``X`` under the fitted codebook."""
        return -float(self.transform(X).min(axis=1).mean())

    def _set_result(self, X, result):
        self.cluster_centers_ = result.codebook
        self.labels_ = result.assignment.codes
        self.cluster_sizes_ = result.assignment.sizes
        self.risk_ = result.risk
        self.trace_ = list(result.trace.risks)
        self.n_iter_ = result.trace.n_iter
        self.converged_ = result.trace.converged
        self.n_features_in_ = X.shape[1]


class KLKMeans(_SimplexPredictMixin, TransformerMixin, ClusterMixin, BaseEstimator):
    """K-means on the probability simplex under Kullback-Leibler divergence.

    Parameters
    ----------
    n_clusters : int
    init : {"farthest", "random"}
        Seeding policy for each restart.
    n_init : int
        Number of restarts; the run with the lowest final risk is kept.
    max_iter : int
    theta : float in [0, 1]
        Smoothing weight; ``theta < 1`` blends points and prototypes toward
        the uniform center before measuring divergence, keeping every loss
        finite on data with zero components.
    random_state : int or None

    Attributes
    ----------
    cluster_centers_ : ndarray (n_clusters, m)
    labels_ : ndarray (n_samples,)
    risk_ : float
        Mean divergence of the training points to their prototypes (nats).
    trace_ : list of float
        Risk after each assignment pass of the kept run.
    n_iter_, converged_
    """

    def __init__(self, n_clusters=8, init="farthest", n_init=10, max_iter=1000,
                 theta=1.0, random_state=None):
        self.n_clusters = n_clusters
        self.init = init
        self.n_init = n_init
        self.max_iter = max_iter
        self.theta = theta
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_simplex_array(X)
        check_theta(self.theta)
        result = run_cm_restarts(X, self.n_clusters, self.n_init, self.random_state,
                                 self.init, self.max_iter, self.theta)
        self._set_result(X, result)
        return self


class RegularizedKSelector(_SimplexPredictMixin, ClusterMixin, BaseEstimator):
    """Choose the number of clusters by penalised KL risk, then fit it.

    Every ``k`` in ``k_min..k_max`` is fitted with ``n_init`` restarts and
    scored by its risk plus ``alpha * beta * k / 2``. After ``fit``,
    ``n_clusters_`` holds the chosen ``k``, ``report_`` the full sweep,
    and the usual clustering attributes describe the chosen fit.
    """

    def __init__(self, k_min=1, k_max=12, alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA,
                 n_init=10, max_iter=1000, theta=1.0, enforce_constraints=False,
                 random_state=None):
        self.k_min = k_min
        self.k_max = k_max
        self.alpha = alpha
        self.beta = beta
        self.n_init = n_init
        self.max_iter = max_iter
        self.theta = theta
        self.enforce_constraints = enforce_constraints
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_simplex_array(X)
        check_theta(self.theta)
        params = RegularizationParams(self.alpha, self.beta)
        k_max = min(self.k_max, len(X))
        report, results = select_k(
            X, range(self.k_min, k_max + 1), params, self.n_init, self.random_state,
            self.theta, self.enforce_constraints, self.max_iter, return_results=True,
        )
        if report.chosen_k is None:
            raise ValueError("every candidate k violates the cluster constraints")
        self.report_ = report
        self.n_clusters_ = report.chosen_k
        self._set_result(X, results[report.chosen_k])
        return self
