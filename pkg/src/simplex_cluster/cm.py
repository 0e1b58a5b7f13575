"""Clustering-Minimisation (CM) engine.

Alternates a nearest-prototype assignment under KL (the clustering step)
with exact recomputation of each prototype as its cluster mean (the
minimisation step). Because the mean is the exact minimiser of the
within-cluster KL risk, the empirical risk never increases and the loop
stops once an assignment pass changes no code.

Cluster codes are 0-based throughout the Python API.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .divergence import pairwise_kl
from .exceptions import DimensionMismatch, EmptyDataset, KTooLarge
from .simplex import check_theta, smooth

INIT_POLICIES = ("farthest", "random")
THREADS_ENV = "SIMPLEX_CLUSTER_THREADS"


@dataclass(frozen=True, eq=False)
class Assignment:
    codes: np.ndarray
    sizes: np.ndarray

    @classmethod
    def from_codes(cls, codes, k):
        codes = np.asarray(codes, dtype=np.intp)
        if codes.size and (codes.min() < 0 or codes.max() >= k):
            raise ValueError(f"codes must lie in 0..{k - 1}")
        return cls(codes, np.bincount(codes, minlength=k))

    @property
    def k(self):
        return len(self.sizes)

    @property
    def n(self):
        return len(self.codes)

    @property
    def proportions(self):
        return self.sizes / self.n


@dataclass
class CmTrace:
    risks: list = field(default_factory=list)
    reason: str = "max_iterations"

    @property
    def n_iter(self):
        return max(len(self.risks) - 1, 0)

    @property
    def converged(self):
        return self.reason == "converged"


@dataclass
class CmResult:
    codebook: np.ndarray
    assignment: Assignment
    trace: CmTrace
    seed: object = None
    restart: int = 0

    @property
    def risk(self):
        return self.trace.risks[-1]


def loss_matrix(X, Q, theta=1.0):
    """Per-(point, prototype) loss ``KL_theta(X[t], Q[c])``."""
    theta = check_theta(theta)
    return pairwise_kl(smooth(X, theta), smooth(Q, theta))


def _check_dims(X, Q):
    if X.shape[1] != Q.shape[1]:
        raise DimensionMismatch(
            f"data dimension {X.shape[1]} differs from codebook dimension {Q.shape[1]}"
        )


def assign(X, Q, theta=1.0, return_losses=False):
    """Map each point to its nearest prototype; ties go to the lowest index.

    ``inf`` losses compare larger than any finite value, so a prototype with
    an unsupported zero component never attracts the points it cannot encode.
    """
    X = np.asarray(X, dtype=float)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    _check_dims(X, Q)
    D = loss_matrix(X, Q, theta)
    codes = np.argmin(D, axis=1)
    out = Assignment.from_codes(codes, len(Q))
    if return_losses:
        return out, D[np.arange(len(X)), codes]
    return out


def update_centers(X, assignment, k=None, theta=1.0):
    """Cluster means; an empty cluster's prototype is reset to the data point
    with the largest loss under the refreshed non-empty prototypes."""
    X = np.asarray(X, dtype=float)
    k = assignment.k if k is None else k
    sizes = np.bincount(assignment.codes, minlength=k)
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, assignment.codes, X)
    empty = np.flatnonzero(sizes == 0)
    Q = sums / np.maximum(sizes, 1)[:, None]
    nonempty = sizes > 0
    Q[nonempty] /= Q[nonempty].sum(axis=1, keepdims=True)
    if len(empty):
        own = loss_matrix(X, Q[nonempty], theta)
        # column index of each point's own cluster among the non-empty ones
        col = np.cumsum(nonempty)[assignment.codes] - 1
        losses = own[np.arange(len(X)), col]
        # stable sort keeps the lowest point index first among equal losses
        order = np.argsort(-losses, kind="stable")
        Q[empty] = X[order[: len(empty)]]
    return Q


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def init_codebook(X, k, init="farthest", seed=None, theta=1.0):
    """Choose ``k`` data points as initial prototypes.

    ``"farthest"``: a uniformly random first point, then repeatedly the point
    whose divergence to its nearest chosen prototype is largest.
    ``"random"``: ``k`` distinct points drawn uniformly.
    """
    rng = _rng(seed)
    n = len(X)
    if init == "random":
        return X[np.sort(rng.choice(n, size=k, replace=False))].copy()
    if init != "farthest":
        raise ValueError(f"init must be one of {INIT_POLICIES}, got {init!r}")
    chosen = [int(rng.integers(n))]
    nearest = loss_matrix(X, X[chosen], theta)[:, 0]
    for _ in range(1, k):
        nearest[chosen] = -1.0
        nxt = int(np.argmax(nearest))
        chosen.append(nxt)
        nearest = np.minimum(nearest, loss_matrix(X, X[[nxt]], theta)[:, 0])
    return X[chosen].copy()


def _check_problem(X, k):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise EmptyDataset("dataset has no points")
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > len(X):
        raise KTooLarge(f"k = {k} exceeds the number of points n = {len(X)}")
    return X, k


def run_cm(X, k, init="farthest", seed=None, max_iter=1000, theta=1.0, codebook=None):
    """Run one CM descent and return a :class:`CmResult`.

    The trace records the empirical risk after every assignment pass; it
    starts with the risk of the initial codebook. ``codebook`` overrides
    ``init`` when given.
    """
    X, k = _check_problem(X, k)
    theta = check_theta(theta)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if codebook is None:
        Q = init_codebook(X, k, init, seed, theta)
    else:
        Q = np.array(codebook, dtype=float)
        _check_dims(X, Q)
        if len(Q) != k:
            raise ValueError(f"initial codebook has {len(Q)} prototypes, expected {k}")
    a, losses = assign(X, Q, theta, return_losses=True)
    trace = CmTrace([float(losses.mean())])
    for _ in range(max_iter):
        Q = update_centers(X, a, k, theta)
        new, losses = assign(X, Q, theta, return_losses=True)
        trace.risks.append(float(losses.mean()))
        if np.array_equal(new.codes, a.codes):
            trace.reason = "converged"
            a = new
            break
        a = new
    return CmResult(Q, a, trace, seed)


def derive_seeds(seed, count):
    """Independent child seeds for ``count`` restarts of a base ``seed``.

    ``seed`` may be an int, ``None`` or a ``SeedSequence``; a sequence is
    copied first so repeated calls yield the same children.
    """
    if isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key)
    else:
        seed = np.random.SeedSequence(seed)
    return seed.spawn(count)


def n_workers():
    """Worker cap from ``SIMPLEX_CLUSTER_THREADS`` (0 or unset: CPU count)."""
    raw = os.environ.get(THREADS_ENV, "0") or "0"
    value = int(raw)
    if value < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {raw!r}")
    return value or (os.cpu_count() or 1)


def run_cm_restarts(X, k, restarts=10, seed=None, init="farthest", max_iter=1000, theta=1.0):
    """Best of ``restarts`` independent CM runs by final empirical risk.

    Ties go to the lowest restart index. Results do not depend on the
    worker count, since every restart owns a derived seed.
    """
    X, k = _check_problem(X, k)
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    seeds = derive_seeds(seed, restarts)

    def one(s):
        return run_cm(X, k, init, np.random.default_rng(s), max_iter, theta)

    workers = min(n_workers(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(one, seeds))
    else:
        runs = [one(s) for s in seeds]
    best = min(range(restarts), key=lambda i: (runs[i].risk, i))
    result = runs[best]
    result.seed = seed
    result.restart = best
    return result
