"""Empirical risk, its entropy decomposition, and cluster merges.

With prototypes equal to the exact cluster means, the KL risk splits as

    risk = -H(X) + sum_c p_c H(qbar_c)
    risk(k=1) - risk = sum_c p_c KL(qbar_c || qbar)

where H(X) is the mean entropy of the data points and ``qbar`` the grand
mean. Merges are evaluated at a fixed assignment: the merged cluster takes
the probability-weighted mean of the merged centers.
"""

from dataclasses import dataclass

import numpy as np

from .cm import Assignment, loss_matrix
from .divergence import kl, pairwise_kl
from .exceptions import DimensionMismatch, InvalidMergeSet, StaleCenters
from .simplex import entropy, smooth

STALE_TOL = 1e-9


@dataclass(frozen=True)
class ClusterTerm:
    proportion: float
    center_entropy: float
    contribution: float


@dataclass(frozen=True)
class RiskReport:
    empirical_risk: float
    dataset_entropy: float
    per_cluster: tuple
    between_divergence: float
    one_cluster_risk: float

    @property
    def entropy_form(self):
        """``-H(X) + sum_c p_c H(qbar_c)``, computed from the per-cluster terms."""
        return -self.dataset_entropy + sum(t.contribution for t in self.per_cluster)


@dataclass(frozen=True)
class MergePlan:
    clusters: tuple
    merged_center: np.ndarray
    bound: float


def empirical_risk(X, Q, theta=1.0):
    """Mean over points of the smallest divergence to any prototype."""
    X = np.asarray(X, dtype=float)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if X.shape[1] != Q.shape[1]:
        raise DimensionMismatch(f"dimensions differ: {X.shape[1]} vs {Q.shape[1]}")
    return float(loss_matrix(X, Q, theta).min(axis=1).mean())


def assigned_risk(X, assignment, Q, theta=1.0):
    """Mean divergence of each point to the prototype its code names."""
    X = np.asarray(X, dtype=float)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    codes = assignment.codes
    losses = kl(smooth(X, theta), smooth(Q[codes], theta))
    return float(losses.mean())


def cluster_means(X, assignment):
    """Exact means of the non-empty clusters; empty rows are NaN."""
    X = np.asarray(X, dtype=float)
    sums = np.zeros((assignment.k, X.shape[1]))
    np.add.at(sums, assignment.codes, X)
    with np.errstate(invalid="ignore", divide="ignore"):
        return sums / assignment.sizes[:, None]


def _check_fresh(X, assignment, centers):
    means = cluster_means(X, assignment)
    if centers is None:
        return means
    centers = np.asarray(centers, dtype=float)
    if centers.shape != means.shape:
        raise DimensionMismatch(f"centers shape {centers.shape}, expected {means.shape}")
    live = assignment.sizes > 0
    gap = np.abs(centers[live] - means[live]).max(initial=0.0)
    if gap > STALE_TOL:
        raise StaleCenters(f"centers differ from cluster means by {gap:.3g}")
    return means


def risk_decomposition(X, assignment, centers=None, theta=1.0):
    """Evaluate both entropy identities for a post-minimisation clustering.

    ``centers`` (optional) are checked against the exact cluster means and
    :class:`StaleCenters` is raised when they disagree. With ``theta < 1``
    the identities are evaluated on the smoothed data.
    """
    X = smooth(np.asarray(X, dtype=float), theta)
    if centers is not None:
        centers = smooth(np.asarray(centers, dtype=float), theta)
    means = _check_fresh(X, assignment, centers)
    live = assignment.sizes > 0
    p = assignment.proportions
    grand = X.mean(axis=0)
    risk = assigned_risk(X, assignment, np.where(live[:, None], means, 1.0))
    terms = []
    between = 0.0
    for c in range(assignment.k):
        if not live[c]:
            terms.append(ClusterTerm(0.0, 0.0, 0.0))
            continue
        h = float(entropy(means[c]))
        terms.append(ClusterTerm(float(p[c]), h, float(p[c] * h)))
        between += float(p[c] * kl(means[c], grand))
    one = float(kl(X, grand[None, :]).mean())
    return RiskReport(
        empirical_risk=risk,
        dataset_entropy=float(entropy(X).mean()),
        per_cluster=tuple(terms),
        between_divergence=between,
        one_cluster_risk=one,
    )


def _merge_set(assignment, S):
    S = tuple(sorted({int(c) for c in S}))
    if len(S) < 2:
        raise InvalidMergeSet("a merge needs at least two distinct clusters")
    if S[0] < 0 or S[-1] >= assignment.k:
        raise InvalidMergeSet(f"cluster indices must lie in 0..{assignment.k - 1}")
    if np.any(assignment.sizes[list(S)] == 0):
        raise InvalidMergeSet("cannot merge an empty cluster")
    return S


def merged_center(assignment, centers, S):
    S = _merge_set(assignment, S)
    p = assignment.proportions[list(S)]
    q = np.asarray(centers, dtype=float)[list(S)]
    qhat = (p[:, None] * q).sum(axis=0) / p.sum()
    return qhat / qhat.sum()


def merge_bound(assignment, centers, S, form="auto"):
    """Upper bound on the risk increase from merging the clusters in ``S``.

    ``form``:
      * ``"centroid"``: ``sum_{c in S} p_c KL(qbar_c || qhat)``
      * ``"pairwise"``: ``sum_{i,c in S} p_i p_c KL(qbar_i || qbar_c) / sum p_c``
      * ``"auto"``: the symmetric two-cluster form
        ``p_i p_c KLS(q_i, q_c) / (p_i + p_c)`` when ``|S| = 2``,
        otherwise ``"pairwise"``.
    """
    S = _merge_set(assignment, S)
    p = assignment.proportions[list(S)]
    q = np.asarray(centers, dtype=float)[list(S)]
    if form == "centroid":
        qhat = merged_center(assignment, centers, S)
        return float((p * kl(q, qhat[None, :])).sum())
    if form == "auto" and len(S) == 2:
        pi, pc = p
        return float(pi * pc * (kl(q[0], q[1]) + kl(q[1], q[0])) / (pi + pc))
    if form in ("auto", "pairwise"):
        D = pairwise_kl(q, q)
        return float(p @ D @ p / p.sum())
    raise ValueError(f"unknown bound form {form!r}")


def plan_merge(assignment, centers, S, form="auto"):
    S = _merge_set(assignment, S)
    return MergePlan(S, merged_center(assignment, centers, S), merge_bound(assignment, centers, S, form))


def apply_merge(X, assignment, centers, S):
    """Merge the clusters in ``S`` without reassigning points.

    The merged cluster takes the smallest index in ``S``; the remaining
    clusters keep their relative order. Returns ``(assignment, centers)``
    with ``k - |S| + 1`` clusters and centers recomputed as exact means.
    """
    S = _merge_set(assignment, S)
    target = S[0]
    keep = [c for c in range(assignment.k) if c == target or c not in S]
    relabel = np.empty(assignment.k, dtype=np.intp)
    for new, old in enumerate(keep):
        relabel[old] = new
    relabel[list(S)] = keep.index(target)
    merged = Assignment.from_codes(relabel[assignment.codes], len(keep))
    old = np.asarray(centers, dtype=float)
    new_centers = cluster_means(X, merged)
    for new, c in enumerate(keep):
        if merged.sizes[new] == 0:
            new_centers[new] = old[c]
    return merged, new_centers


def best_pair_merge(assignment, centers):
    """The pair of non-empty clusters with the smallest two-cluster bound."""
    live = np.flatnonzero(assignment.sizes > 0)
    best = None
    for a, i in enumerate(live):
        for c in live[a + 1:]:
            b = merge_bound(assignment, centers, (i, c))
            if best is None or b < best[1]:
                best = ((int(i), int(c)), b)
    return best

