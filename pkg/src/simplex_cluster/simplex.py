"""Probability-simplex data model.

Points of the simplex are plain float64 numpy arrays: a single probability
vector has shape ``(m,)`` and a dataset or codebook has shape ``(n, m)``.
The validators below return read-only, exactly renormalised copies so that
downstream code can assume an exact simplex point.
"""

import numpy as np
from scipy.special import entr

from .exceptions import (
    DimensionTooSmall,
    EmptyCluster,
    EmptyDataset,
    NegativeComponent,
    SumOutOfTolerance,
    ThetaOutOfRange,
)

SIMPLEX_TOL = 1e-9


def _frozen(a):
    a.setflags(write=False)
    return a


def validate(v, tol=SIMPLEX_TOL):
    """Validate a raw sequence as a probability vector.

    Returns a read-only float64 array renormalised by its sum.

    >>> validate([0.2, 0.3, 0.5]).tolist()
    [0.2, 0.3, 0.5]
    """
    v = np.array(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D sequence, got shape {v.shape}")
    if v.shape[0] < 2:
        raise DimensionTooSmall(f"dimension must be >= 2, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("components must be finite")
    if np.any(v < 0):
        raise NegativeComponent(f"negative component at index {int(np.argmax(v < 0))}")
    s = v.sum()
    if abs(s - 1.0) > tol:
        raise SumOutOfTolerance(f"components sum to {s!r}, not 1")
    return _frozen(v / s)


def check_simplex_array(X, tol=SIMPLEX_TOL, name="X"):
    """Validate a 2-D array whose rows are probability vectors.

    Rows are renormalised by their sums. Used by every estimator entry point.
    """
    X = np.array(X, dtype=float)
    if X.ndim == 1:
        raise ValueError(
            f"{name} must be 2-D (n_samples, m); reshape a single vector with "
            "X.reshape(1, -1)"
        )
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {X.shape}")
    n, m = X.shape
    if n == 0:
        raise EmptyDataset(f"{name} has no rows")
    if m < 2:
        raise DimensionTooSmall(f"dimension must be >= 2, got {m}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains NaN or infinity")
    neg = np.argwhere(X < 0)
    if len(neg):
        i, j = neg[0]
        raise NegativeComponent(f"{name}[{i}, {j}] is negative")
    s = X.sum(axis=1)
    bad = np.flatnonzero(np.abs(s - 1.0) > tol)
    if len(bad):
        raise SumOutOfTolerance(f"row {bad[0]} of {name} sums to {s[bad[0]]!r}, not 1")
    return _frozen(X / s[:, None])


def check_theta(theta):
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ThetaOutOfRange(f"theta must lie in [0, 1], got {theta}")
    return theta


def uniform_center(m):
    if m < 2:
        raise DimensionTooSmall(f"dimension must be >= 2, got {m}")
    return _frozen(np.full(m, 1.0 / m))


def entropy(v):
    """Shannon entropy in nats, with 0 log 0 = 0.

    Accepts one vector or a 2-D array (entropy per row).
    """
    return entr(np.asarray(v, dtype=float)).sum(axis=-1)


def smooth(v, theta):
    """Blend ``v`` toward the uniform center: ``theta * v + (1 - theta) / m``.

    Works row-wise on 2-D input. ``theta = 1`` returns the input unchanged.
    """
    theta = check_theta(theta)
    v = np.asarray(v, dtype=float)
    if theta == 1.0:
        return v
    return theta * v + (1.0 - theta) / v.shape[-1]


def mean(points):
    """Componentwise mean of a non-empty set of probability vectors."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise EmptyCluster("mean of an empty set of points")
    q = points.mean(axis=0)
    return q / q.sum()


def is_absolute_margin(v):
    """True where the vector (or each row) has a zero component."""
    return np.min(np.asarray(v), axis=-1) == 0
