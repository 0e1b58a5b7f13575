"""Kullback-Leibler divergence kernels on the simplex.

All divergences are in nats and extended-real valued: ``kl(v, u)`` is
``inf`` exactly when some component has ``v_l > 0`` and ``u_l = 0``.
There is no silent epsilon flooring; use ``kl_smoothed`` for that.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr, xlogy

from .exceptions import DimensionMismatch
from .simplex import smooth


def _pair(v, u):
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    if v.shape[-1] != u.shape[-1]:
        raise DimensionMismatch(f"dimensions differ: {v.shape[-1]} vs {u.shape[-1]}")
    return v, u


def kl(v, u):
    """KL(v || u) = sum_l v_l log(v_l / u_l); broadcasts over leading axes."""
    v, u = _pair(v, u)
    return np.maximum(rel_entr(v, u).sum(axis=-1), 0.0)


def kls(v, u):
    """Symmetrised divergence KL(v || u) + KL(u || v)."""
    return kl(v, u) + kl(u, v)


def kl_smoothed(v, u, theta):
    """KL between both arguments after smoothing toward the uniform center."""
    v, u = _pair(v, u)
    return kl(smooth(v, theta), smooth(u, theta))


def pairwise_kl(X, Q):
    """Matrix ``D[t, c] = KL(X[t] || Q[c])`` for datasets ``X`` (n, m), ``Q`` (k, m).

    Computed as negative entropy minus a cross term so the cost is one
    matrix product; terms with ``X[t, l] = 0`` contribute nothing, and a
    positive ``X[t, l]`` against ``Q[c, l] = 0`` yields ``inf``.
    """
    X, Q = _pair(X, Q)
    negent = xlogy(X, X).sum(axis=1)
    zero = Q == 0
    logQ = np.log(np.where(zero, 1.0, Q))
    D = negent[:, None] - X @ logQ.T
    if zero.any():
        D[((X > 0).astype(float) @ zero.T.astype(float)) > 0] = np.inf
    # cancellation can leave -1e-17 where X[t] == Q[c]
    np.maximum(D, 0.0, out=D)
    return D


@dataclass(frozen=True)
class XiVector:
    """Data-side factor of the loss: ``(sum v log v, v_1, ..., v_m)``."""

    xi0: float
    xi: np.ndarray

    def as_array(self):
        return np.concatenate([[self.xi0], self.xi])


@dataclass(frozen=True)
class EtaVector:
    """Prototype-side factor of the loss: ``(1, -log u_1, ..., -log u_m)``."""

    eta0: float
    eta: np.ndarray

    def as_array(self):
        return np.concatenate([[self.eta0], self.eta])


def xi(v):
    v = np.asarray(v, dtype=float)
    return XiVector(float(xlogy(v, v).sum()), v.copy())


def eta(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        return EtaVector(1.0, -np.log(u))


def structural_loss(x, e):
    """Inner product <xi, eta>; components with ``xi_l = 0`` contribute 0
    even when ``eta_l = inf``."""
    if x.xi.shape != e.eta.shape:
        raise DimensionMismatch(f"dimensions differ: {x.xi.shape} vs {e.eta.shape}")
    live = x.xi != 0
    terms = x.xi[live] * e.eta[live]
    return x.xi0 * e.eta0 + terms.sum()
