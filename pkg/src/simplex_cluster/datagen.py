"""Synthetic Dirichlet-mixture data on the simplex.

A component is a Dirichlet distribution with mean ``center`` and precision
``concentration`` (parameters ``concentration * center``). Samples are drawn
as normalised independent Gamma variates from a PCG64 stream, so a seed
reproduces the same data for a given ``GENERATOR_VERSION``.
"""

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import InvalidSpec
from .simplex import SIMPLEX_TOL

GENERATOR_VERSION = 1
PRESETS = ("fig1-4c", "fig1-6c")


@dataclass(frozen=True)
class MixtureSpec:
    centers: np.ndarray
    weights: np.ndarray
    concentration: np.ndarray
    n: int
    seed: int = 0

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        K = len(centers)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        conc = np.broadcast_to(np.asarray(self.concentration, dtype=float), (K,)).copy()
        if centers.shape[1] < 2:
            raise InvalidSpec("centers must have dimension >= 2")
        if np.any(centers <= 0) or np.any(np.abs(centers.sum(axis=1) - 1) > SIMPLEX_TOL):
            raise InvalidSpec("centers must be strictly interior probability vectors")
        if weights.shape != (K,):
            raise InvalidSpec(f"expected {K} weights, got {weights.shape[0]}")
        if np.any(weights < 0) or abs(weights.sum() - 1) > SIMPLEX_TOL:
            raise InvalidSpec("weights must be a probability vector")
        if np.any(conc <= 0):
            raise InvalidSpec("concentrations must be > 0")
        if int(self.n) < 1:
            raise InvalidSpec(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "centers", centers / centers.sum(axis=1, keepdims=True))
        object.__setattr__(self, "weights", weights / weights.sum())
        object.__setattr__(self, "concentration", conc)
        object.__setattr__(self, "n", int(self.n))

    @property
    def k(self):
        return len(self.centers)

    @property
    def m(self):
        return self.centers.shape[1]

    def replace(self, **changes):
        d = self.to_dict()
        d.update(changes)
        return MixtureSpec(**d)

    def to_dict(self):
        return {
            "centers": self.centers.tolist(),
            "weights": self.weights.tolist(),
            "concentration": self.concentration.tolist(),
            "n": self.n,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["centers"], d["weights"], d["concentration"], d["n"], d.get("seed", 0))
        except KeyError as exc:
            raise InvalidSpec(f"mixture spec is missing {exc}") from None


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def generate(spec, seed=None, return_labels=False):
    """Draw ``spec.n`` i.i.d. points; ``seed`` overrides ``spec.seed``.

    Rows that underflow to a zero component are redrawn, so every returned
    point is strictly interior.
    """
    rng = _rng(spec.seed if seed is None else seed)
    labels = rng.choice(spec.k, size=spec.n, p=spec.weights)
    alpha = spec.concentration[:, None] * spec.centers
    X = np.empty((spec.n, spec.m))
    todo = np.arange(spec.n)
    while len(todo):
        g = rng.standard_gamma(alpha[labels[todo]])
        X[todo] = g / g.sum(axis=1, keepdims=True)
        todo = todo[np.min(X[todo], axis=1) <= 0]
    if return_labels:
        return X, labels
    return X


def load_preset(name_or_path, n=None, seed=None):
    """Load a bundled preset by name, or a preset JSON file by path."""
    if name_or_path in PRESETS:
        text = resources.files(__package__).joinpath("presets", f"{name_or_path}.json").read_text()
    else:
        path = Path(name_or_path)
        if not path.exists():
            raise InvalidSpec(f"unknown preset {name_or_path!r}; bundled presets: {', '.join(PRESETS)}")
        text = path.read_text()
    spec = MixtureSpec.from_dict(json.loads(text))
    changes = {}
    if n is not None:
        changes["n"] = n
    if seed is not None:
        changes["seed"] = seed
    return spec.replace(**changes) if changes else spec
