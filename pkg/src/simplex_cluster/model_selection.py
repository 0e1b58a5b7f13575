"""Regularised choice of the number of clusters.

Each candidate ``k`` is scored by its best-of-restarts empirical risk plus
the linear cost ``alpha * beta * k / 2``; the smallest penalised score wins
(ties go to the smaller ``k``). The significance constraint (every
``p_c >= alpha``) and the difference constraint (every pairwise
``KLS >= beta``) are reported per row and only veto a ``k`` in strict mode.
"""

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .cm import run_cm_restarts
from .divergence import kls

DEFAULT_ALPHA = 0.1
DEFAULT_BETA = 0.03
CSV_COLUMNS = ("k", "risk", "cost", "regularized_risk", "c1", "c2")


@dataclass(frozen=True)
class RegularizationParams:
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta}")


def cost(k, params):
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return params.alpha * params.beta * k / 2.0


@dataclass
class ConstraintCheck:
    c1: bool
    c2: bool
    small_clusters: list = field(default_factory=list)
    close_pairs: list = field(default_factory=list)


def check_constraints(assignment, centers, params):
    """Significance and difference constraints for one clustering.

    Empty clusters count as violating significance and take no part in the
    pairwise check.
    """
    p = assignment.proportions
    small = [int(c) for c in np.flatnonzero(p < params.alpha)]
    live = np.flatnonzero(assignment.sizes > 0)
    centers = np.asarray(centers, dtype=float)
    close = []
    for a, i in enumerate(live):
        for c in live[a + 1:]:
            if kls(centers[i], centers[c]) < params.beta:
                close.append((int(i), int(c)))
    return ConstraintCheck(not small, not close, small, close)


@dataclass
class SelectionRow:
    k: int
    risk: float
    cost: float
    regularized_risk: float
    c1: bool
    c2: bool
    restarts: int


@dataclass
class SelectionReport:
    rows: list
    chosen_k: int
    alpha: float
    beta: float
    enforce_constraints: bool = False

    def row(self, k):
        return next(r for r in self.rows if r.k == k)

    @property
    def ks(self):
        return [r.k for r in self.rows]

    @property
    def risks(self):
        return np.array([r.risk for r in self.rows])

    @property
    def regularized_risks(self):
        return np.array([r.regularized_risk for r in self.rows])

    def monotone_violations(self, tol=1e-12):
        """Adjacent ``k`` pairs where the raw risk went up (restart noise)."""
        return [
            (a.k, b.k)
            for a, b in zip(self.rows, self.rows[1:])
            if b.risk > a.risk + tol
        ]

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "enforce_constraints": self.enforce_constraints,
            "chosen_k": self.chosen_k,
            "rows": [asdict(r) for r in self.rows],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.k, repr(r.risk), repr(r.cost), repr(r.regularized_risk),
                        int(r.c1), int(r.c2)])
        return buf.getvalue()


def choose_k(rows, enforce_constraints=False):
    candidates = [r for r in rows if r.c1 and r.c2] if enforce_constraints else rows
    if not candidates:
        return None
    return min(candidates, key=lambda r: (r.regularized_risk, r.k)).k


def select_k(X, k_range=None, params=None, restarts=10, seed=None, theta=1.0,
             enforce_constraints=False, max_iter=1000, init="farthest", return_results=False):
    """Sweep ``k_range`` and pick the ``k`` minimising penalised risk.

    Each ``k`` gets its own derived seed, so rows do not depend on which
    other values of ``k`` are in the range. In strict mode, ``chosen_k`` is
    ``None`` when every ``k`` violates a constraint.
    """
    X = np.asarray(X, dtype=float)
    params = params or RegularizationParams()
    if k_range is None:
        k_range = range(1, min(12, len(X)) + 1)
    ks = sorted({int(k) for k in k_range})
    if not ks:
        raise ValueError("empty k range")
    rows, results = [], {}
    for k in ks:
        res = run_cm_restarts(X, k, restarts, _k_seed(seed, k), init, max_iter, theta)
        chk = check_constraints(res.assignment, res.codebook, params)
        c = cost(k, params)
        rows.append(SelectionRow(k, res.risk, c, res.risk + c, chk.c1, chk.c2, restarts))
        results[k] = res
    report = SelectionReport(rows, choose_k(rows, enforce_constraints),
                             params.alpha, params.beta, enforce_constraints)
    if return_results:
        return report, results
    return report


def _k_seed(seed, k):
    if seed is None:
        return None
    return np.random.SeedSequence([int(seed), int(k)])
