"""Numerical checks of the simplex geometry and an empirical consistency harness.

Geometry. For a prototype ``q`` the worst-case loss over all inputs is
attained at a vertex and equals ``-log min_l q_l``. The ball ``B(r)`` holds
the prototypes whose worst-case loss is at most ``r`` (equivalently
``min_l q_l >= exp(-r)``), and its complement is ``T(r)``. The smallest
radius with a non-empty ball is ``log m``, where the ball is the uniform
center alone.
"""

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .cm import derive_seeds, run_cm, run_cm_restarts
from .datagen import generate
from .divergence import kl
from .exceptions import InvalidRadii, InvalidSpec
from .risk import empirical_risk
from .simplex import uniform_center

BALL_TOL = 1e-12
BRACKET_TOL = 1e-9


def sup_loss(q):
    """Largest KL divergence from any simplex point to ``q``; ``inf`` on margins."""
    q = np.asarray(q, dtype=float)
    with np.errstate(divide="ignore"):
        return -np.log(np.min(q, axis=-1))


def ball_contains(q, r):
    """Membership of ``q`` in ``B(r)``, up to a few ulps of rounding in ``r``."""
    if np.any(np.asarray(r) < 0):
        raise ValueError(f"radius must be >= 0, got {r}")
    return sup_loss(q) <= r + BALL_TOL


@dataclass(frozen=True)
class BallSpec:
    radius: float
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise InvalidRadii(f"dimension must be >= 2, got {self.m}")
        if self.radius < np.log(self.m) - BALL_TOL:
            raise InvalidRadii(f"radius {self.radius} is below log m = {np.log(self.m)}")

    def contains(self, q):
        return ball_contains(q, self.radius)


def sample_ball(m, r, size, rng):
    """Points of ``B(r)``: the floor ``exp(-r)`` plus a Dirichlet share of the rest."""
    floor = np.exp(-r)
    slack = max(1.0 - m * floor, 0.0)
    return floor + slack * rng.dirichlet(np.ones(m), size=size)


def sample_remainder(m, Z, size, rng):
    """Points of ``T(Z)``: one random coordinate pushed below ``exp(-Z)``."""
    j = rng.integers(m, size=size)
    low = np.exp(-Z) * rng.uniform(1e-3, 1.0, size=size)
    rest = rng.dirichlet(np.ones(m - 1), size=size) * (1.0 - low)[:, None]
    u = np.empty((size, m))
    for i in range(size):
        u[i] = np.insert(rest[i], j[i], low[i])
    return u


def extremal_pair(r, Z, m):
    """``v`` with first component ``exp(-r)``, ``u`` with ``exp(-Z)``, rest uniform."""
    a, b = np.exp(-r), np.exp(-Z)
    v = np.concatenate([[a], np.full(m - 1, (1 - a) / (m - 1))])
    u = np.concatenate([[b], np.full(m - 1, (1 - b) / (m - 1))])
    return v, u


def rho_bounds(r, Z, m):
    """Closed-form lower and upper bounds on ``rho(B(r), T(Z))``."""
    a, b = np.exp(-r), np.exp(-Z)
    lower = -np.log(m) + Z * a
    upper = a * (Z - r) + (1 - a) * np.log((1 - a) / (1 - b))
    return lower, upper


def _softmax(z):
    z = np.exp(z - z.max())
    return z / z.sum()


def _refine(v, u, r, Z):
    """Local descent on KL(v || u) keeping v in B(r) and u's first coordinate
    below exp(-Z) (both parametrised, so the constraints hold by construction)."""
    m = len(v)
    floor, slack = np.exp(-r), max(1.0 - m * np.exp(-r), 0.0)
    cap = np.exp(-Z)
    j = int(np.argmin(u))
    others = np.delete(np.arange(m), j)

    def unpack(z):
        vv = floor + slack * _softmax(z[:m])
        lo = cap / (1.0 + np.exp(-z[m]))
        uu = np.empty(m)
        uu[j] = lo
        uu[others] = (1.0 - lo) * _softmax(z[m + 1:])
        return vv, uu

    z0 = np.concatenate([
        np.log(np.maximum(v - floor, 1e-300)) if slack > 0 else np.zeros(m),
        [np.log(u[j] / (cap - u[j])) if u[j] < cap else 30.0],
        np.log(u[others]),
    ])
    res = minimize(lambda z: float(kl(*unpack(z))), z0, method="Nelder-Mead",
                   options={"maxiter": 2000, "xatol": 1e-10, "fatol": 1e-14})
    vv, uu = unpack(res.x)
    return float(kl(vv, uu)), vv, uu


@dataclass
class RhoCheck:
    r: float
    Z: float
    m: int
    lower: float
    upper: float
    estimate: float
    extremal: float
    passed: bool


def rho_bounds_check(r, Z, m, samples=2000, seed=0):
    """Estimate ``rho(B(r), T(Z))`` and test it against the closed-form bracket.

    The estimate is the minimum over the extremal construction, random
    ball/remainder pairs, and a local refinement of the best random pair.
    """
    if m < 2 or r < np.log(m) - BALL_TOL or Z <= r:
        raise InvalidRadii(f"need log m <= r < Z, got r={r}, Z={Z}, m={m}")
    rng = np.random.default_rng(seed)
    lower, upper = rho_bounds(r, Z, m)
    v0, u0 = extremal_pair(r, Z, m)
    extremal = float(kl(v0, u0))
    V = sample_ball(m, r, samples, rng)
    U = sample_remainder(m, Z, samples, rng)
    d = kl(V, U)
    i = int(np.argmin(d))
    refined, _, _ = _refine(V[i], U[i], r, Z)
    sampled_min = min(float(d.min()), refined)
    estimate = min(extremal, sampled_min)
    passed = bool(lower < sampled_min and lower < extremal and estimate <= upper + BRACKET_TOL)
    return RhoCheck(r, Z, m, lower, upper, estimate, extremal, passed)


def default_grid(m):
    base = np.log(m)
    return [(r, r + dz) for r in (base, base + 0.5, base + 1.0) for dz in (0.5, 1.0, 3.0)]


@dataclass
class TheoryReport:
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail=""):
        self.checks.append({"check": name, "passed": bool(passed), "detail": detail})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def to_json(self):
        return json.dumps({"passed": self.passed, "checks": self.checks}, indent=2)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "passed", "detail"])
        for c in self.checks:
            w.writerow([c["check"], int(c["passed"]), c["detail"]])
        return buf.getvalue()


def check_uniform_uniqueness(m, trials, rng):
    """Random search for a non-uniform member of the minimal ball."""
    u0 = uniform_center(m)
    # mixtures of the uniform center with random directions probe its neighbourhood
    Q = rng.dirichlet(np.ones(m), size=trials)
    w = rng.uniform(0.0, 1.0, size=(trials, 1)) ** 4
    Q = w * Q + (1 - w) * u0
    far = np.abs(Q - u0).max(axis=1) > 1e-12
    inside = ball_contains(Q, np.log(m))
    return int(np.sum(far & inside))


def check_remainder_minimum(m, r, trials, rng):
    """Count sampled ``u`` outside ``B(r)`` whose minimum is not below ``exp(-r)``."""
    U = rng.dirichlet(np.full(m, 0.5), size=trials)
    outside = sup_loss(U) > r
    return int(np.sum(outside & ~(U.min(axis=1) < np.exp(-r))))


def run_theory_checks(ms=(2, 3, 5, 10), trials=10_000, seed=0, samples=2000):
    """ball/sup-loss agreement, minimal-ball uniqueness, remainder minima and
    the rho bracket over the default grid, for each dimension in ``ms``."""
    report = TheoryReport()
    for m, s in zip(ms, derive_seeds(seed, len(ms))):
        rng = np.random.default_rng(s)
        Q = rng.dirichlet(np.full(m, 0.7), size=trials)
        R = rng.uniform(0.0, 3.0 * np.log(m) + 3.0, size=trials)
        # brute force: the worst input for a prototype is one of the vertices
        vertex_sup = kl(np.eye(m)[None, :, :], Q[:, None, :]).max(axis=1)
        agree = np.array_equal(ball_contains(Q, R), vertex_sup <= R + BALL_TOL)
        report.add(f"ball_vs_sup_loss m={m}", agree)
        found = check_uniform_uniqueness(m, trials, rng)
        report.add(f"uniform_unique m={m}", found == 0, f"non-uniform members found: {found}")
        bad = sum(check_remainder_minimum(m, np.log(m) + dr, trials, rng) for dr in (0.0, 0.5, 1.0))
        report.add(f"remainder_minimum m={m}", bad == 0, f"violations: {bad}")
        for r, Z in default_grid(m):
            c = rho_bounds_check(r, Z, m, samples, int(rng.integers(2**31)))
            attained = abs(c.extremal - c.upper) <= BRACKET_TOL
            report.add(f"rho_bracket m={m} r={r:.4f} Z={Z:.4f}", c.passed and attained,
                       f"lower={c.lower:.6g} estimate={c.estimate:.6g} upper={c.upper:.6g}")
    return report


@dataclass
class ConsistencyRow:
    n: int
    min_empirical_risk: float
    single_run_risk: float
    heldout_risk: float
    reference_risk: float
    reference_se: float
    seed: int


@dataclass
class ConsistencyCurve:
    rows: list

    @property
    def ns(self):
        return [r.n for r in self.rows]

    @property
    def risks(self):
        return np.array([r.min_empirical_risk for r in self.rows])

    def successive_differences(self):
        return np.abs(np.diff(self.risks))

    def differences_decreasing(self):
        d = self.successive_differences()
        return bool(np.all(np.diff(d) < 0))

    def final_gap(self):
        last = self.rows[-1]
        return abs(last.min_empirical_risk - last.reference_risk)

    def to_json(self):
        return json.dumps({"rows": [asdict(r) for r in self.rows]}, indent=2)

    def to_csv(self):
        cols = list(ConsistencyRow.__dataclass_fields__)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in asdict(r).values()])
        return buf.getvalue()


def reference_risk(spec, heldout_n=100_000, replicates=10, seed=0):
    """Risk of the generating centers on fresh held-out samples.

    Returns ``(mean, standard error of the mean, held-out samples)``.
    """
    samples = [generate(spec.replace(n=heldout_n), seed=s)
               for s in derive_seeds(seed, replicates)]
    vals = np.array([empirical_risk(H, spec.centers) for H in samples])
    se = vals.std(ddof=1) / np.sqrt(replicates) if replicates > 1 else float("nan")
    return float(vals.mean()), float(se), samples


def run_consistency(spec, schedule, k=None, restarts=10, seed=0, theta=1.0,
                    heldout_n=100_000, replicates=10, max_iter=1000):
    """Minimal empirical risk along an increasing sample-size schedule.

    Sample sizes are nested prefixes of one i.i.d. stream, so each row adds
    observations to the previous one. Each row also reports the single-run
    risk (first restart only), the held-out risk of the fitted codebook, and
    the held-out reference risk of the generating centers.
    """
    schedule = [int(n) for n in schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 1:
        raise InvalidSpec("schedule must be a strictly increasing list of positive sizes")
    k = spec.k if k is None else int(k)
    gen_seed, ref_seed, fit_seed = derive_seeds(seed, 3)
    stream = generate(spec.replace(n=schedule[-1]), seed=gen_seed)
    if np.any(stream.min(axis=1) <= 0) and theta == 1.0:
        raise InvalidSpec("generator produced margin points; supply theta < 1")
    ref, se, held = reference_risk(spec, heldout_n, replicates, ref_seed)
    pooled = np.vstack(held)
    rows = []
    for n, s in zip(schedule, derive_seeds(fit_seed, len(schedule))):
        X = stream[:n]
        best = run_cm_restarts(X, k, restarts, s, max_iter=max_iter, theta=theta)
        single = run_cm(X, k, seed=np.random.default_rng(derive_seeds(s, 1)[0]),
                        max_iter=max_iter, theta=theta)
        rows.append(ConsistencyRow(
            n=n,
            min_empirical_risk=best.risk,
            single_run_risk=single.risk,
            heldout_risk=empirical_risk(pooled, best.codebook, theta),
            reference_risk=ref,
            reference_se=se,
            seed=int(seed),
        ))
    return ConsistencyCurve(rows)
