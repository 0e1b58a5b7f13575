import json

import numpy as np
import pytest

from simplex_cluster.cm import Assignment
from simplex_cluster.datagen import MixtureSpec, generate, load_preset
from simplex_cluster.model_selection import (
    RegularizationParams,
    SelectionRow,
    check_constraints,
    choose_k,
    cost,
    select_k,
)

from conftest import random_simplex

P = RegularizationParams(0.1, 0.03)


def test_cost_values():
    assert cost(4, P) == pytest.approx(0.006, abs=1e-15)
    assert cost(6, P) == pytest.approx(0.009, abs=1e-15)
    for k in range(1, 10):
        assert cost(2 * k, P) == pytest.approx(2 * cost(k, P), abs=1e-15)
    with pytest.raises(ValueError):
        cost(0, P)


@pytest.mark.parametrize("alpha, beta", [(0.0, 0.03), (1.0, 0.03), (0.1, 0.0), (0.1, -1.0)])
def test_params_validation(alpha, beta):
    with pytest.raises(ValueError):
        RegularizationParams(alpha, beta)


def test_constraints_single_cluster():
    a = Assignment.from_codes(np.zeros(10, int), 1)
    chk = check_constraints(a, [[0.5, 0.5]], P)
    assert chk.c1 and chk.c2


def test_constraints_identical_centers_fail_c2():
    a = Assignment.from_codes([0, 0, 1, 1], 2)
    chk = check_constraints(a, [[0.3, 0.7], [0.3, 0.7]], P)
    assert chk.c1 and not chk.c2
    assert chk.close_pairs == [(0, 1)]


def test_constraints_small_cluster_fails_c1():
    codes = np.array([0] * 95 + [1] * 5)
    a = Assignment.from_codes(codes, 2)
    chk = check_constraints(a, [[0.9, 0.1], [0.1, 0.9]], P)
    assert a.proportions[1] == 0.05
    assert not chk.c1 and chk.small_clusters == [1]
    assert chk.c2


def test_single_cluster_data_selects_one():
    # tight enough that splitting the cloud gains less than one cluster's cost
    spec = MixtureSpec([[0.3, 0.3, 0.4]], [1.0], 2000.0, 400, seed=2)
    X = generate(spec)
    rep = select_k(X, range(1, 6), P, restarts=3, seed=0)
    assert rep.chosen_k == 1
    assert rep.regularized_risks.argmin() == 0


def test_singleton_range(rng):
    X = random_simplex(rng, 30, 3)
    rep = select_k(X, [3], P, restarts=2, seed=0)
    assert rep.chosen_k == 3 and rep.ks == [3]


def test_report_rows_regularized_exactly():
    X = generate(load_preset("fig1-4c", n=600, seed=1))
    rep = select_k(X, range(1, 7), P, restarts=3, seed=1)
    for r in rep.rows:
        assert r.regularized_risk == r.risk + 0.1 * 0.03 * r.k / 2
        assert r.restarts == 3
    assert rep.chosen_k == min(rep.rows, key=lambda r: (r.regularized_risk, r.k)).k
    assert isinstance(rep.monotone_violations(), list)


def test_zero_cost_picks_largest_k():
    # well spread data: risk strictly decreases with k
    X = generate(load_preset("fig1-6c", n=400, seed=5))
    rows = []
    rep = select_k(X, range(1, 7), P, restarts=3, seed=2)
    assert np.all(np.diff(rep.risks) < 0)
    for r in rep.rows:
        rows.append(SelectionRow(r.k, r.risk, 0.0, r.risk, r.c1, r.c2, r.restarts))
    assert choose_k(rows) == 6


def test_ties_go_to_smaller_k():
    rows = [SelectionRow(k, 0.0, 0.0, 1.0, True, True, 1) for k in (3, 1, 2)]
    assert choose_k(rows) == 1


def test_enforce_constraints_excludes():
    rows = [SelectionRow(1, 0.5, 0.0, 0.5, True, True, 1),
            SelectionRow(2, 0.1, 0.0, 0.1, False, True, 1)]
    assert choose_k(rows) == 2
    assert choose_k(rows, enforce_constraints=True) == 1
    assert choose_k(rows[1:], enforce_constraints=True) is None


def test_determinism_and_serialization(rng):
    X = random_simplex(rng, 80, 3)
    a = select_k(X, range(1, 5), P, restarts=2, seed=9)
    b = select_k(X, range(1, 5), P, restarts=2, seed=9)
    assert a.to_csv() == b.to_csv()
    assert a.to_json() == b.to_json()
    assert a.to_csv().splitlines()[0] == "k,risk,cost,regularized_risk,c1,c2"
    d = json.loads(a.to_json())
    assert d["chosen_k"] == a.chosen_k and len(d["rows"]) == 4


def test_rows_do_not_depend_on_range(rng):
    X = random_simplex(rng, 60, 3)
    wide = select_k(X, range(1, 6), P, restarts=2, seed=4)
    narrow = select_k(X, [3], P, restarts=2, seed=4)
    assert wide.row(3).risk == narrow.row(3).risk
