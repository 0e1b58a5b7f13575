import itertools
import json

import numpy as np
import pytest

from simplex_cluster.cm import run_cm_restarts
from simplex_cluster.datagen import MixtureSpec, generate, load_preset
from simplex_cluster.exceptions import (
    InvalidSpec,
    NegativeEntry,
    NonNumericCell,
    RaggedRows,
    ZeroRowSum,
)
from simplex_cluster.io import (
    codebook_dict,
    export_codebook,
    export_dataset,
    ingest_csv,
    load_dataset,
    read_matrix,
)

CENTERS3 = [[0.7, 0.15, 0.15], [0.15, 0.7, 0.15], [0.15, 0.15, 0.7]]


def write(tmp_path, text, name="in.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_huge_concentration_collapses_to_centers():
    spec = MixtureSpec(CENTERS3, [1 / 3] * 3, 1e9, 300, seed=1)
    X, labels = generate(spec, return_labels=True)
    assert np.abs(X - spec.centers[labels]).max() < 1e-3


def test_component_mean_within_three_se():
    c = np.array([0.5, 0.3, 0.2])
    s = 20.0
    X = generate(MixtureSpec([c], [1.0], s, 20000, seed=3))
    # Dirichlet variance c(1-c)/(s+1)
    se = np.sqrt(c * (1 - c) / (s + 1) / len(X))
    assert np.all(np.abs(X.mean(axis=0) - c) < 3 * se)


def test_seed_determinism():
    spec = load_preset("fig1-4c", n=500)
    np.testing.assert_array_equal(generate(spec), generate(spec))
    np.testing.assert_array_equal(generate(spec, seed=4), generate(spec.replace(seed=4)))
    assert not np.array_equal(generate(spec, seed=1), generate(spec, seed=2))


def test_no_margin_points():
    spec = MixtureSpec([[0.98, 0.01, 0.01]], [1.0], 0.5, 2000, seed=0)
    X = generate(spec)
    assert X.min() > 0
    np.testing.assert_allclose(X.sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("kwargs", [
    dict(centers=[[0.5, 0.6]], weights=[1.0], concentration=1.0, n=5),
    dict(centers=[[1.0, 0.0]], weights=[1.0], concentration=1.0, n=5),
    dict(centers=[[1.0]], weights=[1.0], concentration=1.0, n=5),
    dict(centers=[[0.5, 0.5]], weights=[0.5, 0.5], concentration=1.0, n=5),
    dict(centers=[[0.5, 0.5]], weights=[1.0], concentration=0.0, n=5),
    dict(centers=[[0.5, 0.5]], weights=[1.0], concentration=1.0, n=0),
])
def test_invalid_spec(kwargs):
    with pytest.raises(InvalidSpec):
        MixtureSpec(**kwargs)


def test_presets_load():
    for name, k in (("fig1-4c", 4), ("fig1-6c", 6)):
        spec = load_preset(name)
        assert spec.k == k and spec.m == 3
        again = MixtureSpec.from_dict(spec.to_dict())
        np.testing.assert_allclose(again.centers, spec.centers, rtol=0, atol=1e-15)
        assert again.n == spec.n and again.seed == spec.seed
    with pytest.raises(InvalidSpec):
        load_preset("no-such-preset")


def test_csv_row_normalization(tmp_path):
    X = ingest_csv(write(tmp_path, "2,3,5\n1,1,2\n"))
    np.testing.assert_allclose(X[0], [0.2, 0.3, 0.5], atol=1e-15)
    np.testing.assert_allclose(X[1], [0.25, 0.25, 0.5], atol=1e-15)


def test_csv_ones_file(tmp_path):
    X = ingest_csv(write(tmp_path, "\n".join(["1,1,1,1"] * 5) + "\n"))
    np.testing.assert_allclose(X, 0.25, atol=1e-15)


def test_csv_header_detected(tmp_path):
    X = ingest_csv(write(tmp_path, "a,b\n1,3\n"))
    np.testing.assert_allclose(X, [[0.25, 0.75]])


@pytest.mark.parametrize("text, exc, row", [
    ("1,2\n0,0\n", ZeroRowSum, 1),
    ("1,2\n-1,3\n", NegativeEntry, 1),
    ("1,2\n1,2,3\n", RaggedRows, 1),
    ("1,2\n1,x\n", NonNumericCell, 1),
])
def test_csv_errors_name_row(tmp_path, text, exc, row):
    with pytest.raises(exc) as info:
        ingest_csv(write(tmp_path, text))
    assert info.value.row == row
    assert f"row {row}" in str(info.value)


def test_csv_scale_invariance(tmp_path, rng):
    A = rng.uniform(0.1, 5.0, size=(20, 4))
    p1 = write(tmp_path, "\n".join(",".join(repr(float(x)) for x in r) for r in A), "a.csv")
    p2 = write(tmp_path, "\n".join(",".join(repr(float(x)) for x in r) for r in 7 * A), "b.csv")
    np.testing.assert_allclose(ingest_csv(p1), ingest_csv(p2), rtol=0, atol=1e-15)


def test_missing_file_names_path(tmp_path):
    with pytest.raises(OSError, match="nope.csv"):
        read_matrix(tmp_path / "nope.csv")


@pytest.mark.parametrize("suffix", ["csv", "json"])
def test_dataset_round_trip(tmp_path, rng, suffix):
    X = rng.dirichlet(np.ones(5), size=40)
    path = tmp_path / f"d.{suffix}"
    export_dataset(X, path)
    assert np.abs(load_dataset(path) - X).max() <= 1e-12


def test_codebook_json_schema(tmp_path, rng):
    X = rng.dirichlet(np.ones(3), size=50)
    res = run_cm_restarts(X, 3, restarts=2, seed=5)
    path = tmp_path / "out" / "codebook.json"
    export_codebook(res, path, seed=5)
    d = json.loads(path.read_text())
    assert set(d) == {"k", "m", "seed", "prototypes", "assignment", "risk", "trace",
                      "iterations", "termination"}
    assert d == json.loads(json.dumps(codebook_dict(res, 5)))
    assert d["k"] == 3 and d["m"] == 3 and len(d["assignment"]) == 50
    assert d["termination"] == "converged"
    np.testing.assert_allclose(d["prototypes"], res.codebook, rtol=0, atol=0)


def _agreement(labels, codes, k):
    # best one-to-one relabeling by brute force over permutations
    best = 0
    for perm in itertools.permutations(range(k)):
        best = max(best, np.mean(np.asarray(perm)[codes] == labels))
    return best


@pytest.mark.parametrize("seed", range(10))
def test_recoverability(seed):
    spec = MixtureSpec(CENTERS3, [1 / 3] * 3, 200.0, 600, seed=seed)
    X, labels = generate(spec, return_labels=True)
    res = run_cm_restarts(X, 3, restarts=5, seed=seed)
    assert _agreement(labels, res.assignment.codes, 3) >= 0.95
