import numpy as np
import pytest
from hypothesis import strategies as st


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_simplex(rng, n, m, concentration=1.0):
    return rng.dirichlet(np.full(m, concentration), size=n)


@st.composite
def prob_vectors(draw, min_m=2, max_m=8, interior=False):
    m = draw(st.integers(min_m, max_m))
    lo = 1e-3 if interior else 0.0
    w = draw(st.lists(st.floats(lo, 1.0), min_size=m, max_size=m))
    w = np.asarray(w)
    if w.sum() == 0:
        w[0] = 1.0
    return w / w.sum()


@st.composite
def prob_pairs(draw, interior=False):
    m = draw(st.integers(2, 8))
    lo = 1e-3 if interior else 0.0
    out = []
    for _ in range(2):
        w = np.asarray(draw(st.lists(st.floats(lo, 1.0), min_size=m, max_size=m)))
        if w.sum() == 0:
            w[0] = 1.0
        out.append(w / w.sum())
    return out


ACCEPTANCE = []


def report_criterion(number, title, passed, detail=""):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} {title} ({detail})"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
