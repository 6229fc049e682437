import cmath
import json
import os

import pytest
from hypothesis import strategies as st

from expsolve import expsum as es

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def ref():
    with open(os.path.join(DATA, "reference.json")) as fh:
        return json.load(fh)


def cx(pair):
    return complex(pair[0], pair[1])


def unit_disk():
    # radii stay above 1e-6 so triple products never underflow
    return st.builds(lambda r, t: cmath.rect(r, t),
                     st.floats(1e-6, 1), st.floats(0, 6.283185307179586))


def gaussian_int(lo=-5, hi=5):
    return st.builds(complex, st.integers(lo, hi), st.integers(lo, hi))


@st.composite
def int_expsums(draw, max_terms=4, max_degree=2, lo=-4, hi=4):
    """ExpSums with Gaussian-integer coefficients and frequencies: all
    arithmetic on them is exact in double precision."""
    n = draw(st.integers(0, max_terms))
    parts = []
    for _ in range(n):
        freq = draw(gaussian_int(-3, 3))
        for d in range(draw(st.integers(0, max_degree)) + 1):
            parts.append((draw(gaussian_int(lo, hi)), freq, d))
    return es.make(parts)


@st.composite
def float_expsums(draw, max_terms=6, max_degree=2):
    n = draw(st.integers(1, max_terms))
    parts = []
    for _ in range(n):
        freq = draw(unit_disk()) * 2
        for d in range(draw(st.integers(0, max_degree)) + 1):
            parts.append((draw(unit_disk()), freq, d))
    return es.make(parts)


def coeff_close(f, g, rel=1e-10):
    """Coefficient-wise agreement relative to the larger sup scale."""
    diff = es.add(f, es.scale(g, -1))
    return es.max_coeff(diff) <= rel * max(es.sup_scale(f), es.sup_scale(g))


ACCEPTANCE_LINES = []


def record(number, ok, text):
    """Log one acceptance line; printed again in the terminal summary."""
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
