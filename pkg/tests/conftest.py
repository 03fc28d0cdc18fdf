from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import strategies as st

from thomform.coeff import Jet, monomials

CRITERIA: list[str] = []


@pytest.fixture
def criterion_log():
    return CRITERIA


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)


small_rationals = st.builds(lambda p, q: mpq(p, q), st.integers(-4, 4), st.sampled_from([1, 2, 3]))


@st.composite
def jets(draw, d=2, K=3, unit=False):
    coeffs = {e: draw(small_rationals) for e in monomials(d, K)}
    if unit:
        coeffs[(0,) * d] = mpq(1)
    return Jet.from_coeffs(d, K, coeffs)
