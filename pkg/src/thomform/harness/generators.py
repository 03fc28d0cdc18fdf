"""Deterministic random instances keyed by (seed, stream tag).

Each call builds its own counter-based Philox generator; nothing global.
Seed 0 is the flat sentinel: every generator returns its zero instance.
"""

from __future__ import annotations

import numpy as np
from gmpy2 import mpq

from ..coeff import Jet, monomials
from ..forms import Chart, ChartForm
from ..matforms import FormMatrix, JetMatrix

DENOMINATORS = (1, 2, 3)


class Unsupported(ValueError):
    pass


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, tag]))


def _rational(rng: np.random.Generator) -> mpq:
    return mpq(int(rng.integers(-3, 4)), DENOMINATORS[int(rng.integers(0, 3))])


def random_jet(d: int, K: int, seed: int, tag: int = 0, constant: bool = True, rng=None) -> Jet:
    if seed == 0:
        return Jet.zero(d, K)
    rng = rng or _rng(seed, tag)
    coeffs = {}
    for exps in monomials(d, K):
        if not constant and sum(exps) == 0:
            continue
        coeffs[exps] = _rational(rng)
    return Jet.from_coeffs(d, K, coeffs)


def random_skew_jet(dim: int, d: int, K: int, seed: int, tag: int = 0) -> JetMatrix:
    """Skew matrix of jets with numerators in [-3, 3] and denominators in {1, 2, 3}."""
    zero = Jet.zero(d, K)
    rows = [[zero] * dim for _ in range(dim)]
    if seed != 0:
        rng = _rng(seed, tag)
        for i in range(dim):
            for j in range(i + 1, dim):
                f = random_jet(d, K, seed, rng=rng)
                rows[i][j] = f
                rows[j][i] = -f
    return JetMatrix(rows, d, K)


def random_skew_forms(dim: int, d: int, K: int, seed: int, tag: int = 0) -> FormMatrix:
    """Skew matrix of base 1-forms sum_a S_a(t) dt_a with independent random skew jets S_a."""
    chart = Chart(d, 0, K)
    out = FormMatrix.zeros(dim, dim, chart)
    for a in range(d):
        S = random_skew_jet(dim, d, K, seed, tag=1000 * tag + a + 1)
        dt = ChartForm.dt(chart, a)
        for i in range(dim):
            for j in range(dim):
                if S[i, j].poly:
                    out.rows[i][j] = out.rows[i][j] + dt * S[i, j]
    return out


def partition_from(u: Jet) -> tuple[Jet, Jet]:
    """Rational parametrization of the circle: ((1-u^2), 2u) / (1+u^2)."""
    u2 = u * u
    inv = (u2 + 1).inverse()
    return (1 - u2) * inv, (u * 2) * inv


def random_partition_of_unity(s: int, d: int, K: int, seed: int, tag: int = 0) -> list[Jet]:
    if s != 2:
        raise Unsupported("only s = 2 partitions are generated")
    u = random_jet(d, K, seed, tag)
    return list(partition_from(u))
