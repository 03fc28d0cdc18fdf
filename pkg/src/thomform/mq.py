"""The Mathai-Quillen Thom form from its explicit sum over index splits."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import factorial

from gmpy2 import mpq

from .coeff import DimensionMismatch, Scalar
from .forms import Chart, ChartForm, GaussianChartForm, accumulate
from .gaussian import permutation_parity
from .matforms import FormMatrix

PERM_SUM_LIMIT = 8


@dataclass(frozen=True)
class SubsetSplit:
    n: int
    I: tuple[int, ...]
    Icomp: tuple[int, ...]
    sign: int


def split_sign(I, Icomp) -> int:
    """Parity of the permutation listing ``I`` (increasing) before ``Icomp`` (increasing)."""
    I, Icomp = sorted(I), sorted(Icomp)
    if set(I) & set(Icomp):
        raise ValueError("index sets overlap")
    if sorted(I + Icomp) != list(range(len(I) + len(Icomp))) and \
            sorted(I + Icomp) != list(range(1, len(I) + len(Icomp) + 1)):
        raise ValueError("index sets do not cover 1..n")
    return permutation_parity(I + Icomp)


def even_splits(n: int) -> list[SubsetSplit]:
    """All splits of 0..n-1 whose complement part has even size."""
    out = []
    for k in range(0, n + 1, 2):
        for Icomp in combinations(range(n), k):
            I = tuple(i for i in range(n) if i not in Icomp)
            out.append(SubsetSplit(n, I, Icomp, split_sign(I, Icomp)))
    return out


def _check_pf_args(omega: FormMatrix, Icomp) -> tuple[int, ...]:
    Icomp = tuple(Icomp)
    if len(Icomp) % 2:
        raise ValueError("Pfaffian factor needs an even index set")
    return Icomp


def _chart_of(omega: FormMatrix) -> Chart:
    return omega.chart if omega.rows else None


def pfaffian_factor_perm(omega: FormMatrix, Icomp, chart: Chart | None = None) -> ChartForm:
    """``1/(2^k (k/2)!) sum_sigma sgn(sigma) prod Omega[i_s(1), i_s(2)] ...`` literally."""
    Icomp = _check_pf_args(omega, Icomp)
    chart = chart or _chart_of(omega)
    k = len(Icomp)
    if k == 0:
        return ChartForm.one(chart)
    pair_cache: dict[tuple, ChartForm] = {}

    def pairs_product(pairs):
        hit = pair_cache.get(pairs)
        if hit is None:
            head = omega[Icomp[pairs[0][0]], Icomp[pairs[0][1]]]
            hit = head if len(pairs) == 1 else head.wedge(pairs_product(pairs[1:]))
            pair_cache[pairs] = hit
        return hit

    total = ChartForm.zero(chart)
    for perm in permutations(range(k)):
        pairs = tuple((perm[j], perm[j + 1]) for j in range(0, k, 2))
        term = pairs_product(pairs)
        if term.terms:
            total = total + term * _pf_sign(perm)
    return total * mpq(1, 2 ** k * factorial(k // 2))


def _pf_sign(perm) -> int:
    return permutation_parity(perm)


def pfaffian_factor_recursive(omega: FormMatrix, Icomp, chart: Chart | None = None) -> ChartForm:
    """Same value via Pfaffian expansion along the first row (assumes skew ``omega``).

    The permutation sum equals 2^(k/2) (k/2)! Pf, so the factor is Pf / 2^(k/2).
    """
    Icomp = _check_pf_args(omega, Icomp)
    chart = chart or _chart_of(omega)

    @lru_cache(maxsize=None)
    def pf(idx: tuple[int, ...]) -> ChartForm:
        if not idx:
            return ChartForm.one(chart)
        first, rest = idx[0], idx[1:]
        total = ChartForm.zero(chart)
        for pos, j in enumerate(rest):
            entry = omega[first, j]
            if not entry.terms:
                continue
            minor = pf(rest[:pos] + rest[pos + 1:])
            if minor.terms:
                term = entry.wedge(minor)
                total = total + (term if pos % 2 == 0 else -term)
        return total

    return pf(Icomp) * mpq(1, 2 ** (len(Icomp) // 2))


def pfaffian_factor(omega: FormMatrix, Icomp, chart: Chart | None = None, check: bool = False) -> ChartForm:
    Icomp = tuple(Icomp)
    if len(Icomp) > PERM_SUM_LIMIT:
        return pfaffian_factor_recursive(omega, Icomp, chart)
    value = pfaffian_factor_perm(omega, Icomp, chart)
    if check and len(Icomp) <= 6:
        other = pfaffian_factor_recursive(omega, Icomp, chart)
        if not value.equals(other):
            raise ArithmeticError(f"Pfaffian algorithms disagree on {Icomp}")
    return value


def connection_factors(chart: Chart, theta: FormMatrix) -> list[ChartForm]:
    """``(dx + theta x)_i`` for each fiber index i."""
    n = chart.fiber_dim
    xs = [ChartForm.x(chart, j) for j in range(n)]
    out = []
    for i in range(n):
        f = ChartForm.dx(chart, i)
        for j in range(n):
            entry = theta[i, j]
            if entry.terms:
                f = f + entry.wedge(xs[j])
        out.append(f)
    return out


def mq_form(chart: Chart, theta: FormMatrix, omega: FormMatrix, pfaffian_check: bool = False) -> GaussianChartForm:
    """Mathai-Quillen form on ``chart`` for connection ``theta`` with curvature ``omega``.

    pi^(-n/2) exp(-|x|^2) sum over splits I, I' (|I'| even) of
    sign(I, I') (dx + theta x)_I  *  Pfaffian factor of omega on I'.
    """
    n = chart.fiber_dim
    if theta.shape != (n, n) or omega.shape != (n, n):
        raise DimensionMismatch(f"theta {theta.shape}, omega {omega.shape} on a rank-{n} chart")
    factors = connection_factors(chart, theta)
    one = ChartForm.one(chart)

    @lru_cache(maxsize=None)
    def prod(idx: tuple[int, ...]) -> ChartForm:
        if not idx:
            return one
        return prod(idx[:-1]).wedge(factors[idx[-1]])

    total: dict[int, dict] = {}

    for sp in even_splits(n):
        pf = pfaffian_factor(omega, sp.Icomp, chart, check=pfaffian_check)
        if not pf.terms:
            continue
        term = prod(sp.I).wedge(pf)
        accumulate(total, term, sp.sign)
    body = ChartForm(chart, total) * Scalar({-n: 1})
    return GaussianChartForm(chart, body.terms)


def thom_gaussian(chart: Chart) -> GaussianChartForm:
    """pi^(-N/2) exp(-|y|^2) dy_1 ... dy_N over every fiber of ``chart``."""
    form = GaussianChartForm.scalar(chart, Scalar({-chart.fiber_dim: 1}))
    for i in range(chart.fiber_dim):
        form = form.wedge(ChartForm.dx(chart, i))
    return form


__all__ = [
    "SubsetSplit", "split_sign", "even_splits", "pfaffian_factor_perm", "pfaffian_factor_recursive",
    "pfaffian_factor", "connection_factors", "mq_form", "thom_gaussian",
]
