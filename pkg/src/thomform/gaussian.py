"""Gaussian fiber integration of forms with an ``exp(-|x|^2)`` weight.

Fiber integration writes each Grassmann monomial as ``(residual) ^ dx_H``
with the integrated differentials last, in the complementary orientation
order, and integrates the polynomial coefficient against the Gaussian one
variable at a time.  The Wick pairing sum is an independent second route.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import factorial

from gmpy2 import mpq

from ._layout import ONE, merge_sign
from .coeff import DimensionMismatch, Scalar
from .forms import Chart, ChartForm, GaussianChartForm, substitute_fiber_frame


class DegreeMismatch(ValueError):
    pass


def gaussian_moment(k: int) -> Scalar:
    """Integral of exp(-x^2) x^k over the real line."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if k % 2:
        return Scalar()
    return Scalar({1: _moment_rational(k)})


def _moment_rational(k: int) -> mpq:
    # (k-1)!! / 2^(k/2), the rational part of the even moment
    num = 1
    for j in range(k - 1, 0, -2):
        num *= j
    return mpq(num, 2 ** (k // 2))


def permutation_parity(perm) -> int:
    perm = list(perm)
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inv & 1 else 1


def _berezin_sign(residual_mask: int, h_mask: int, orientation_parity: int) -> int:
    """Sign of rewriting the sorted monomial as ``residual ^ dx_H`` (H in oriented order)."""
    return merge_sign(residual_mask, h_mask) * orientation_parity


def fiber_integrate(form: GaussianChartForm, fibers, complement_orientation=None):
    """Push forward along the fiber coordinates in ``fibers`` (0-based indices).

    Only monomials containing every ``dx_h`` (h in ``fibers``) contribute.  The
    result keeps the Gaussian weight over the remaining fiber variables, or is a
    plain ChartForm on the base chart when nothing remains.
    """
    chart = form.chart
    H = sorted(set(fibers))
    if any(not 0 <= h < chart.fiber_dim for h in H):
        raise DimensionMismatch(f"fiber indices {H} outside 0..{chart.fiber_dim - 1}")
    if len(H) != len(list(fibers)):
        raise ValueError("repeated fiber index")
    if complement_orientation is None:
        complement_orientation = H
    complement_orientation = list(complement_orientation)
    if sorted(complement_orientation) != H:
        raise ValueError("complement orientation must be a permutation of the integrated fibers")
    if not H:
        return form
    if not form.weighted:
        raise ValueError("fiber integration needs a Gaussian-weighted form")

    orient_parity = permutation_parity([H.index(h) for h in complement_orientation])
    d = chart.base_dim
    keep = [i for i in range(chart.fiber_dim) if i not in H]
    new_split = sum(1 for i in keep if i < chart.split)
    target = Chart(d, len(keep), chart.order, new_split)
    src_lay, dst_lay = chart.layout, target.layout
    h_mask = sum(1 << (d + h) for h in H)
    pi_shift = len(H)

    x_cache: dict[tuple[int, ...], tuple[mpq, int] | None] = {}
    out: dict[int, dict] = {}
    for mask, poly in form.terms.items():
        if mask & h_mask != h_mask:
            continue
        residual = mask ^ h_mask
        sign = _berezin_sign(residual, h_mask, orient_parity)
        new_mask = residual & ((1 << d) - 1)
        for pos, i in enumerate(keep):
            if residual >> (d + i) & 1:
                new_mask |= 1 << (d + pos)
        acc = out.setdefault(new_mask, {})
        for mono, c in poly.items():
            low, xe = src_lay.split_x(mono)
            hit = x_cache.get(xe, False)
            if hit is False:
                if any(xe[h] % 2 for h in H):
                    hit = None
                else:
                    r = mpq(1)
                    for h in H:
                        r *= _moment_rational(xe[h])
                    kept = dst_lay.pack((), tuple(xe[i] for i in keep)) - ONE
                    hit = (r, kept)
                x_cache[xe] = hit
            if hit is None:
                continue
            r, kept = hit
            key = low + kept + pi_shift
            acc[key] = acc.get(key, 0) + sign * r * c
    cls = GaussianChartForm if keep else ChartForm
    return cls(target, out)


def fiber_integrate_rotated(form: GaussianChartForm, R, keep: int):
    """Push forward along the complement of the first ``keep`` columns of the frame ``R``.

    The result lives on fiber coordinates with respect to those columns.
    """
    n = form.chart.fiber_dim
    if not 0 <= keep <= n:
        raise ValueError(f"keep={keep} outside 0..{n}")
    rotated = substitute_fiber_frame(form, R, form.chart)
    return fiber_integrate(rotated, range(keep, n))


def pullback_inclusion(form: ChartForm, iota, target: Chart | None = None):
    """Pull back along an isometric inclusion ``x_big = iota(t) x_small``."""
    rows = iota.rows if hasattr(iota, "rows") else iota
    cols = len(rows[0]) if rows else 0
    if target is None:
        target = Chart(form.chart.base_dim, cols, form.chart.order)
    return substitute_fiber_frame(form, iota, target)


@dataclass
class WickInput:
    """Rows ``b_1^T .. b_s^T`` of length ``l``; entries are base 0-forms or 1-forms."""

    l: int
    rows: list[list[ChartForm]]
    base: Chart | None = None

    def __post_init__(self) -> None:
        if any(len(r) != self.l for r in self.rows):
            raise DimensionMismatch(f"every row must have length {self.l}")
        if self.base is None:
            if not self.rows or not self.l:
                raise ValueError("empty WickInput needs an explicit base chart")
            self.base = self.rows[0][0].chart

    @property
    def s(self) -> int:
        return len(self.rows)

    @property
    def chart(self) -> Chart:
        return self.base

    def entry_degree(self) -> int:
        degrees = set()
        for row in self.rows:
            for e in row:
                if not e.is_zero():
                    deg = e.degree
                    if deg is None:
                        raise DegreeMismatch("inhomogeneous entry")
                    degrees.add(deg)
        if len(degrees) > 1:
            raise DegreeMismatch(f"mixed entry degrees {sorted(degrees)}")
        deg = degrees.pop() if degrees else 0
        if deg not in (0, 1):
            raise DegreeMismatch("entries must be 0-forms or 1-forms")
        return deg


def _wick_sign(perm, odd_entries: bool) -> int:
    return permutation_parity(perm) if odd_entries else 1


def wick(inp: WickInput) -> ChartForm:
    """Integral of exp(-|z|^2)(b_1.z)...(b_s.z) over R^l by the pairing sum."""
    deg = inp.entry_degree()
    chart = inp.chart
    s = inp.s
    if s % 2:
        return ChartForm.zero(chart)

    def dot(i, j):
        acc = ChartForm.zero(chart)
        for a, b in zip(inp.rows[i], inp.rows[j]):
            if a.terms and b.terms:
                acc = acc + a.wedge(b)
        return acc

    dots = {(i, j): dot(i, j) for i in range(s) for j in range(s) if i != j}
    total = ChartForm.zero(chart)
    for perm in permutations(range(s)):
        term = ChartForm.one(chart)
        for k in range(0, s, 2):
            term = term.wedge(dots[perm[k], perm[k + 1]])
            if term.is_zero():
                break
        if term.terms:
            total = total + term * _wick_sign(perm, deg == 1)
    prefactor = Scalar({inp.l: mpq(1, 2 ** s * factorial(s // 2))})
    return total * prefactor


def wick_integrand(inp: WickInput) -> GaussianChartForm:
    """``exp(-|z|^2) (b_1.z) ... (b_s.z) dz_1 ... dz_l`` on a chart with ``l`` fibers."""
    base = inp.chart
    chart = Chart(base.base_dim, inp.l, base.order)
    form = GaussianChartForm.one(chart)
    for row in inp.rows:
        lin = ChartForm.zero(chart)
        for j, b in enumerate(row):
            if b.terms:
                lin = lin + b.wedge(ChartForm.x(chart, j))
        form = form.wedge(lin)
    for j in range(inp.l):
        form = form.wedge(ChartForm.dx(chart, j))
    return form


def gaussian_integral_direct(inp: WickInput) -> ChartForm:
    """Same integral as :func:`wick`, through factorized one-dimensional moments."""
    inp.entry_degree()
    return fiber_integrate(wick_integrand(inp), range(inp.l))


__all__ = [
    "gaussian_moment", "fiber_integrate", "fiber_integrate_rotated", "pullback_inclusion",
    "WickInput", "wick", "wick_integrand", "gaussian_integral_direct", "DegreeMismatch",
    "permutation_parity",
]
