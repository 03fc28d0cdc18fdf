"""Floating-point cross-check: evaluate forms at base points and integrate the
fiber by tensor-product Gauss-Hermite quadrature.

Nothing here feeds back into the exact engine.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .forms import Chart, ChartForm


@dataclass
class NumericForm:
    chart: Chart
    weighted: bool
    terms: dict[int, dict[tuple[int, ...], float]] = field(default_factory=dict)

    def max_abs(self) -> float:
        return max((abs(c) for p in self.terms.values() for c in p.values()), default=0.0)


def evaluate_at(form: ChartForm, point) -> NumericForm:
    """Evaluate every base-dependent coefficient at ``point`` (pi taken numerically)."""
    chart = form.chart
    if len(point) != chart.base_dim:
        raise ValueError(f"base point of length {len(point)} for base_dim {chart.base_dim}")
    t = [float(p) for p in point]
    lay = chart.layout
    out: dict[int, dict[tuple[int, ...], float]] = {}
    for mask, poly in form.terms.items():
        acc: dict[tuple[int, ...], float] = {}
        for mono, c in poly.items():
            pie, texp, xexp = lay.unpack(mono)
            val = float(c) * math.pi ** (pie / 2)
            for ta, e in zip(t, texp):
                val *= ta ** e
            acc[xexp] = acc.get(xexp, 0.0) + val
        out[mask] = acc
    return NumericForm(chart, form.weighted, out)


def _top_degree(nf: NumericForm, H) -> int:
    return max((x[h] for p in nf.terms.values() for x in p for h in H), default=0)


def default_nodes(nf: NumericForm, H) -> int:
    return _top_degree(nf, H) // 2 + 2


def _generators(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _inversions(seq) -> int:
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


def quad_fiber_integrate(nf: NumericForm, H, nodes: int | None = None, orientation=None) -> NumericForm:
    """Integrate the fiber variables ``H`` (integrated differentials placed last)."""
    if not nf.weighted:
        raise ValueError("quadrature needs the Gaussian weight")
    H = sorted(H)
    orientation = list(orientation) if orientation is not None else H
    chart = nf.chart
    d = chart.base_dim
    if nodes is None:
        nodes = default_nodes(nf, H)
    elif 2 * nodes - 1 < _top_degree(nf, H):
        need = default_nodes(nf, H)
        warnings.warn(f"{nodes} Gauss-Hermite nodes are not exact here; using {need}", stacklevel=2)
        nodes = need
    z, w = np.polynomial.hermite.hermgauss(nodes)
    grid = np.array(list(itertools.product(z, repeat=len(H)))) if H else np.zeros((1, 0))
    weights = np.array([math.prod(c) for c in itertools.product(w, repeat=len(H))]) if H else np.ones(1)

    keep = [i for i in range(chart.fiber_dim) if i not in H]
    h_gens = [d + h for h in orientation]
    out: dict[int, dict[tuple[int, ...], float]] = {}
    for mask, poly in nf.terms.items():
        gens = _generators(mask)
        if not all(g in gens for g in h_gens):
            continue
        residual = [g for g in gens if g not in h_gens]
        arranged = residual + h_gens
        sign = -1.0 if _inversions(arranged) % 2 else 1.0
        new_mask = sum(1 << g for g in residual if g < d)
        for g in residual:
            if g >= d:
                new_mask |= 1 << (d + keep.index(g - d))
        grouped: dict[tuple[int, ...], list] = {}
        for xexp, c in poly.items():
            grouped.setdefault(tuple(xexp[i] for i in keep), []).append((xexp, c))
        acc = out.setdefault(new_mask, {})
        for kept, items in grouped.items():
            vals = np.zeros(len(grid))
            for xexp, c in items:
                v = np.full(len(grid), c)
                for col, h in enumerate(H):
                    if xexp[h]:
                        v = v * grid[:, col] ** xexp[h]
                vals += v
            acc[kept] = acc.get(kept, 0.0) + sign * float(weights @ vals)
    new_chart = Chart(d, len(keep), chart.order)
    return NumericForm(new_chart, bool(keep), out)


def relative_error(a: NumericForm, b: NumericForm) -> float:
    """Largest coefficient difference, relative to the largest coefficient magnitude (at least 1)."""
    scale = max(1.0, a.max_abs(), b.max_abs())
    worst = 0.0
    for mask in set(a.terms) | set(b.terms):
        pa, pb = a.terms.get(mask, {}), b.terms.get(mask, {})
        for key in set(pa) | set(pb):
            worst = max(worst, abs(pa.get(key, 0.0) - pb.get(key, 0.0)))
    return worst / scale


def random_points(base_dim: int, count: int, seed: int) -> list[tuple[float, ...]]:
    rng = np.random.Generator(np.random.Philox(key=[seed, 0xC0FFEE]))
    return [tuple(float(v) for v in rng.uniform(-0.5, 0.5, base_dim)) for _ in range(count)]


def confirm_integral(lhs: ChartForm, integrand: ChartForm, H, order: int, points) -> float:
    """max relative error of ``lhs`` against the quadrature of ``integrand`` over ``H``."""
    lhs_t, integrand_t = lhs.truncate(order), integrand.truncate(order)
    worst = 0.0
    for p in points:
        quad = quad_fiber_integrate(evaluate_at(integrand_t, p), H)
        worst = max(worst, relative_error(evaluate_at(lhs_t, p), quad))
    return worst


def confirm_equal(lhs: ChartForm, rhs: ChartForm, order: int, points) -> float:
    worst = 0.0
    for p in points:
        worst = max(worst, relative_error(evaluate_at(lhs.truncate(order), p),
                                          evaluate_at(rhs.truncate(order), p)))
    return worst


__all__ = [
    "NumericForm", "evaluate_at", "quad_fiber_integrate", "relative_error", "random_points",
    "confirm_integral", "confirm_equal", "default_nodes",
]
