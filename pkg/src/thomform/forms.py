"""Differential forms on a local chart of a vector bundle.

Generators are ordered ``dt_1 .. dt_d, dx_1 .. dx_N`` and a Grassmann
monomial is a bitmask over that order.  Coefficients are packed polynomials
in (pi^(1/2), t, x); see ``_layout``.  A :class:`GaussianChartForm` carries an
implicit ``exp(-|x|^2)`` factor over all fiber variables of its chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Rational

from gmpy2 import mpq

from ._layout import ONE, PI_BIAS, SLOT_MASK, by_degree, layout, merge_sign, mul_into, prune
from .coeff import DimensionMismatch, Jet, Scalar, to_mpq


class ChartMismatch(ValueError):
    pass


class WeightClash(ValueError):
    pass


class WeightNotPreserved(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    base_dim: int
    fiber_dim: int
    order: int
    split: int | None = None
    orientation: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.split is None:
            object.__setattr__(self, "split", self.fiber_dim)
        if self.orientation is None:
            object.__setattr__(self, "orientation", tuple(range(self.fiber_dim)))
        if not 0 <= self.split <= self.fiber_dim:
            raise ValueError(f"split {self.split} outside 0..{self.fiber_dim}")
        if sorted(self.orientation) != list(range(self.fiber_dim)):
            raise ValueError("orientation must be a permutation of the fiber indices")

    @property
    def layout(self):
        return layout(self.base_dim, self.fiber_dim)

    def base(self) -> Chart:
        return Chart(self.base_dim, 0, self.order)

    def with_fiber(self, fiber_dim: int, split: int | None = None) -> Chart:
        return Chart(self.base_dim, fiber_dim, self.order, split)

    def dx_bit(self, i: int) -> int:
        return 1 << (self.base_dim + i)

    @property
    def base_mask(self) -> int:
        return (1 << self.base_dim) - 1


def _compatible(a: Chart, b: Chart) -> Chart:
    if a == b:
        return a
    if a.base_dim != b.base_dim or a.order != b.order:
        raise ChartMismatch(f"{a} vs {b}")
    if b.fiber_dim == 0:
        return a
    if a.fiber_dim == 0:
        return b
    if a.fiber_dim == b.fiber_dim:
        return a
    raise ChartMismatch(f"{a} vs {b}")


def _is_exact_number(c) -> bool:
    return isinstance(c, (int, Rational)) or type(c).__name__ == "mpq"


class ChartForm:
    """Polynomial differential form on a chart: ``{mask: {packed mono: rational}}``."""

    weighted = False
    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: dict | None = None) -> None:
        self.chart = chart
        self.terms = {}
        for mask, poly in (terms or {}).items():
            poly = prune(poly)
            if poly:
                self.terms[mask] = poly

    def _new(self, terms, chart=None):
        return type(self)(chart or self.chart, terms)

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart):
        return cls(chart, {})

    @classmethod
    def scalar(cls, chart: Chart, value):
        value = Scalar.coerce(value)
        return cls(chart, {0: {PI_BIAS + e: c for e, c in value.terms.items()}})

    @classmethod
    def one(cls, chart: Chart):
        return cls.scalar(chart, 1)

    @classmethod
    def from_jet(cls, chart: Chart, jet: Jet):
        if jet.base_dim != chart.base_dim or jet.order != chart.order:
            raise DimensionMismatch("jet does not live on this chart's base")
        return cls(chart, {0: dict(jet.poly)})

    @classmethod
    def dt(cls, chart: Chart, a: int):
        if not 0 <= a < chart.base_dim:
            raise DimensionMismatch(f"no base differential dt{a + 1}")
        return cls(chart, {1 << a: {ONE: mpq(1)}})

    @classmethod
    def dx(cls, chart: Chart, i: int):
        if not 0 <= i < chart.fiber_dim:
            raise DimensionMismatch(f"no fiber differential dx{i + 1}")
        return cls(chart, {chart.dx_bit(i): {ONE: mpq(1)}})

    @classmethod
    def x(cls, chart: Chart, i: int):
        if not 0 <= i < chart.fiber_dim:
            raise DimensionMismatch(f"no fiber variable x{i + 1}")
        return cls(chart, {0: {ONE + chart.layout.x_units[i]: mpq(1)}})

    @classmethod
    def t(cls, chart: Chart, a: int):
        return cls.from_jet(chart, Jet.variable(a, chart.base_dim, chart.order))

    # structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {m.bit_count() for m in self.terms}

    @property
    def degree(self) -> int | None:
        """Form degree if homogeneous (zero counts as degree 0), else None."""
        ds = self.degrees()
        if not ds:
            return 0
        return ds.pop() if len(ds) == 1 else None

    def term_count(self) -> int:
        return sum(len(p) for p in self.terms.values())

    def lift(self, chart: Chart):
        """Re-home a base form (no fiber content) onto a chart with fibers."""
        if self.chart == chart:
            return self
        if self.chart.fiber_dim != 0 or _compatible(self.chart, chart) != chart:
            raise ChartMismatch(f"cannot lift form on {self.chart} to {chart}")
        return self._new(self.terms, chart)

    def plain(self) -> ChartForm:
        """Drop the type-level weight flag (same data)."""
        return ChartForm(self.chart, self.terms)

    # linear structure ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, ChartForm):
            if other.weighted != self.weighted:
                raise WeightClash("adding weighted and unweighted forms")
            chart = _compatible(self.chart, other.chart)
            out = {m: dict(p) for m, p in self.terms.items()}
            for mask, poly in other.terms.items():
                acc = out.setdefault(mask, {})
                for mono, c in poly.items():
                    acc[mono] = acc.get(mono, 0) + c
            return self._new(out, chart)
        if _is_exact_number(other) or isinstance(other, Scalar):
            return self + self.scalar(self.chart, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self._new({m: {k: -c for k, c in p.items()} for m, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Multiply by an exact number, a Scalar, or a Jet (0-form coefficient)."""
        if isinstance(other, ChartForm):
            return self.wedge(other)
        if _is_exact_number(other):
            c = to_mpq(other)
            if not c:
                return self._new({})
            return self._new({m: {k: v * c for k, v in p.items()} for m, p in self.terms.items()})
        if isinstance(other, Scalar):
            out = {}
            for mask, poly in self.terms.items():
                acc = {}
                for e, c in other.terms.items():
                    for k, v in poly.items():
                        acc[k + e] = acc.get(k + e, 0) + v * c
                out[mask] = acc
            return self._new(out)
        if isinstance(other, Jet):
            return self.wedge(ChartForm.from_jet(self.chart.base(), other))
        return NotImplemented

    __rmul__ = __mul__

    def wedge(self, other):
        if self.weighted and other.weighted:
            raise WeightClash("product of two Gaussian-weighted forms")
        chart = _compatible(self.chart, other.chart)
        lay = chart.layout
        shift, order = lay.deg_shift, chart.order
        out: dict[int, dict] = {}
        buckets = {mask: by_degree(poly, shift) for mask, poly in other.terms.items()}
        for m1, p1 in self.terms.items():
            for m2, qb in buckets.items():
                if m1 & m2:
                    continue
                mul_into(out.setdefault(m1 | m2, {}), p1, qb, shift, order, merge_sign(m1, m2))
        cls = GaussianChartForm if (self.weighted or other.weighted) else ChartForm
        return cls(chart, out)

    __xor__ = wedge

    # exterior derivative ------------------------------------------------
    def d(self):
        return exterior_d(self)

    # comparison ---------------------------------------------------------
    def truncate(self, order: int):
        shift = self.chart.layout.deg_shift
        return self._new({m: {k: c for k, c in p.items() if (k >> shift) & SLOT_MASK <= order}
                          for m, p in self.terms.items()})

    def difference(self, other, order: int | None = None):
        """First differing term at base order ``order`` as a witness dict, or None."""
        if self.weighted != other.weighted:
            return {"term": "<weight>", "left": str(self.weighted), "right": str(other.weighted)}
        chart = _compatible(self.chart, other.chart)
        order = chart.order if order is None else order
        a = self.truncate(order).terms
        b = other.truncate(order).terms
        keys = set()
        for terms in (a, b):
            for mask, poly in terms.items():
                keys.update((mask, mono) for mono in poly)
        for mask, mono in sorted(keys, key=lambda k: _term_sort_key(chart, *k)):
            ca = a.get(mask, {}).get(mono, 0)
            cb = b.get(mask, {}).get(mono, 0)
            if ca != cb:
                return {"term": format_term(chart, mask, mono, 1, bare=True),
                        "left": str(mpq(ca)), "right": str(mpq(cb))}
        return None

    def equals(self, other, order: int | None = None) -> bool:
        return self.difference(other, order) is None

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChartForm):
            return NotImplemented
        try:
            return self.equals(other)
        except ChartMismatch:
            return False

    __hash__ = None

    # serialization ------------------------------------------------------
    def to_text(self) -> str:
        chart = self.chart
        keys = sorted(((m, k) for m, p in self.terms.items() for k in p),
                      key=lambda mk: _term_sort_key(chart, *mk))
        body = " ".join(format_term(chart, m, k, self.terms[m][k]) for m, k in keys) or "0"
        if body.startswith("+ "):
            body = body[2:]
        return f"exp(-|x|^2) * [{body}]" if self.weighted else body

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"{type(self).__name__}(d={self.chart.base_dim}, N={self.chart.fiber_dim}, K={self.chart.order}, {self.to_text()})"


class GaussianChartForm(ChartForm):
    """``exp(-|x|^2) * inner``, the weight ranging over every fiber variable."""

    weighted = True
    __slots__ = ()

    @property
    def inner(self) -> ChartForm:
        return self.plain()

    @classmethod
    def weight(cls, chart: Chart):
        return cls.one(chart)

    @classmethod
    def from_inner(cls, inner: ChartForm):
        return cls(inner.chart, inner.terms)


def _term_sort_key(chart: Chart, mask: int, mono: int):
    pie, t, x = chart.layout.unpack(mono)
    bits = tuple(i for i in range(mask.bit_length()) if mask >> i & 1)
    return (len(bits), bits, sum(t), tuple(-e for e in t), sum(x), tuple(-e for e in x), pie)


def generator_names(chart: Chart) -> list[str]:
    return [f"dt{a + 1}" for a in range(chart.base_dim)] + [f"dx{i + 1}" for i in range(chart.fiber_dim)]


def format_term(chart: Chart, mask: int, mono: int, coeff, bare: bool = False) -> str:
    pie, t, x = chart.layout.unpack(mono)
    factors = []
    if pie:
        factors.append(f"pi^({pie}/2)" if pie % 2 else f"pi^{pie // 2}")
    factors += [f"t{a + 1}" + (f"^{e}" if e > 1 else "") for a, e in enumerate(t) if e]
    factors += [f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(x) if e]
    names = generator_names(chart)
    diff = "^".join(names[i] for i in range(mask.bit_length()) if mask >> i & 1)
    mono_txt = "*".join(factors)
    if bare:
        return " ".join(s for s in (mono_txt or "1", diff) if s)
    c = mpq(coeff)
    sign = "-" if c < 0 else "+"
    mag = abs(c)
    if mono_txt:
        body = mono_txt if mag == 1 else f"{mag}*{mono_txt}"
    else:
        body = "" if (mag == 1 and diff) else str(mag)
    return " ".join(s for s in (sign, body, diff) if s)


def exterior_d(form: ChartForm):
    """Exterior derivative; the Gaussian weight contributes ``-2 x_i dx_i``.

    Base-degree coefficients of the result are reliable up to order K-1.
    """
    chart = form.chart
    lay = chart.layout
    d = chart.base_dim
    out: dict[int, dict] = {}

    def put(mask, mono, c):
        acc = out.setdefault(mask, {})
        acc[mono] = acc.get(mono, 0) + c

    for mask, poly in form.terms.items():
        for a in range(d):
            bit = 1 << a
            if mask & bit:
                continue
            new_mask = mask | bit
            sign = -1 if (mask & (bit - 1)).bit_count() & 1 else 1
            step = lay.t_units[a] + lay.deg_unit
            for mono, c in poly.items():
                e = lay.t_exp(mono, a)
                if e:
                    put(new_mask, mono - step, sign * e * c)
        for i in range(chart.fiber_dim):
            bit = 1 << (d + i)
            if mask & bit:
                continue
            new_mask = mask | bit
            sign = -1 if (mask & (bit - 1)).bit_count() & 1 else 1
            unit = lay.x_units[i]
            for mono, c in poly.items():
                e = lay.x_exp(mono, i)
                if e:
                    put(new_mask, mono - unit, sign * e * c)
                if form.weighted:
                    put(new_mask, mono + unit, -2 * sign * c)
    return form._new(out)


def jet_form(chart: Chart, jet: Jet) -> ChartForm:
    return ChartForm.from_jet(chart, jet)


def d_jet(chart: Chart, jet: Jet) -> ChartForm:
    """``sum_a (df/dt_a) dt_a`` as a base 1-form on ``chart``."""
    out = {}
    for a in range(chart.base_dim):
        der = jet.derivative(a)
        if der.poly:
            out[1 << a] = dict(der.poly)
    return ChartForm(chart, out)


def _matrix_images(M, target: Chart):
    """Images of x_old_i and dx_old_i under x_old = M x_new."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if cols != target.fiber_dim:
        raise DimensionMismatch(f"frame has {cols} columns, target chart has {target.fiber_dim} fibers")
    xs = [ChartForm.x(target, j) for j in range(cols)]
    dxs = [ChartForm.dx(target, j) for j in range(cols)]
    base = target.base()
    x_img, dx_img = [], []
    for i in range(rows):
        xi = ChartForm.zero(target)
        dxi = ChartForm.zero(target)
        for j in range(cols):
            entry = M[i][j]
            if entry.is_zero():
                continue
            f = ChartForm.from_jet(base, entry)
            xi = xi + f.wedge(xs[j])
            dxi = dxi + d_jet(base, entry).wedge(xs[j]) + f.wedge(dxs[j])
        x_img.append(xi)
        dx_img.append(dxi)
    return x_img, dx_img


def _rows(M):
    return M.rows if hasattr(M, "rows") and not isinstance(M, list) else M


def substitute_fiber_frame(form: ChartForm, M, target: Chart | None = None):
    """Pull back along ``x_old = M(t) x_new``, ``dx_old = dM x_new + M dx_new``.

    ``M`` is a matrix (nested list or JetMatrix) of Jets with ``n_old`` rows and
    ``n_new`` columns.  Gaussian forms require ``M^T M = 1`` at the chart order.
    """
    rows = _rows(M)
    src = form.chart
    if len(rows) != src.fiber_dim:
        raise DimensionMismatch(f"frame has {len(rows)} rows, form has {src.fiber_dim} fibers")
    cols = len(rows[0]) if rows else 0
    if target is None:
        target = Chart(src.base_dim, cols, src.order)
    if target.base_dim != src.base_dim or target.order != src.order:
        raise ChartMismatch("substitution must keep the base")
    if form.weighted and not _is_isometry(rows, src.base_dim, src.order, cols):
        raise WeightNotPreserved("frame is not an isometry; exp(-|x|^2) would not be preserved")

    x_img, dx_img = _matrix_images(rows, target)
    src_lay = src.layout
    d = src.base_dim
    one = ChartForm.one(target)
    power_cache: dict[tuple[int, ...], ChartForm] = {(0,) * src.fiber_dim: one}

    def x_power(exps):
        hit = power_cache.get(exps)
        if hit is None:
            i = max(k for k, e in enumerate(exps) if e)
            lower = list(exps)
            lower[i] -= 1
            hit = x_power(tuple(lower)).wedge(x_img[i])
            power_cache[exps] = hit
        return hit

    dx_cache: dict[int, ChartForm] = {}
    out: dict[int, dict] = {}
    for mask, poly in form.terms.items():
        fiber_mask = mask >> d
        dxprod = dx_cache.get(fiber_mask)
        if dxprod is None:
            dxprod = one
            for i in range(src.fiber_dim):
                if fiber_mask >> i & 1:
                    dxprod = dxprod.wedge(dx_img[i])
            dx_cache[fiber_mask] = dxprod
        grouped: dict[tuple[int, ...], dict[int, mpq]] = {}
        for mono, c in poly.items():
            low, xe = src_lay.split_x(mono)
            grouped.setdefault(xe, {})[low] = c
        coeff = ChartForm.zero(target)
        for xe, low_poly in grouped.items():
            coeff = coeff + ChartForm(target, {0: low_poly}).wedge(x_power(xe))
        dt_part = ChartForm(target, {mask & src.base_mask: {ONE: mpq(1)}})
        accumulate(out, dt_part.wedge(coeff).wedge(dxprod))
    cls = GaussianChartForm if form.weighted else ChartForm
    return cls(target, out)


def accumulate(out: dict, form: ChartForm, scale=1) -> None:
    """In-place ``out += scale * form`` on raw term dictionaries."""
    for mask, poly in form.terms.items():
        acc = out.setdefault(mask, {})
        for mono, c in poly.items():
            acc[mono] = acc.get(mono, 0) + (c if scale == 1 else c * scale)


def _is_isometry(rows, base_dim: int, order: int, cols: int) -> bool:
    for j in range(cols):
        for k in range(j, cols):
            acc = Jet.zero(base_dim, order)
            for row in rows:
                acc = acc + row[j] * row[k]
            if not acc.equals(Jet.constant(1 if j == k else 0, base_dim, order)):
                return False
    return True


__all__ = [
    "Chart", "ChartForm", "GaussianChartForm", "ChartMismatch", "WeightClash", "WeightNotPreserved",
    "exterior_d", "substitute_fiber_frame", "d_jet", "format_term", "generator_names",
]
