"""Exact coefficients Q[pi^(1/2), pi^(-1/2)] and truncated multivariate jets."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product as iproduct
from numbers import Rational

from gmpy2 import mpq

from ._layout import ONE, PI_BIAS, SLOT_MASK, by_degree, layout, mul_into, prune


class NotInvertible(ArithmeticError):
    pass


class DimensionMismatch(ValueError):
    pass


def to_mpq(value) -> mpq:
    if isinstance(value, (int, Rational)) or type(value).__name__ == "mpq":
        return mpq(value)
    if isinstance(value, str):
        return mpq(Fraction(value))
    raise TypeError(f"not an exact rational: {value!r}")


class Scalar:
    """Finite sum of rational multiples of pi^(e/2), stored as ``{e: rational}``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None) -> None:
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = {0: terms}
        self.terms = {int(e): to_mpq(c) for e, c in terms.items() if c}

    @classmethod
    def pi_power(cls, half_exponent: int, coeff=1) -> Scalar:
        return cls({half_exponent: coeff})

    @classmethod
    def coerce(cls, value) -> Scalar:
        return value if isinstance(value, Scalar) else cls({0: value})

    def __add__(self, other) -> Scalar:
        other = Scalar.coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Scalar:
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other) -> Scalar:
        return Scalar.coerce(other) - self

    def __mul__(self, other) -> Scalar:
        if isinstance(other, Jet):
            return NotImplemented
        other = Scalar.coerce(other)
        out: dict[int, mpq] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return Scalar(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_rational(self) -> bool:
        return set(self.terms) <= {0}

    def rational(self) -> mpq:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms.get(0, mpq(0))

    def __float__(self) -> float:
        return float(sum(float(c) * math.pi ** (e / 2) for e, c in self.terms.items()))

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(_scalar_term(e, c) for e, c in sorted(self.terms.items()))


def _scalar_term(e: int, c) -> str:
    if e == 0:
        return str(c)
    p = f"pi^({e}/2)" if e % 2 else f"pi^{e // 2}"
    return p if c == 1 else f"{c}*{p}"


class Jet:
    """Truncated polynomial in base variables t_1..t_d with Scalar coefficients.

    Internally a packed-monomial dictionary; ``coeffs`` gives the
    multi-index -> Scalar view.
    """

    __slots__ = ("base_dim", "order", "poly")

    def __init__(self, base_dim: int, order: int, poly: dict | None = None) -> None:
        self.base_dim = base_dim
        self.order = order
        self.poly = poly if poly is not None else {}

    # construction -------------------------------------------------------
    @classmethod
    def from_coeffs(cls, base_dim: int, order: int, coeffs: dict) -> Jet:
        """Build from ``{exponent tuple: rational or Scalar}``, dropping degrees above ``order``."""
        lay = layout(base_dim, 0)
        poly: dict[int, mpq] = {}
        for exps, c in coeffs.items():
            exps = tuple(exps)
            if len(exps) != base_dim:
                raise DimensionMismatch(f"multi-index {exps} for base_dim {base_dim}")
            if sum(exps) > order:
                continue
            for e, r in Scalar.coerce(c).terms.items():
                m = lay.pack(exps, (), e)
                poly[m] = poly.get(m, 0) + r
        return cls(base_dim, order, prune(poly))

    @classmethod
    def constant(cls, value, base_dim: int, order: int) -> Jet:
        return cls.from_coeffs(base_dim, order, {(0,) * base_dim: value})

    @classmethod
    def zero(cls, base_dim: int, order: int) -> Jet:
        return cls(base_dim, order, {})

    @classmethod
    def variable(cls, a: int, base_dim: int, order: int) -> Jet:
        exps = [0] * base_dim
        exps[a] = 1
        return cls.from_coeffs(base_dim, order, {tuple(exps): 1})

    # views --------------------------------------------------------------
    @property
    def coeffs(self) -> dict[tuple[int, ...], Scalar]:
        lay = layout(self.base_dim, 0)
        out: dict[tuple[int, ...], dict[int, mpq]] = {}
        for m, c in self.poly.items():
            pie, t, _ = lay.unpack(m)
            out.setdefault(t, {})[pie] = c
        return {t: Scalar(terms) for t, terms in out.items()}

    def at_origin(self) -> Scalar:
        return Scalar({(m & SLOT_MASK) - PI_BIAS: c for m, c in self.poly.items()
                       if layout(self.base_dim, 0).tdeg(m) == 0})

    def is_zero(self) -> bool:
        return not self.poly

    # arithmetic ---------------------------------------------------------
    def _check(self, other: Jet) -> None:
        if self.base_dim != other.base_dim or self.order != other.order:
            raise DimensionMismatch(
                f"jets over (d={self.base_dim}, K={self.order}) and (d={other.base_dim}, K={other.order})")

    def _coerce(self, other) -> Jet:
        if isinstance(other, Jet):
            self._check(other)
            return other
        return Jet.constant(other, self.base_dim, self.order)

    def __add__(self, other) -> Jet:
        other = self._coerce(other)
        out = dict(self.poly)
        for m, c in other.poly.items():
            out[m] = out.get(m, 0) + c
        return Jet(self.base_dim, self.order, prune(out))

    __radd__ = __add__

    def __neg__(self) -> Jet:
        return Jet(self.base_dim, self.order, {m: -c for m, c in self.poly.items()})

    def __sub__(self, other) -> Jet:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Jet:
        return self._coerce(other) - self

    def __mul__(self, other) -> Jet:
        if not isinstance(other, Jet):
            if isinstance(other, Scalar) or isinstance(other, (int, Rational)) or type(other).__name__ == "mpq":
                other = Jet.constant(other, self.base_dim, self.order)
            else:
                return NotImplemented
        self._check(other)
        lay = layout(self.base_dim, 0)
        out: dict[int, mpq] = {}
        mul_into(out, self.poly, by_degree(other.poly, lay.deg_shift), lay.deg_shift, self.order)
        return Jet(self.base_dim, self.order, prune(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Jet:
        out = Jet.constant(1, self.base_dim, self.order)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, a: int) -> Jet:
        """Partial derivative in t_a; keeps the declared order."""
        if not 0 <= a < self.base_dim:
            raise DimensionMismatch(f"no base variable {a}")
        lay = layout(self.base_dim, 0)
        step = lay.t_units[a] + lay.deg_unit
        out = {}
        for m, c in self.poly.items():
            e = lay.t_exp(m, a)
            if e:
                out[m - step] = c * e
        return Jet(self.base_dim, self.order, out)

    def inverse(self) -> Jet:
        c0 = self.at_origin()
        if not c0 or not c0.is_rational():
            raise NotInvertible(f"constant term {c0} is not an invertible rational")
        inv0 = 1 / c0.rational()
        nil = self - Jet.constant(c0, self.base_dim, self.order)
        step = nil * (-inv0)
        out = term = Jet.constant(1, self.base_dim, self.order)
        for _ in range(self.order):
            term = term * step
            out = out + term
        return out * inv0

    # comparison ---------------------------------------------------------
    def truncate(self, order: int) -> Jet:
        lay = layout(self.base_dim, 0)
        return Jet(self.base_dim, self.order, {m: c for m, c in self.poly.items() if lay.tdeg(m) <= order})

    def equals(self, other, order: int | None = None) -> bool:
        other = self._coerce(other)
        order = self.order if order is None else order
        return self.truncate(order).poly == other.truncate(order).poly

    def __eq__(self, other) -> bool:
        try:
            return self.equals(other)
        except (DimensionMismatch, TypeError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.base_dim, self.order, frozenset(self.poly.items())))

    def evaluate(self, point) -> float:
        if len(point) != self.base_dim:
            raise DimensionMismatch("base point has wrong length")
        total = 0.0
        for t, s in self.coeffs.items():
            total += float(s) * math.prod(float(p) ** e for p, e in zip(point, t))
        return total

    def __repr__(self) -> str:
        return f"Jet(d={self.base_dim}, K={self.order}, {self})"

    def __str__(self) -> str:
        if not self.poly:
            return "0"
        parts = []
        for t, s in sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), tuple(-e for e in kv[0]))):
            mono = "*".join(f"t{a + 1}" + (f"^{e}" if e > 1 else "") for a, e in enumerate(t) if e)
            sc = str(s)
            if " + " in sc:
                sc = f"({sc})"
            parts.append(mono if sc == "1" and mono else (f"{sc}*{mono}" if mono else sc))
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return text


def monomials(base_dim: int, order: int):
    """All exponent tuples of total degree <= order, graded."""
    out = [e for e in iproduct(range(order + 1), repeat=base_dim) if sum(e) <= order]
    return sorted(out, key=lambda e: (sum(e), tuple(-x for x in e)))


__all__ = ["Scalar", "Jet", "NotInvertible", "DimensionMismatch", "monomials", "ONE"]
