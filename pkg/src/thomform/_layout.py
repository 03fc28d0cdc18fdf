"""Packed monomial encoding shared by jets and chart forms.

A monomial is a single Python int made of 16-bit slots, lowest first:

    [pi exponent + bias] [t_1] ... [t_d] [total t-degree] [x_1] ... [x_N]

The pi slot stores the half-integer power of pi (``e`` meaning pi^(e/2)).
Multiplying two monomials is ``m1 + m2 - PI_BIAS``; the total-degree slot
makes truncation a single shift-and-mask.  Because fiber slots come last,
a base-only monomial has the same encoding in every chart with the same
base dimension.
"""

from __future__ import annotations

from functools import lru_cache

SLOT = 16
SLOT_MASK = (1 << SLOT) - 1
PI_BIAS = 1 << (SLOT - 1)
ONE = PI_BIAS


class Layout:
    __slots__ = ("base_dim", "fiber_dim", "deg_shift", "x_base", "t_units", "x_units", "deg_unit")

    def __init__(self, base_dim: int, fiber_dim: int) -> None:
        self.base_dim = base_dim
        self.fiber_dim = fiber_dim
        self.deg_shift = SLOT * (1 + base_dim)
        self.x_base = SLOT * (2 + base_dim)
        self.deg_unit = 1 << self.deg_shift
        self.t_units = tuple(1 << (SLOT * (1 + a)) for a in range(base_dim))
        self.x_units = tuple(1 << (self.x_base + SLOT * i) for i in range(fiber_dim))

    def pack(self, t_exps=(), x_exps=(), pie: int = 0) -> int:
        m = pie + PI_BIAS
        deg = 0
        for a, e in enumerate(t_exps):
            if e:
                m += e * self.t_units[a]
                deg += e
        m += deg * self.deg_unit
        for i, e in enumerate(x_exps):
            if e:
                m += e * self.x_units[i]
        return m

    def unpack(self, mono: int) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
        pie = (mono & SLOT_MASK) - PI_BIAS
        t = tuple((mono >> (SLOT * (1 + a))) & SLOT_MASK for a in range(self.base_dim))
        x = tuple((mono >> (self.x_base + SLOT * i)) & SLOT_MASK for i in range(self.fiber_dim))
        return pie, t, x

    def tdeg(self, mono: int) -> int:
        return (mono >> self.deg_shift) & SLOT_MASK

    def t_exp(self, mono: int, a: int) -> int:
        return (mono >> (SLOT * (1 + a))) & SLOT_MASK

    def x_exp(self, mono: int, i: int) -> int:
        return (mono >> (self.x_base + SLOT * i)) & SLOT_MASK

    def split_x(self, mono: int) -> tuple[int, tuple[int, ...]]:
        """Return (base part of the monomial, fiber exponents)."""
        low = mono & ((1 << self.x_base) - 1)
        x = tuple((mono >> (self.x_base + SLOT * i)) & SLOT_MASK for i in range(self.fiber_dim))
        return low, x


@lru_cache(maxsize=None)
def layout(base_dim: int, fiber_dim: int) -> Layout:
    return Layout(base_dim, fiber_dim)


def by_degree(poly: dict, deg_shift: int) -> list[tuple[int, list[tuple[int, object]]]]:
    """Bucket a packed polynomial by total base degree, for truncated products."""
    buckets: dict[int, list] = {}
    for m, c in poly.items():
        buckets.setdefault((m >> deg_shift) & SLOT_MASK, []).append((m - PI_BIAS, c))
    return sorted(buckets.items())


def mul_into(out: dict, p: dict, q_buckets, deg_shift: int, order: int, sign: int = 1) -> None:
    """Accumulate the truncated product ``sign * p * q`` into ``out``."""
    get = out.get
    for m1, c1 in p.items():
        room = order - ((m1 >> deg_shift) & SLOT_MASK)
        if room < 0:
            continue
        if sign < 0:
            c1 = -c1
        for deg, items in q_buckets:
            if deg > room:
                break
            for m2, c2 in items:
                k = m1 + m2
                out[k] = get(k, 0) + c1 * c2


def prune(poly: dict) -> dict:
    return {m: c for m, c in poly.items() if c}


@lru_cache(maxsize=1 << 16)
def merge_sign(mask1: int, mask2: int) -> int:
    """Sign of sorting the concatenated generator lists ``mask1 ++ mask2``."""
    inversions = 0
    m = mask2
    while m:
        low = m & -m
        c = low.bit_length() - 1
        inversions += (mask1 >> (c + 1)).bit_count()
        m ^= low
    return -1 if inversions & 1 else 1
