"""Jet matrices, exactly orthogonal frames, and matrices of forms.

Connections live here only as their local connection-form matrices.
"""

from __future__ import annotations

from gmpy2 import mpq

from .coeff import DimensionMismatch, Jet, NotInvertible
from .forms import Chart, ChartForm, d_jet


class NotSkew(ValueError):
    pass


class NotOrthogonal(ValueError):
    pass


class NotInvolution(ValueError):
    pass


class JetMatrix:
    """Dense matrix of Jets sharing one (base_dim, order)."""

    def __init__(self, rows, base_dim: int | None = None, order: int | None = None) -> None:
        self.rows = [list(r) for r in rows]
        first = next((e for r in self.rows for e in r), None)
        self.base_dim = first.base_dim if first is not None else base_dim
        self.order = first.order if first is not None else order
        if any(len(r) != len(self.rows[0]) for r in self.rows):
            raise DimensionMismatch("ragged matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, n: int, base_dim: int, order: int) -> JetMatrix:
        return cls.scalar_diag([1] * n, base_dim, order)

    @classmethod
    def zeros(cls, rows: int, cols: int, base_dim: int, order: int) -> JetMatrix:
        z = Jet.zero(base_dim, order)
        return cls([[z] * cols for _ in range(rows)], base_dim, order)

    @classmethod
    def scalar_diag(cls, values, base_dim: int, order: int) -> JetMatrix:
        n = len(values)
        return cls([[Jet.constant(values[i] if i == j else 0, base_dim, order) for j in range(n)]
                    for i in range(n)], base_dim, order)

    @classmethod
    def from_rationals(cls, rows, base_dim: int, order: int) -> JetMatrix:
        return cls([[Jet.constant(v, base_dim, order) for v in r] for r in rows], base_dim, order)

    @classmethod
    def block(cls, blocks) -> JetMatrix:
        """Assemble from a 2-D list of JetMatrix blocks."""
        rows = []
        for brow in blocks:
            height = brow[0].shape[0]
            for i in range(height):
                rows.append([e for b in brow for e in b.rows[i]])
        return cls(rows)

    @classmethod
    def block_diag(cls, *mats) -> JetMatrix:
        base_dim, order = mats[0].base_dim, mats[0].order
        blocks = [[m if i == j else cls.zeros(m.shape[0], o.shape[1], base_dim, order)
                   for j, o in enumerate(mats)] for i, m in enumerate(mats)]
        return cls.block(blocks)

    @property
    def T(self) -> JetMatrix:
        r, c = self.shape
        return JetMatrix([[self.rows[i][j] for i in range(r)] for j in range(c)], self.base_dim, self.order)

    def __add__(self, other: JetMatrix) -> JetMatrix:
        return JetMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
                         self.base_dim, self.order)

    def __sub__(self, other: JetMatrix) -> JetMatrix:
        return self + (-other)

    def __neg__(self) -> JetMatrix:
        return JetMatrix([[-a for a in r] for r in self.rows], self.base_dim, self.order)

    def scale(self, c) -> JetMatrix:
        return JetMatrix([[a * c for a in r] for r in self.rows], self.base_dim, self.order)

    def __matmul__(self, other: JetMatrix) -> JetMatrix:
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        cols = other.T.rows
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = Jet.zero(self.base_dim, self.order)
                for a, b in zip(r, c):
                    if a.poly and b.poly:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return JetMatrix(out, self.base_dim, self.order)

    def sub(self, rows, cols) -> JetMatrix:
        return JetMatrix([[self.rows[i][j] for j in cols] for i in rows], self.base_dim, self.order)

    def equals(self, other: JetMatrix, order: int | None = None) -> bool:
        return self.shape == other.shape and all(
            a.equals(b, order) for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2))

    def is_skew(self) -> bool:
        return self.equals(-self.T)

    def is_orthogonal(self, order: int | None = None) -> bool:
        n = self.shape[1]
        return (self.T @ self).equals(JetMatrix.identity(n, self.base_dim, self.order), order)

    def at_origin(self) -> list[list[mpq]]:
        return [[e.at_origin().rational() for e in r] for r in self.rows]

    def inverse(self) -> JetMatrix:
        """Series inverse: invert the constant part exactly, then a Neumann series."""
        n, m = self.shape
        if n != m:
            raise DimensionMismatch("inverse of non-square matrix")
        try:
            c0 = self.at_origin()
        except ValueError as exc:
            raise NotInvertible("constant part is not rational") from exc
        inv0 = JetMatrix.from_rationals(rational_inverse(c0), self.base_dim, self.order)
        nil = self - JetMatrix.from_rationals(c0, self.base_dim, self.order)
        step = -(inv0 @ nil)
        out = term = JetMatrix.identity(n, self.base_dim, self.order)
        for _ in range(self.order):
            term = term @ step
            out = out + term
        return out @ inv0

    def d(self, chart: Chart | None = None) -> FormMatrix:
        chart = chart or Chart(self.base_dim, 0, self.order)
        return FormMatrix([[d_jet(chart, e) for e in r] for r in self.rows])

    def as_forms(self, chart: Chart | None = None) -> FormMatrix:
        chart = chart or Chart(self.base_dim, 0, self.order)
        return FormMatrix([[ChartForm.from_jet(chart, e) for e in r] for r in self.rows])

    def __repr__(self) -> str:
        return "JetMatrix[\n" + "\n".join("  [" + ", ".join(str(e) for e in r) + "]" for r in self.rows) + "\n]"


class OrthoJetMatrix(JetMatrix):
    """Jet matrix with ``A^T A = 1`` exactly at its truncation order (checked)."""

    claimed_orthogonal = True

    def __init__(self, rows, base_dim=None, order=None, check: bool = True) -> None:
        super().__init__(rows, base_dim, order)
        if check and not self.is_orthogonal():
            raise NotOrthogonal("A^T A != 1 at truncation order")

    @classmethod
    def of(cls, M: JetMatrix, check: bool = True) -> OrthoJetMatrix:
        return cls(M.rows, M.base_dim, M.order, check=check)


def rational_inverse(rows) -> list[list[mpq]]:
    n = len(rows)
    a = [[mpq(v) for v in r] + [mpq(1 if i == j else 0) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise NotInvertible("singular constant part")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [r[n:] for r in a]


def rational_det(rows) -> mpq:
    n = len(rows)
    a = [[mpq(v) for v in r] for r in rows]
    det = mpq(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return mpq(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return det


class FormMatrix:
    """Matrix of ChartForms (connection forms, curvature, Maurer-Cartan forms)."""

    def __init__(self, rows) -> None:
        self.rows = [list(r) for r in rows]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    @property
    def chart(self) -> Chart:
        return self.rows[0][0].chart

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def zeros(cls, rows: int, cols: int, chart: Chart) -> FormMatrix:
        return cls([[ChartForm.zero(chart) for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def block_diag(cls, *mats: FormMatrix) -> FormMatrix:
        chart = mats[0].chart
        n = sum(m.shape[0] for m in mats)
        out = cls.zeros(n, n, chart)
        off = 0
        for m in mats:
            k = m.shape[0]
            for i in range(k):
                for j in range(k):
                    out.rows[off + i][off + j] = m.rows[i][j]
            off += k
        return out

    @classmethod
    def assemble(cls, oo, oh, ho, hh) -> FormMatrix:
        top = [a + b for a, b in zip(oo.rows, oh.rows)] if oo.rows else [list(r) for r in oh.rows]
        bottom = [a + b for a, b in zip(ho.rows, hh.rows)] if ho.rows else [list(r) for r in hh.rows]
        return cls(top + bottom)

    @property
    def T(self) -> FormMatrix:
        r, c = self.shape
        return FormMatrix([[self.rows[i][j] for i in range(r)] for j in range(c)])

    def __add__(self, other: FormMatrix) -> FormMatrix:
        return FormMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self) -> FormMatrix:
        return FormMatrix([[-a for a in r] for r in self.rows])

    def __sub__(self, other: FormMatrix) -> FormMatrix:
        return self + (-other)

    def scale(self, c) -> FormMatrix:
        """Entrywise multiplication by a number, Scalar or Jet."""
        return FormMatrix([[a * c for a in r] for r in self.rows])

    def __matmul__(self, other: FormMatrix) -> FormMatrix:
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        cols = other.T.rows
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = None
                for a, b in zip(r, c):
                    if a.terms and b.terms:
                        p = a.wedge(b)
                        acc = p if acc is None else acc + p
                row.append(acc if acc is not None else ChartForm.zero(r[0].chart))
            out.append(row)
        return FormMatrix(out)

    def d(self) -> FormMatrix:
        return FormMatrix([[a.d() for a in r] for r in self.rows])

    def sub(self, rows, cols) -> FormMatrix:
        return FormMatrix([[self.rows[i][j] for j in cols] for i in rows])

    def truncate(self, order: int) -> FormMatrix:
        return FormMatrix([[a.truncate(order) for a in r] for r in self.rows])

    def difference(self, other: FormMatrix, order: int | None = None):
        if self.shape != other.shape:
            return {"entry": "<shape>", "left": str(self.shape), "right": str(other.shape)}
        for i, (r1, r2) in enumerate(zip(self.rows, other.rows)):
            for j, (a, b) in enumerate(zip(r1, r2)):
                w = a.difference(b, order)
                if w is not None:
                    return {"entry": f"({i + 1},{j + 1})", **w}
        return None

    def equals(self, other: FormMatrix, order: int | None = None) -> bool:
        return self.difference(other, order) is None

    def is_skew(self, order: int | None = None) -> bool:
        return self.equals(-self.T, order)

    def term_count(self) -> int:
        return sum(a.term_count() for r in self.rows for a in r)

    def __repr__(self) -> str:
        return "FormMatrix[\n" + "\n".join("  [" + ", ".join(str(a) for a in r) + "]" for r in self.rows) + "\n]"


def cayley(S: JetMatrix) -> OrthoJetMatrix:
    """``(1 - S)(1 + S)^-1`` for skew ``S``: exactly orthogonal with det +1."""
    n, m = S.shape
    if n != m or not S.is_skew():
        raise NotSkew("Cayley transform needs a square skew-symmetric matrix")
    one = JetMatrix.identity(n, S.base_dim, S.order)
    A = (one - S) @ (one + S).inverse()
    return OrthoJetMatrix.of(A)


def maurer_cartan(A: JetMatrix) -> FormMatrix:
    """``A^-1 dA``, with the inverse realized as the transpose."""
    if not getattr(A, "claimed_orthogonal", False):
        if not A.is_orthogonal():
            raise NotOrthogonal("Maurer-Cartan form needs an orthogonal frame")
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch("square frame required")
    return A.T.as_forms() @ A.d()


def block(M: FormMatrix, which: str, split: int) -> FormMatrix:
    """Sub-block ``oo``/``oh``/``ho``/``hh`` with respect to the first ``split`` indices."""
    n, m = M.shape
    if n != m:
        raise DimensionMismatch("block decomposition of a non-square matrix")
    if not 0 <= split <= n:
        raise ValueError(f"split {split} outside 0..{n}")
    o, h = range(split), range(split, n)
    try:
        rows, cols = {"o": o, "h": h}[which[0]], {"o": o, "h": h}[which[1]]
    except (KeyError, IndexError):
        raise ValueError(f"unknown block {which!r}") from None
    return M.sub(rows, cols)


def restricted_connection(A: JetMatrix, split: int) -> tuple[FormMatrix, FormMatrix]:
    """Connection and curvature induced on the span of the first ``split`` columns of ``A``.

    theta = (A^-1 dA)_oo and Omega = -(A^-1 dA)_oh (A^-1 dA)_ho.
    """
    n = A.shape[0]
    if not 0 < split < n:
        raise ValueError(f"split must satisfy 0 < split < {n}")
    mc = maurer_cartan(A)
    theta = block(mc, "oo", split)
    omega = -(block(mc, "oh", split) @ block(mc, "ho", split))
    return theta, omega


def curvature_structure(theta: FormMatrix) -> FormMatrix:
    """d theta + theta theta."""
    return theta.d() + theta @ theta


def constrain(theta: FormMatrix, Q: JetMatrix) -> FormMatrix:
    """Constrained connection 1/2 (theta + Q theta Q + Q dQ) for an involution ``Q``."""
    n = Q.shape[0]
    if Q.shape != theta.shape:
        raise DimensionMismatch("Q and theta differ in size")
    if not (Q @ Q).equals(JetMatrix.identity(n, Q.base_dim, Q.order)):
        raise NotInvolution("Q^2 != 1")
    q = Q.as_forms()
    half = mpq(1, 2)
    return (theta + q @ theta @ q + q @ Q.d()).scale(half)


def frame_connection(theta: FormMatrix, A: JetMatrix) -> FormMatrix:
    """Connection form in the frame given by the columns of ``A``: A^T theta A + A^T dA."""
    a = A.as_forms()
    at = A.T.as_forms()
    return at @ theta @ a + at @ A.d()


def reflection(A: JetMatrix, split: int) -> JetMatrix:
    """``A Q0 A^T`` with ``Q0 = diag(-1_split, 1)``: the orthogonal involution with
    (-1)-eigenspace spanned by the first ``split`` columns of ``A``."""
    n = A.shape[0]
    q0 = JetMatrix.scalar_diag([-1] * split + [1] * (n - split), A.base_dim, A.order)
    return A @ q0 @ A.T


__all__ = [
    "JetMatrix", "OrthoJetMatrix", "FormMatrix", "NotSkew", "NotOrthogonal", "NotInvolution",
    "cayley", "maurer_cartan", "block", "restricted_connection", "curvature_structure",
    "constrain", "frame_connection", "reflection", "rational_inverse", "rational_det",
]
