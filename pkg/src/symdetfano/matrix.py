"""Matrices of polynomials: determinants, cofactors, adjugates.

Two independent determinant routes are provided.  ``det_bareiss`` runs
fraction-free elimination with exact polynomial division; ``det_laplace``
expands along the first row.  They share nothing but polynomial arithmetic,
so agreement between them is a real check.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .errors import IndexOutOfRangeError, NotSquareError, RingMismatchError
from .poly import Poly, Ring, ring_hom_apply


class PolyMatrix:
    """Rectangular matrix with entries in one polynomial ring."""

    __slots__ = ("ring", "rows")

    def __init__(self, ring: Ring, rows: Iterable[Iterable[object]]):
        self.ring = ring
        built = []
        for row in rows:
            r = []
            for x in row:
                if isinstance(x, Poly):
                    if x.ring != ring:
                        raise RingMismatchError(f"entry in {x.ring}, matrix ring {ring}")
                    r.append(x)
                elif isinstance(x, str):
                    r.append(ring.parse(x))
                else:
                    r.append(ring.const(x))
            built.append(tuple(r))
        if not built or not built[0]:
            raise ValueError("matrix must have at least one row and one column")
        if len({len(r) for r in built}) != 1:
            raise ValueError("ragged matrix")
        self.rows = tuple(built)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "PolyMatrix":
        return cls(ring, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def __getitem__(self, ij: tuple[int, int]) -> Poly:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.ring == other.ring and self.rows == other.rows

    def __repr__(self) -> str:
        body = ";\n ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"PolyMatrix([{body}])"

    def column(self, j: int) -> tuple[Poly, ...]:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(self.ring, zip(*self.rows))

    def is_symmetric(self) -> bool:
        return self.shape[0] == self.shape[1] and self == self.transpose()

    def map(self, fn: Callable[[Poly], Poly], ring: Ring | None = None) -> "PolyMatrix":
        return PolyMatrix(ring or self.ring, [[fn(x) for x in r] for r in self.rows])

    def pullback(self, assignment, target: Ring) -> "PolyMatrix":
        return self.map(lambda x: ring_hom_apply(assignment, x, target), target)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = self.ring.zero
                for x, y in zip(r, c):
                    if x and y:
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.ring, out)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix(self.ring, [[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix(self.ring, [[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, p) -> "PolyMatrix":
        return PolyMatrix(self.ring, [[x * p for x in r] for r in self.rows])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(self.ring, [[self.rows[i][j] for j in cols] for i in rows])

    def delete(self, i: int, j: int) -> "PolyMatrix":
        """Drop row ``i`` and column ``j`` (0-based)."""
        n, m = self.shape
        return self.submatrix([k for k in range(n) if k != i], [k for k in range(m) if k != j])

    def evaluate(self, values) -> list[list]:
        return [[x.evaluate(values) for x in r] for r in self.rows]

    def to_text(self) -> list[list[str]]:
        return [[x.to_text() for x in r] for r in self.rows]


def _square(m: PolyMatrix) -> int:
    n, k = m.shape
    if n != k:
        raise NotSquareError(f"matrix of shape {m.shape} is not square")
    return n


def det_laplace(m: PolyMatrix) -> Poly:
    """Determinant by recursive cofactor expansion along the first row."""
    n = _square(m)
    rows = [list(r) for r in m.rows]
    memo: dict[tuple[int, tuple[int, ...]], Poly] = {}

    # minors of the bottom rows, keyed by (first row, remaining columns)
    def rec(top: int, cols: tuple[int, ...]) -> Poly:
        if len(cols) == 1:
            return rows[top][cols[0]]
        key = (top, cols)
        got = memo.get(key)
        if got is not None:
            return got
        total = m.ring.zero
        for k, j in enumerate(cols):
            entry = rows[top][j]
            if not entry:
                continue
            sub = rec(top + 1, cols[:k] + cols[k + 1:])
            term = entry * sub
            total = total - term if k % 2 else total + term
        memo[key] = total
        return total

    return rec(0, tuple(range(n)))


def det_bareiss(m: PolyMatrix) -> Poly:
    """Determinant by fraction-free (Bareiss) elimination with exact division."""
    n = _square(m)
    a = [list(r) for r in m.rows]
    sign = 1
    prev = m.ring.one
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return m.ring.zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).divide_exact(prev)
            a[i][k] = m.ring.zero
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def det(m: PolyMatrix, method: str = "bareiss") -> Poly:
    if method == "bareiss":
        return det_bareiss(m)
    if method == "laplace":
        return det_laplace(m)
    raise ValueError(f"unknown determinant method {method!r}")


def minor(m: PolyMatrix, i: int, j: int, method: str = "bareiss") -> Poly:
    """Determinant of ``m`` with row ``i`` and column ``j`` deleted (1-based)."""
    n = _square(m)
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexOutOfRangeError(f"({i}, {j}) outside 1..{n}")
    if n == 1:
        return m.ring.one
    return det(m.delete(i - 1, j - 1), method)


def cofactor(m: PolyMatrix, i: int, j: int, method: str = "bareiss") -> Poly:
    """``(-1)^(i+j)`` times the (i, j) minor; indices are 1-based."""
    mi = minor(m, i, j, method)
    return -mi if (i + j) % 2 else mi


def adjugate(m: PolyMatrix, method: str = "bareiss") -> PolyMatrix:
    n = _square(m)
    return PolyMatrix(m.ring, [[cofactor(m, j, i, method) for j in range(1, n + 1)] for i in range(1, n + 1)])


def rank_over_fraction_field(m: PolyMatrix) -> int:
    """Rank of ``m`` over the fraction field of its polynomial ring.

    Fraction-free elimination with full pivot search; every division is exact.
    """
    a = [list(r) for r in m.rows]
    nr, nc = m.shape
    prev = m.ring.one
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                a[i][j] = (a[i][j] * a[r][c] - a[i][c] * a[r][j]).divide_exact(prev)
            a[i][c] = m.ring.zero
        prev = a[r][c]
        r += 1
        if r == nr:
            break
    return r
