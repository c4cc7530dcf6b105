"""Graded membership in a submodule of a free module, by exact linear algebra.

A module element is a tuple of polynomials, one per basis vector of the free
module; basis vector ``i`` carries degree ``basis_degrees[i]``.  Membership of
``target`` in the span of the given columns is decided in the single degree
of ``target`` by solving for the coefficients of every column over a monomial
basis.  Because everything is homogeneous this is exact, not a truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DegreeMismatchError
from .linalg import solve_sparse
from .matrix import PolyMatrix
from .poly import Exponent, Poly, Ring, weighted_degree

ModuleElement = tuple[Poly, ...]


@dataclass(frozen=True)
class Witness:
    """Coefficients expressing a target through module columns."""
    columns: tuple[ModuleElement, ...]
    coefficients: tuple[Poly, ...]

    def combination(self) -> ModuleElement:
        ring = self.coefficients[0].ring
        out = [ring.zero] * len(self.columns[0])
        for col, c in zip(self.columns, self.coefficients):
            if not c:
                continue
            for i, entry in enumerate(col):
                if entry:
                    out[i] = out[i] + c * entry
        return tuple(out)

    def replays_to(self, target: Sequence[Poly]) -> bool:
        return self.combination() == tuple(target)


def element_degree(element: Sequence[Poly], basis_degrees: Sequence[int]) -> int | None:
    """Common degree of a homogeneous module element; None for the zero element."""
    degs = set()
    for p, bd in zip(element, basis_degrees):
        if not p:
            continue
        d = weighted_degree(p)
        if d is None:
            raise DegreeMismatchError(f"inhomogeneous component {p}")
        degs.add(d + bd)
    if len(degs) > 1:
        raise DegreeMismatchError(f"components of degrees {sorted(degs)}")
    return degs.pop() if degs else None


def matrix_columns(m: PolyMatrix) -> list[ModuleElement]:
    return [m.column(j) for j in range(m.ncols)]


def graded_submodule_membership(
    target: Sequence[Poly],
    generators: Sequence[Sequence[Poly]],
    relations: PolyMatrix | None = None,
    degree: int | None = None,
    basis_degrees: Sequence[int] = (0, 1, 1),
    allowed_monomials: Mapping[int, Sequence[Exponent]] | None = None,
) -> Witness | None:
    """Coefficients ``c`` with ``sum c_k col_k = target``, or None.

    The columns are ``generators`` followed by the columns of ``relations``.
    ``allowed_monomials`` optionally restricts the support of the coefficient
    of column ``k`` (used to forbid a column, or to impose a finer grading).
    """
    target = tuple(target)
    cols: list[ModuleElement] = [tuple(g) for g in generators]
    if relations is not None:
        cols.extend(matrix_columns(relations))
    if not cols:
        raise ValueError("no columns to combine")
    ring: Ring = next(p.ring for col in cols for p in col)
    rank = len(basis_degrees)
    if len(target) != rank or any(len(c) != rank for c in cols):
        raise DegreeMismatchError("module elements must have one entry per basis vector")

    tdeg = element_degree(target, basis_degrees)
    if degree is not None and tdeg is not None and degree != tdeg:
        raise DegreeMismatchError(f"target has degree {tdeg}, asked for {degree}")
    d = degree if degree is not None else tdeg
    if d is None:
        return Witness(tuple(cols), tuple(ring.zero for _ in cols))

    # unknowns: (column, monomial of the coefficient)
    unknowns: list[tuple[int, Exponent]] = []
    for k, col in enumerate(cols):
        cdeg = element_degree(col, basis_degrees)
        if cdeg is None:
            continue
        if allowed_monomials is not None and k in allowed_monomials:
            monos = [m for m in allowed_monomials[k] if ring.mono_degree(m) == d - cdeg]
        else:
            monos = ring.monomials_of_degree(d - cdeg)
        unknowns.extend((k, m) for m in monos)

    row_index: dict[tuple[int, Exponent], int] = {}
    rows: list[dict[int, object]] = []

    def row(i: int, e: Exponent) -> dict:
        key = (i, e)
        r = row_index.get(key)
        if r is None:
            r = row_index[key] = len(rows)
            rows.append({})
        return rows[r]

    for u, (k, mu) in enumerate(unknowns):
        for i, entry in enumerate(cols[k]):
            for e, c in entry.terms.items():
                r = row(i, tuple(x + y for x, y in zip(e, mu)))
                r[u] = r.get(u, 0) + c
    rhs_map: dict[int, object] = {}
    for i, entry in enumerate(target):
        for e, c in entry.terms.items():
            row(i, e)
            rhs_map[row_index[(i, e)]] = c
    rhs = [rhs_map.get(r, 0) for r in range(len(rows))]

    sol = solve_sparse(rows, rhs, len(unknowns))
    if sol is None:
        return None
    coeffs: list[dict] = [{} for _ in cols]
    for (k, mu), x in zip(unknowns, sol):
        if x:
            coeffs[k][mu] = x
    return Witness(tuple(cols), tuple(Poly(ring, c) for c in coeffs))
