"""Exact linear algebra over QQ: dense helpers and a sparse solver.

Dense routines take lists of lists of anything ``mpq`` accepts.  The sparse
solver stores each equation as ``{unknown_index: coefficient}`` and is what the
graded membership solver builds on.
"""

from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from .poly import QQ


def to_qq(m: Sequence[Sequence]) -> list[list[mpq]]:
    return [[QQ(x) for x in row] for row in m]


def rref(m: Sequence[Sequence]) -> tuple[list[list[mpq]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = to_qq(m)
    if not a:
        return a, []
    nr, nc = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    return len(rref(m)[1])


def det(m: Sequence[Sequence]) -> mpq:
    a = to_qq(m)
    n = len(a)
    d = mpq(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return mpq(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def inverse(m: Sequence[Sequence]) -> list[list[mpq]]:
    n = len(m)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(to_qq(m))]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def kernel(m: Sequence[Sequence]) -> list[list[mpq]]:
    """Basis of the right kernel."""
    a, piv = rref(m)
    nc = len(a[0]) if a else 0
    free = [c for c in range(nc) if c not in piv]
    basis = []
    for f in free:
        v = [mpq(0)] * nc
        v[f] = mpq(1)
        for r, c in enumerate(piv):
            v[c] = -a[r][f]
        basis.append(v)
    return basis


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list[mpq]]:
    bt = list(zip(*b))
    return [[sum((QQ(x) * QQ(y) for x, y in zip(r, c)), mpq(0)) for c in bt] for r in a]


def solve_sparse(rows: list[dict[int, mpq]], rhs: list[mpq], n_unknowns: int) -> list[mpq] | None:
    """One solution of the sparse system (free unknowns set to 0), or None.

    Gaussian elimination choosing the sparsest available pivot row for each
    unknown; rows are dicts so fill-in stays cheap on the block-structured
    systems produced by graded membership problems.
    """
    eqs = [({j: QQ(v) for j, v in r.items() if v}, QQ(b)) for r, b in zip(rows, rhs)]
    by_col: dict[int, set[int]] = {}
    for k, (r, _) in enumerate(eqs):
        for j in r:
            by_col.setdefault(j, set()).add(k)
    alive = set(range(len(eqs)))
    pivots: list[tuple[int, int]] = []
    for j in sorted(by_col, key=lambda c: len(by_col[c])):
        cands = [k for k in by_col.get(j, ()) if k in alive]
        if not cands:
            continue
        k = min(cands, key=lambda i: len(eqs[i][0]))
        prow, pb = eqs[k]
        inv = 1 / prow[j]
        prow = {c: v * inv for c, v in prow.items()}
        pb = pb * inv
        eqs[k] = (prow, pb)
        alive.discard(k)
        pivots.append((j, k))
        for i in list(by_col[j]):
            if i == k or i not in alive:
                continue
            r, b = eqs[i]
            f = r[j]
            for c, v in prow.items():
                nv = r.get(c, 0) - f * v
                if nv:
                    if c not in r:
                        by_col.setdefault(c, set()).add(i)
                    r[c] = nv
                else:
                    r.pop(c, None)
                    by_col[c].discard(i)
            eqs[i] = (r, b - f * pb)
    for i in alive:
        r, b = eqs[i]
        if not r and b:
            return None
        if r:
            raise AssertionError("elimination left an unreduced live row")
    x = [mpq(0)] * n_unknowns
    # back substitution in reverse pivot order
    for j, k in reversed(pivots):
        r, b = eqs[k]
        val = b
        for c, v in r.items():
            if c != j:
                val -= v * x[c]
        x[j] = val
    return x
