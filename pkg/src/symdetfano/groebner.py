"""Groebner bases, normal forms, Hilbert functions and colengths.

These are the verification oracles.  Everything works on homogeneous ideals
in a weighted polynomial ring, using the ring's own monomial order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import InhomogeneousInputError, RingMismatchError
from .poly import Exponent, Poly, Ring, weighted_degree

#: returned by :func:`colength_projective` for positive-dimensional schemes
INFINITE = math.inf


@dataclass(frozen=True)
class GroebnerBasis:
    ring: Ring
    generators: tuple[Poly, ...]

    @property
    def order(self) -> str:
        return self.ring.order

    def leading_monomials(self) -> list[Exponent]:
        return [g.leading_monomial() for g in self.generators]

    def contains(self, p: Poly) -> bool:
        return not normal_form(p, self)

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


# -- monomial helpers ----------------------------------------------------------

def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _quo(b: Exponent, a: Exponent) -> Exponent:
    return tuple(y - x for x, y in zip(a, b))


def _coprime(a: Exponent, b: Exponent) -> bool:
    return not any(x and y for x, y in zip(a, b))


# -- reduction -----------------------------------------------------------------

def _reduce(p: dict, basis: Sequence[tuple[Exponent, mpq, dict]], key, full: bool = True) -> dict:
    """Reduce ``p`` modulo ``basis`` entries ``(lm, lc, terms)``."""
    p = dict(p)
    rem: dict = {}
    while p:
        m = max(p, key=key)
        c = p[m]
        for lm, lc, g in basis:
            if _divides(lm, m):
                q = _quo(m, lm)
                f = c / lc
                for e, v in g.items():
                    e2 = tuple(x + y for x, y in zip(e, q))
                    nv = p.get(e2, 0) - f * v
                    if nv:
                        p[e2] = nv
                    else:
                        p.pop(e2, None)
                break
        else:
            if not full:
                rem.update(p)
                return rem
            rem[m] = c
            del p[m]
    return rem


def _entry(g: Poly) -> tuple[Exponent, mpq, dict]:
    lm = g.leading_monomial()
    return lm, g.terms[lm], g.terms


def normal_form(p: Poly, basis: GroebnerBasis | Sequence[Poly]) -> Poly:
    """Fully reduced remainder of ``p`` by the basis polynomials."""
    gens = basis.generators if isinstance(basis, GroebnerBasis) else tuple(basis)
    ring = basis.ring if isinstance(basis, GroebnerBasis) else (gens[0].ring if gens else p.ring)
    if p.ring != ring:
        raise RingMismatchError(f"polynomial in {p.ring}, basis in {ring}")
    if not gens:
        return p
    return Poly._raw(ring, _reduce(p.terms, [_entry(g) for g in gens], ring.sort_key))


# -- Buchberger ----------------------------------------------------------------

def _spoly(f: tuple, g: tuple) -> dict:
    lmf, lcf, tf = f
    lmg, lcg, tg = g
    lcm = _lcm(lmf, lmg)
    qf, qg = _quo(lcm, lmf), _quo(lcm, lmg)
    out: dict = {}
    for e, v in tf.items():
        e2 = tuple(x + y for x, y in zip(e, qf))
        out[e2] = out.get(e2, 0) + v / lcf
    for e, v in tg.items():
        e2 = tuple(x + y for x, y in zip(e, qg))
        nv = out.get(e2, 0) - v / lcg
        if nv:
            out[e2] = nv
        else:
            out.pop(e2, None)
    return {e: v for e, v in out.items() if v}


def _check_homogeneous(gens: Sequence[Poly]) -> Ring:
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise RingMismatchError("generators live in different rings")
        if weighted_degree(g) is None:
            raise InhomogeneousInputError(f"inhomogeneous generator {g}")
    return ring


def buchberger(generators: Iterable[Poly]) -> GroebnerBasis:
    """Reduced Groebner basis of a homogeneous ideal.

    Pairs are processed by increasing lcm degree (the normal strategy) and
    pruned with the Gebauer-Moeller criteria.
    """
    gens = [g for g in generators if g]
    if not gens:
        raise ValueError("need at least one generator (the zero ideal has an empty basis)")
    ring = _check_homogeneous(gens)
    key = ring.sort_key
    deg = ring.mono_degree

    basis: list[tuple[Exponent, mpq, dict]] = []
    pairs: list[tuple[int, int, Exponent]] = []

    def update(h: tuple) -> None:
        nonlocal pairs
        k = len(basis)
        lmh = h[0]
        new = [(i, k, _lcm(basis[i][0], lmh)) for i in range(k) if basis[i] is not None]
        # criterion M: drop new pairs whose lcm is a proper multiple of another new lcm
        kept = []
        for idx, (i, _, l) in enumerate(new):
            if any(_divides(l2, l) and l2 != l for _, _, l2 in new):
                continue
            kept.append((i, k, l))
        # criterion F: one pair per lcm, preferring a coprime one
        by_lcm: dict[Exponent, tuple] = {}
        for i, kk, l in kept:
            prev = by_lcm.get(l)
            if prev is None or _coprime(basis[i][0], lmh):
                by_lcm[l] = (i, kk, l)
        # product criterion: coprime leading monomials reduce to zero
        fresh = [p for p in by_lcm.values() if not _coprime(basis[p[0]][0], lmh)]
        # criterion B: old pairs whose lcm is divisible by lm(h) but differs from both new lcms
        survivors = []
        for i, j, l in pairs:
            if (_divides(lmh, l) and l != _lcm(basis[i][0], lmh) and l != _lcm(basis[j][0], lmh)):
                continue
            survivors.append((i, j, l))
        pairs = survivors + fresh
        basis.append(h)

    for g in sorted(gens, key=lambda p: key(p.leading_monomial())):
        r = _reduce(g.terms, [b for b in basis if b is not None], key)
        if r:
            p = Poly._raw(ring, r)
            update(_entry(p))

    while pairs:
        pairs.sort(key=lambda t: (deg(t[2]), key(t[2])))
        i, j, _ = pairs.pop(0)
        s = _spoly(basis[i], basis[j])
        r = _reduce(s, basis, key)
        if r:
            update(_entry(Poly._raw(ring, r)))

    return GroebnerBasis(ring, _interreduce(ring, [Poly._raw(ring, b[2]) for b in basis]))


def _interreduce(ring: Ring, polys: list[Poly]) -> tuple[Poly, ...]:
    key = ring.sort_key
    lms = [p.leading_monomial() for p in polys]
    minimal = []
    for k, (p, lm) in enumerate(zip(polys, lms)):
        if any(_divides(l2, lm) and (l2 != lm or k2 < k) for k2, l2 in enumerate(lms) if k2 != k):
            continue
        minimal.append(p.monic())
    out = []
    for k, p in enumerate(minimal):
        others = [_entry(q) for k2, q in enumerate(minimal) if k2 != k]
        lm = p.leading_monomial()
        tail = {e: v for e, v in p.terms.items() if e != lm}
        red = _reduce(tail, others, key)
        red[lm] = mpq(1)
        out.append(Poly._raw(ring, red))
    out.sort(key=lambda p: key(p.leading_monomial()))
    return tuple(out)


def in_ideal(p: Poly, generators: Sequence[Poly]) -> bool:
    return not normal_form(p, buchberger(generators))


# -- Hilbert functions -----------------------------------------------------------

def _minimalize(monos: Iterable[Exponent]) -> list[Exponent]:
    ms = sorted(set(monos), key=sum)
    out: list[Exponent] = []
    for m in ms:
        if not any(_divides(o, m) for o in out):
            out.append(m)
    return out


def hilbert_numerator(monomials: Sequence[Exponent], weights: Sequence[int]) -> dict[int, int]:
    """Numerator N(t) of the Hilbert series of ``k[x]/(monomials)``.

    The series is ``N(t) / prod(1 - t^w)``.  Computed by the colon recursion
    ``N(I + (m)) = N(I) - t^deg(m) N(I : m)``.
    """
    memo: dict[tuple, dict[int, int]] = {}

    def deg(m: Exponent) -> int:
        return sum(e * w for e, w in zip(m, weights))

    def rec(gens: tuple[Exponent, ...]) -> dict[int, int]:
        got = memo.get(gens)
        if got is not None:
            return got
        if not gens:
            res = {0: 1}
        elif all(sum(1 for e in m if e) == 1 for m in gens):
            # pure powers of distinct variables: product formula
            res = {0: 1}
            for m in gens:
                d = deg(m)
                nxt: dict[int, int] = {}
                for k, v in res.items():
                    nxt[k] = nxt.get(k, 0) + v
                    nxt[k + d] = nxt.get(k + d, 0) - v
                res = {k: v for k, v in nxt.items() if v}
        else:
            # split on a non-pure generator with the largest support
            m = max(gens, key=lambda g: (sum(1 for e in g if e), deg(g)))
            rest = tuple(g for g in gens if g != m)
            colon = tuple(sorted(_minimalize(tuple(max(x - y, 0) for x, y in zip(g, m)) for g in rest)))
            a = rec(tuple(sorted(rest)))
            b = rec(colon)
            d = deg(m)
            res = dict(a)
            for k, v in b.items():
                res[k + d] = res.get(k + d, 0) - v
            res = {k: v for k, v in res.items() if v}
        memo[gens] = res
        return res

    return rec(tuple(sorted(_minimalize(monomials))))


def hilbert_function_from_monomials(monomials: Sequence[Exponent], ring: Ring, n: int) -> list[int]:
    """Count standard monomials degree by degree up to ``n`` (direct enumeration)."""
    lms = _minimalize(monomials)
    out = []
    for d in range(n + 1):
        out.append(sum(1 for m in ring.monomials_of_degree(d) if not any(_divides(l, m) for l in lms)))
    return out


@dataclass(frozen=True)
class HilbertSeriesPrefix:
    coefficients: tuple[int, ...]

    def __getitem__(self, k):
        return self.coefficients[k]

    def __len__(self):
        return len(self.coefficients)

    def as_list(self) -> list[int]:
        return list(self.coefficients)


def hilbert_prefix(generators: Sequence[Poly], n: int, basis: GroebnerBasis | None = None) -> HilbertSeriesPrefix:
    """Dimensions of the graded pieces of the quotient, degrees 0..n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    gens = [g for g in generators if g]
    if not gens:
        raise ValueError("empty generator list; pass the ring through a zero ideal helper")
    gb = basis or buchberger(gens)
    return HilbertSeriesPrefix(tuple(hilbert_function_from_monomials(gb.leading_monomials(), gb.ring, n)))


def hilbert_prefix_zero_ideal(ring: Ring, n: int) -> HilbertSeriesPrefix:
    return HilbertSeriesPrefix(tuple(len(ring.monomials_of_degree(d)) for d in range(n + 1)))


def series_expand(numerator_degrees: Sequence[int], denominator_weights: Sequence[int], n: int) -> list[int]:
    """Coefficients of ``prod(1 - t^a) / prod(1 - t^w)`` up to ``t^n``.

    Independent of any Groebner computation: plain power-series arithmetic.
    """
    coeffs = [0] * (n + 1)
    coeffs[0] = 1
    for a in numerator_degrees:
        for k in range(n, a - 1, -1):
            coeffs[k] -= coeffs[k - a]
    for w in denominator_weights:
        for k in range(w, n + 1):
            coeffs[k] += coeffs[k - w]
    return coeffs


# -- colength --------------------------------------------------------------------

def _poly_div_one_minus_t(num: dict[int, int]) -> tuple[dict[int, int], int]:
    """Divide N(t) by (1 - t); return quotient and remainder N(1)."""
    if not num:
        return {}, 0
    top = max(num)
    q: dict[int, int] = {}
    acc = 0
    # N(t) = (1-t) q(t) + N(1); q_k = sum_{i<=k} n_i
    for k in range(top):
        acc += num.get(k, 0)
        if acc:
            q[k] = acc
    rem = acc + num.get(top, 0)
    return q, rem


@dataclass(frozen=True)
class SchemeDegree:
    """Krull dimension of the quotient and the degree (multiplicity)."""
    krull_dimension: int
    degree: int

    @property
    def colength(self):
        if self.krull_dimension == 0:
            return 0
        if self.krull_dimension == 1:
            return self.degree
        return INFINITE


def scheme_degree(generators: Sequence[Poly], basis: GroebnerBasis | None = None) -> SchemeDegree:
    gens = [g for g in generators if g]
    gb = basis or buchberger(gens)
    ring = gb.ring
    if len(set(ring.weights)) != 1:
        raise ValueError("colength via the Hilbert series needs equal variable weights")
    # regrade so every variable has weight 1
    num = hilbert_numerator(gb.leading_monomials(), [1] * ring.ngens)
    if num == {}:
        return SchemeDegree(0, 0)
    n = ring.ngens
    order = 0
    while True:
        q, rem = _poly_div_one_minus_t(num)
        if rem != 0:
            break
        num = q
        order += 1
    return SchemeDegree(n - order, rem)


def colength_projective(generators: Sequence[Poly], chart_strategy: str = "hilbert"):
    """Degree of the projective scheme cut out by homogeneous generators.

    Returns 0 for the empty scheme, the length for a zero-dimensional scheme
    and :data:`INFINITE` when the scheme has positive dimension.  The value is
    the eventually constant Hilbert function of the quotient, read off from
    the Hilbert series of the initial ideal.
    """
    if chart_strategy != "hilbert":
        raise ValueError(f"unsupported strategy {chart_strategy!r}")
    return scheme_degree(generators).colength


def minors(matrix, k: int) -> list[Poly]:
    """All nonzero k x k minors of a PolyMatrix (distinct up to sign)."""
    from itertools import combinations

    from .matrix import det_bareiss

    n, m = matrix.shape
    seen: list[Poly] = []
    for rows in combinations(range(n), k):
        for cols in combinations(range(m), k):
            d = det_bareiss(matrix.submatrix(rows, cols))
            if d and d not in seen and -d not in seen:
                seen.append(d)
    return seen


def ideal_sum(*parts: Sequence[Poly]) -> list[Poly]:
    return reduce(lambda acc, p: acc + [g for g in p if g], parts, [])
