"""Symmetric determinantal models: the matrix, its cofactor equations, and
projection from the node at (0:0:0:1).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from . import linalg
from .errors import DecompositionFailure, NotBlockFormError, ZeroPointError
from .ffscan import projective_points
from .groebner import colength_projective, minors
from .matrix import PolyMatrix, cofactor, det_bareiss
from .poly import QQ, Poly, Ring

RING_Y4 = Ring(("y1", "y2", "y3", "y4"), (2, 2, 2, 2))
RING_Y3 = Ring(("y1", "y2", "y3"), (2, 2, 2))
RING_PROJECTED = Ring(("z1", "z2", "y1", "y2", "y3"), (3, 3, 2, 2, 2))
RING_DOUBLE_PLANE = Ring(("w", "y1", "y2", "y3"), (3, 1, 1, 1))

Y_NAMES = ("y1", "y2", "y3", "y4")


@dataclass(frozen=True)
class SymDetMatrix:
    m: PolyMatrix
    block_form: bool = False

    def __post_init__(self):
        if self.m.shape != (4, 4):
            raise ValueError("expected a 4 x 4 matrix")
        if not self.m.is_symmetric():
            raise ValueError("matrix is not symmetric")
        ys = [n for n in Y_NAMES if n in self.m.ring.index]
        for row in self.m.rows:
            for x in row:
                if x and set(x.coefficients_in(ys)) - {tuple(int(i == k) for i in range(len(ys))) for k in range(len(ys))}:
                    raise ValueError(f"entry {x} is not linear in {ys}")

    @property
    def ring(self) -> Ring:
        return self.m.ring

    def det(self) -> Poly:
        return det_bareiss(self.m)

    def cofactor(self, i: int, j: int) -> Poly:
        return cofactor(self.m, i, j)


def _as_form(ring: Ring, x) -> Poly:
    if isinstance(x, Poly):
        return x.embed(ring)
    if isinstance(x, str):
        return ring.parse(x)
    return sum((QQ(c) * ring.gen(f"y{i + 1}") for i, c in enumerate(x) if c), ring.zero)


def build_block_matrix(a_form, b_form, alpha: Sequence, beta: Sequence, ring: Ring = RING_Y4) -> SymDetMatrix:
    """The block matrix with a node at (0:0:0:1).

    ``a_form``, ``b_form`` are linear forms in y1..y3 (Poly, text, or a
    coefficient triple).  ``alpha``, ``beta`` may be rationals or, in a ring
    with parameter variables, polynomials.
    """
    a = _as_form(ring, a_form)
    b = _as_form(ring, b_form)
    y1, y2, y3, y4 = (ring.gen(n) for n in Y_NAMES)
    al1, al2 = (ring(x) for x in alpha)
    be1, be2 = (ring(x) for x in beta)
    A = y1 + al1 * y2 + al2 * y3
    B = be1 * y1 + be2 * y2 + y3
    z = ring.zero
    m = PolyMatrix(ring, [[b, y4, B, z], [y4, a, z, A], [B, z, y1, y2], [z, A, y2, y3]])
    return SymDetMatrix(m, block_form=True)


def is_block_form(m: SymDetMatrix) -> bool:
    ring = m.ring
    y1, y2, y3, y4 = (ring.gen(n) for n in Y_NAMES)
    e = m.m
    if e[0, 1] != y4 or e[0, 3] or e[1, 2]:
        return False
    if e[2, 2] != y1 or e[2, 3] != y2 or e[3, 3] != y3:
        return False
    return all(x.free_of(["y4"]) for x in (e[0, 0], e[1, 1], e[0, 2], e[1, 3]))


def random_symmetric_matrix(rng: random.Random, ring: Ring = RING_Y4, height: int = 9) -> SymDetMatrix:
    ys = [n for n in Y_NAMES if n in ring.index]
    ent = {}
    for i in range(4):
        for j in range(i, 4):
            ent[i, j] = ent[j, i] = sum((rng.randint(-height, height) * ring.gen(n) for n in ys), ring.zero)
    return SymDetMatrix(PolyMatrix(ring, [[ent[i, j] for j in range(4)] for i in range(4)]))


def random_block_matrix(rng: random.Random, height: int = 9) -> SymDetMatrix:
    def q():
        return mpq(rng.randint(-height, height), rng.randint(1, height))
    a_form = [q() for _ in range(3)]
    b_form = [q() for _ in range(3)]
    return build_block_matrix(a_form, b_form, (q(), q()), (q(), q()))


# -- the graded-ring equations ----------------------------------------------------

@dataclass(frozen=True)
class DetModelEquations:
    ring: Ring
    linear_syzygies: tuple[Poly, ...]
    quadratic: tuple[Poly, ...]
    pairs: tuple[tuple[int, int], ...]

    def all(self) -> list[Poly]:
        return list(self.linear_syzygies) + list(self.quadratic)


def model_ring(m: SymDetMatrix) -> Ring:
    base = m.ring
    return Ring(("z1", "z2", "z3", "z4") + base.names, (3, 3, 3, 3) + base.weights)


def model_equations(m: SymDetMatrix) -> DetModelEquations:
    """(z1..z4) M = 0 and cofactor(i, j) = z_i z_j for i <= j."""
    ring = model_ring(m)
    z = [ring.gen(f"z{k}") for k in range(1, 5)]
    M = m.m.map(lambda p: p.embed(ring), ring)
    syz = tuple(sum((z[k] * M[k, j] for k in range(4)), ring.zero) for j in range(4))
    pairs = tuple((i, j) for i in range(1, 5) for j in range(i, 5))
    quad = tuple(cofactor(M, i, j) - z[i - 1] * z[j - 1] for i, j in pairs)
    return DetModelEquations(ring, syz, quad, pairs)


def contact_cubics(m: SymDetMatrix) -> list[Poly]:
    """The ten cofactors (i <= j) of the matrix."""
    return [m.cofactor(i, j) for i in range(1, 5) for j in range(i, 5)]


def rank_at_point(m: SymDetMatrix, point: Sequence) -> int:
    """Rank of the scalar matrix obtained by evaluating at a point of P^3."""
    pt = [QQ(x) for x in point]
    if not any(pt):
        raise ZeroPointError("the zero vector is not a projective point")
    ys = [n for n in Y_NAMES if n in m.ring.index]
    values = dict(zip(ys, pt))
    return linalg.rank([[x.evaluate(values) for x in row] for row in m.m.rows])


def node_at_halfpoint(m: SymDetMatrix) -> bool:
    """True iff det and all its partials vanish at (0:0:0:1)."""
    d = m.det()
    p = {"y1": 0, "y2": 0, "y3": 0, "y4": 1}
    return d.evaluate(p) == 0 and all(d.diff(n).evaluate(p) == 0 for n in Y_NAMES)



@dataclass(frozen=True)
class NodeLocusReport:
    """Colength of the rank <= 2 locus next to its count of F_q-points.

    ``agree`` confirms a reduced locus with all points rational over F_q;
    disagreement is only a flag, since nodes need not be defined over F_q.
    """
    colength: object
    q: int
    fq_points: int
    agree: bool


def node_locus_report(m: SymDetMatrix, q: int = 101) -> NodeLocusReport:
    ys = [n for n in Y_NAMES if n in m.m.ring.index]
    if len(ys) != m.m.ring.ngens:
        raise ValueError("node locus needs a matrix over y1..y4 only")
    mins = minors(m.m, 3)
    count = colength_projective(mins)
    pts = projective_points(mins, q)
    return NodeLocusReport(count, q, len(pts), count == len(pts))

# -- projection from the node -----------------------------------------------------------

@dataclass(frozen=True)
class HalfPointProjection:
    F6: Poly
    G6: Poly
    eq_z1: Poly
    eq_z2: Poly


def project_from_halfpoint(m: SymDetMatrix, ring: Ring = RING_PROJECTED) -> HalfPointProjection:
    """Cofactors (1,1) and (2,2) and the projected equations z1^2 = F6, z2^2 = G6.

    Both cofactors are free of y4; they are returned in the plane ring.
    """
    if not m.block_form or not is_block_form(m):
        raise NotBlockFormError("projection needs the block form with the node at (0:0:0:1)")
    F = m.cofactor(1, 1)
    G = m.cofactor(2, 2)
    if not (F.free_of(["y4"]) and G.free_of(["y4"])):
        raise NotBlockFormError("cofactors depend on y4")
    extra = [n for n in m.ring.names if n not in Y_NAMES]
    if extra:
        ring = Ring(("z1", "z2") + tuple(extra) + ("y1", "y2", "y3"),
                    (3, 3) + tuple(m.ring.weights[m.ring.index[n]] for n in extra) + (2, 2, 2))
    plane = Ring(tuple(n for n in ring.names if n not in ("z1", "z2")),
                 tuple(w for n, w in zip(ring.names, ring.weights) if n not in ("z1", "z2")))
    F, G = F.embed(plane), G.embed(plane)
    z1, z2 = ring.gen("z1"), ring.gen("z2")
    return HalfPointProjection(F, G, z1 * z1 - F.embed(ring), z2 * z2 - G.embed(ring))


@dataclass(frozen=True)
class BranchIdentity:
    alpha: Poly
    beta: Poly
    gamma: Poly
    discriminant: Poly
    product: Poly
    constant: mpq | None

    @property
    def proportional(self) -> bool:
        return self.constant is not None

    @property
    def sign(self) -> int | None:
        """+1 or -1 if the discriminant is exactly +-F*G, else None."""
        if self.constant in (1, -1):
            return int(self.constant)
        return None


def branch_identity_check(m: SymDetMatrix) -> BranchIdentity:
    """Write det M = alpha y4^2 + beta y4 + gamma and compare beta^2 - 4 alpha gamma with F6 G6.

    ``constant`` is the rational c with discriminant = c * F6 * G6, or None
    when the two are not proportional.
    """
    if not m.block_form:
        raise NotBlockFormError("branch identity needs the block form")
    d = m.det()
    parts = d.coefficients_in(["y4"])
    if max((e[0] for e in parts), default=0) != 2 or (2,) not in parts:
        raise DecompositionFailure("det M is not quadratic in y4")
    if set(parts) - {(0,), (1,), (2,)}:
        raise DecompositionFailure("unexpected y4 powers")
    zero = m.ring.zero
    alpha, beta, gamma = parts.get((2,), zero), parts.get((1,), zero), parts.get((0,), zero)
    disc = beta * beta - 4 * alpha * gamma
    prod = m.cofactor(1, 1) * m.cofactor(2, 2)
    constant = None
    if prod and disc:
        lm = prod.leading_monomial()
        c = disc.terms.get(lm)
        if c is not None and disc == prod.scale(c / prod.terms[lm]):
            constant = c / prod.terms[lm]
    return BranchIdentity(alpha, beta, gamma, disc, prod, constant)


def truncate_even(F6: Poly, G6: Poly, ring: Ring = RING_DOUBLE_PLANE) -> Poly:
    """w^2 - F G in P(1,1,1,3): the even subring with degrees halved."""
    halved = {}
    for e, c in (F6 * G6).terms.items():
        halved[e] = c
    src = F6.ring
    plane = Ring(tuple(n for n in ring.names if n != "w"), tuple(1 for n in ring.names if n != "w"))
    fg = Poly(plane, {tuple(e[src.index[n]] for n in plane.names): c for e, c in halved.items()})
    w = ring.gen("w")
    return w * w - fg.embed(ring)
