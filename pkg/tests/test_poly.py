from __future__ import annotations

from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from symdetfano.errors import MissingImageError, ParseError, RingMismatchError, ZeroPolynomialError
from symdetfano.extension import RING_P1, RING_T, Instance, build_phi
from symdetfano.poly import QQ, Poly, Ring, perfect_square_root, ring_hom_apply, weighted_degree

R3 = Ring(("x", "y", "z"), (1, 2, 3))
UV = Ring(("u", "v"), (1, 1))


def polys(ring: Ring = R3, max_exp: int = 3, max_terms: int = 5):
    exps = st.tuples(*[st.integers(0, max_exp)] * ring.ngens)
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(
        lambda d: Poly(ring, {e: mpq(c.numerator, c.denominator) for e, c in d.items()}))


def homogeneous_polys(ring: Ring, degree: int):
    monos = ring.monomials_of_degree(degree)
    return st.lists(st.integers(-4, 4), min_size=len(monos), max_size=len(monos)).map(
        lambda cs: Poly(ring, dict(zip(monos, (mpq(c) for c in cs)))))


# -- rationals and canonical form ---------------------------------------------------

def test_qq_accepts_common_inputs():
    assert QQ("6/4") == mpq(3, 2)
    assert QQ(Fraction(-2, 6)) == mpq(-1, 3)
    assert QQ(5) == 5
    assert QQ("6/4").denominator == 2


def test_zero_coefficients_are_dropped():
    p = Poly(R3, {(1, 0, 0): 1, (0, 1, 0): 0})
    assert len(p) == 1
    assert (p - p).terms == {}
    assert not (p - p)


def test_text_round_trip_and_order():
    p = R3.parse("3/2*x^2*y - y^2 + 5 + x*z")
    assert R3.parse(p.to_text()) == p
    # grevlex on weighted degree: ties go to the smaller exponent in the last variable
    assert p.to_text() == "3/2*x^2*y - y^2 + x*z + 5"


def test_parser_accepts_parentheses_and_powers():
    x, y = R3.gen("x"), R3.gen("y")
    assert R3.parse("(x + y)**2") == (x + y) * (x + y)
    assert R3.parse("-(x - 2*y)^2") == -((x - 2 * y) ** 2)


@pytest.mark.parametrize("bad", ["x +", "w*x", "x ^ y", "1/0*x", "(x"])
def test_parser_rejects_garbage(bad):
    with pytest.raises((ParseError, ZeroDivisionError)):
        R3.parse(bad)


def test_ring_validation():
    with pytest.raises(ValueError):
        Ring(("a", "a"), (1, 1))
    with pytest.raises(ValueError):
        Ring(("a",), (0,))
    assert Ring.from_string("z1:3 z2:3 y1:2") == Ring(("z1", "z2", "y1"), (3, 3, 2))


def test_grevlex_and_lex_orders_differ():
    lex = Ring(("x", "y", "z"), (1, 1, 1), "lex")
    grl = Ring(("x", "y", "z"), (1, 1, 1))
    # same degree: x*z versus y^2
    assert lex.parse("x*z + y^2").leading_monomial() == (1, 0, 1)
    assert grl.parse("x*z + y^2").leading_monomial() == (0, 2, 0)


def test_mixing_rings_is_an_error():
    with pytest.raises(RingMismatchError):
        R3.gen("x") + UV.gen("u")


# -- weighted degree ---------------------------------------------------------------------

def test_weighted_degree_examples():
    S = Ring(("y1", "y2", "y3", "a", "b", "c", "d"), (2, 2, 2, 1, 1, 1, 1))
    L3 = S.parse("y1*y3 - y2^2 + b^2*y1 + (2*b*c - a*d)*y2 + c^2*y3")
    assert weighted_degree(L3) == 4
    assert weighted_degree(S.parse("y1 + a")) is None
    Z = Ring(("z1", "z2"), (3, 3))
    assert weighted_degree(Z.parse("z1*z2")) == 6


def test_weighted_degree_of_zero_raises():
    with pytest.raises(ZeroPolynomialError):
        weighted_degree(R3.zero)


@settings(max_examples=60, deadline=None)
@given(homogeneous_polys(R3, 4), homogeneous_polys(R3, 5))
def test_degree_is_additive(p, q):
    if p and q:
        assert weighted_degree(p * q) == weighted_degree(p) + weighted_degree(q)


# -- ring axioms -----------------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + q == q + p
    assert p * q == q * p
    assert p - p == R3.zero
    assert p * R3.one == p


@settings(max_examples=50, deadline=None)
@given(polys(), polys())
def test_exact_division_inverts_multiplication(p, q):
    if q:
        assert (p * q).divide_exact(q) == p


# -- substitution homomorphisms ---------------------------------------------------------

HOM = {"x": UV.parse("u + v"), "y": UV.parse("u*v - 2*v^2"), "z": UV.parse("u^3 - 1/2*v^3")}


@settings(max_examples=100, deadline=None)
@given(polys(), polys())
def test_ring_hom_respects_sum_and_product(p, q):
    assert ring_hom_apply(HOM, p * q) == ring_hom_apply(HOM, p) * ring_hom_apply(HOM, q)
    assert ring_hom_apply(HOM, p + q) == ring_hom_apply(HOM, p) + ring_hom_apply(HOM, q)


def test_conic_parametrisation_kills_the_conic():
    P = Ring(("y1", "y2", "y3"), (2, 2, 2))
    u, v = RING_P1.gens()
    assignment = {"y1": u * u, "y2": u * v, "y3": v * v}
    assert ring_hom_apply(assignment, P.parse("y1*y3 - y2^2"), RING_P1) == RING_P1.zero


def test_phi_kills_the_first_image_cubic():
    inst = Instance(mpq(2, 3), mpq(-1), mpq(5), mpq(1, 7))
    phi = build_phi(inst)
    y1, y2, y3 = (RING_T.gen(n) for n in ("y1", "y2", "y3"))
    f = y1 + inst.alpha1 * y2 + inst.alpha2 * y3
    eq = RING_T.gen("z1") ** 2 - y1 * f * f
    assert ring_hom_apply(phi, eq, RING_P1) == RING_P1.zero


@settings(max_examples=30, deadline=None)
@given(polys())
def test_identity_assignment_is_identity(p):
    assert ring_hom_apply({n: R3.gen(n) for n in R3.names}, p) == p


def test_missing_image_raises():
    with pytest.raises(MissingImageError):
        ring_hom_apply({"x": UV.gen("u")}, R3.parse("x + y"))


def test_scalar_images_are_allowed():
    assert ring_hom_apply({"x": UV.gen("u"), "y": 2, "z": 0}, R3.parse("x*y + z")) == UV.parse("2*u")


# -- perfect squares ---------------------------------------------------------------------

def test_square_root_examples():
    assert perfect_square_root(UV.parse("(u + v)^2")) == UV.parse("u + v")
    assert perfect_square_root(UV.parse("u^3*v")) is None
    assert perfect_square_root(UV.parse("u^2 + v^2")) is None
    assert perfect_square_root(UV.parse("2*u^2")) is None


def test_square_root_returns_positive_leading_coefficient():
    r = perfect_square_root(UV.parse("(-3/2*u^2 + u*v - v^2)^2"))
    assert r == UV.parse("3/2*u^2 - u*v + v^2")


@settings(max_examples=60, deadline=None)
@given(homogeneous_polys(UV, 3))
def test_square_root_of_square(p):
    if p:
        r = perfect_square_root(p * p)
        assert r is not None and r * r == p * p
        assert r == p or r == -p


def test_differentiation_and_evaluation():
    p = R3.parse("x^2*y + 3*z")
    assert p.diff("x") == R3.parse("2*x*y")
    assert p.evaluate({"x": 2, "y": mpq(1, 2), "z": 1}) == 5
    assert p.subs({"z": 0}) == R3.parse("x^2*y")
