from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symdetfano.detmodel import random_block_matrix, random_symmetric_matrix
from symdetfano.errors import InhomogeneousInputError, RingMismatchError
from symdetfano.extension import RING_T
from symdetfano.ffscan import plane_points
from symdetfano.groebner import (
    INFINITE,
    buchberger,
    colength_projective,
    hilbert_prefix,
    hilbert_prefix_zero_ideal,
    in_ideal,
    minors,
    normal_form,
    series_expand,
)
from symdetfano.matrix import det
from symdetfano.poly import Poly, Ring

P2 = Ring(("x", "y", "z"), (1, 1, 1))
PLANE = Ring(("y1", "y2", "y3"), (2, 2, 2))


def random_form(rng: random.Random, ring: Ring, degree: int, height: int = 5) -> Poly:
    return Poly(ring, {m: rng.randint(-height, height) for m in ring.monomials_of_degree(degree)})


# -- bases -----------------------------------------------------------------------------

def test_trivial_bases():
    x, y = P2.gen("x"), P2.gen("y")
    assert set(buchberger([x, y]).generators) == {x, y}
    q = PLANE.parse("y1*y3 - y2^2")
    assert buchberger([q]).generators == (q.monic(),)


def test_basis_is_idempotent_and_reduced():
    rng = random.Random(5)
    gens = [random_form(rng, P2, 2) for _ in range(3)]
    gb = buchberger(gens)
    again = buchberger(list(gb.generators))
    assert again.generators == gb.generators
    assert all(g.leading_coefficient() == 1 for g in gb.generators)
    # no leading monomial divides a term of another element
    for g in gb.generators:
        others = [h for h in gb.generators if h != g]
        assert normal_form(g, others) == g


def test_inhomogeneous_input_rejected():
    with pytest.raises(InhomogeneousInputError):
        buchberger([P2.parse("x + y^2")])


def test_normal_form_examples():
    x, y = P2.gen("x"), P2.gen("y")
    gb = buchberger([x, y])
    assert normal_form(x, gb) == P2.zero
    assert normal_form(P2.one, gb) == P2.one
    with pytest.raises(RingMismatchError):
        normal_form(PLANE.gen("y1"), gb)


def test_determinant_lies_in_the_minors_ideal():
    m = random_symmetric_matrix(random.Random(3)).m
    assert normal_form(det(m), buchberger(minors(m, 3))) == m.ring.zero


S_SMALL = Ring(("x", "y", "z"), (1, 1, 1))
GB_SMALL = buchberger([S_SMALL.parse("x^2 - y*z"), S_SMALL.parse("x*y - z^2 + x*z")])


def small_polys():
    monos = [m for d in range(4) for m in S_SMALL.monomials_of_degree(d)]
    return st.dictionaries(st.sampled_from(monos), st.integers(-4, 4), max_size=6).map(
        lambda d: Poly(S_SMALL, d))


@settings(max_examples=50, deadline=None)
@given(small_polys(), small_polys(), st.sampled_from([0, 1]))
def test_normal_form_ignores_ideal_multiples(p, q, k):
    g = GB_SMALL.generators[k]
    assert normal_form(p + q * g, GB_SMALL) == normal_form(p, GB_SMALL)


# -- colength ----------------------------------------------------------------------------

def test_split_cubics_meet_in_nine_points():
    F = P2.parse("x*(x - z)*(x - 2*z)")
    G = P2.parse("y*(y - z)*(y - 2*z)")
    assert colength_projective([F, G]) == 9
    assert len(plane_points(F, G, 101)) == 9


def test_generic_cubics_satisfy_bezout():
    rng = random.Random(8)
    for _ in range(3):
        assert colength_projective([random_form(rng, P2, 3), random_form(rng, P2, 3)]) == 9


def test_colength_degenerate_cases():
    assert colength_projective([PLANE.gen("y1"), PLANE.gen("y2"), PLANE.gen("y3")]) == 0
    F = PLANE.parse("y1^3 + y2^3 - y3^3")
    assert colength_projective([F, F]) == INFINITE


def test_colength_is_invariant_under_generator_changes():
    rng = random.Random(21)
    F, G = random_form(rng, P2, 3), random_form(rng, P2, 3)
    base = colength_projective([F, G])
    for _ in range(10):
        a, b, c, d = (rng.randint(-4, 4) for _ in range(4))
        if a * d - b * c == 0:
            continue
        assert colength_projective([a * F + b * G, c * F + d * G]) == base


def test_minors_of_symmetric_determinantal_quartic_have_colength_ten():
    rng = random.Random(13)
    for _ in range(3):
        m = random_block_matrix(rng).m
        assert colength_projective(minors(m, 3)) == 10


# -- Hilbert series ------------------------------------------------------------------------

def test_series_expansion_oracle():
    assert series_expand([], (2, 2, 2, 3, 3), 6) == [1, 0, 3, 2, 6, 6, 13]
    assert series_expand([6, 6], (2, 2, 2, 3, 3), 6) == [1, 0, 3, 2, 6, 6, 11]
    assert series_expand([6, 6], (1, 1, 1, 1, 2, 2, 2, 3, 3), 2) == [1, 4, 13]
    assert series_expand([6], (1, 1, 1, 3), 3) == [1, 3, 6, 11]


def test_zero_ideal_prefix():
    assert hilbert_prefix_zero_ideal(RING_T, 6).as_list() == [1, 0, 3, 2, 6, 6, 13]


def test_prefix_of_a_complete_intersection_matches_closed_form():
    rng = random.Random(4)
    for n_eq in (1, 2, 3):
        eqs = [random_form(rng, P2, 2) for _ in range(n_eq)]
        got = hilbert_prefix(eqs, 8).as_list()
        assert got == series_expand([2] * n_eq, (1, 1, 1), 8)
    assert hilbert_prefix([P2.one], 3).as_list() == [0, 0, 0, 0]


def test_in_ideal_helper():
    x, y = P2.gen("x"), P2.gen("y")
    assert in_ideal(x * y + y * y, [y])
    assert not in_ideal(x * x, [y])
