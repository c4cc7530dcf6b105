from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from symdetfano import linalg
from symdetfano.assembly import EXAMPLE_MATRIX_RING, halfpoint_locus_check
from symdetfano.detmodel import (
    RING_DOUBLE_PLANE,
    RING_Y4,
    SymDetMatrix,
    branch_identity_check,
    build_block_matrix,
    contact_cubics,
    is_block_form,
    model_equations,
    node_at_halfpoint,
    project_from_halfpoint,
    random_block_matrix,
    random_symmetric_matrix,
    rank_at_point,
    truncate_even,
)
from symdetfano.errors import NotBlockFormError, ZeroPointError
from symdetfano.groebner import hilbert_prefix, series_expand
from symdetfano.matrix import PolyMatrix
from symdetfano.poly import Ring, ring_hom_apply, weighted_degree

SYM = Ring(("y1", "y2", "y3", "y4", "a1", "a2", "a3", "b1", "b2", "b3", "al1", "al2", "be1", "be2"),
           (2, 2, 2, 2) + (1,) * 10)


def symbolic_block():
    g = SYM.gen
    a = g("a1") * g("y1") + g("a2") * g("y2") + g("a3") * g("y3")
    b = g("b1") * g("y1") + g("b2") * g("y2") + g("b3") * g("y3")
    return build_block_matrix(a, b, (g("al1"), g("al2")), (g("be1"), g("be2")), ring=SYM), a, b


def test_block_matrix_shape():
    m, a, b = symbolic_block()
    assert m.block_form and is_block_form(m) and m.m.is_symmetric()
    y1, y2, y3, y4 = (SYM.gen(n) for n in ("y1", "y2", "y3", "y4"))
    A = y1 + SYM.gen("al1") * y2 + SYM.gen("al2") * y3
    B = SYM.gen("be1") * y1 + SYM.gen("be2") * y2 + y3
    e = m.m
    assert (e[0, 0], e[0, 1], e[1, 1], e[0, 2], e[1, 3]) == (b, y4, a, B, A)
    assert not e[0, 3] and not e[1, 2]
    assert (e[2, 2], e[2, 3], e[3, 3]) == (y1, y2, y3)


def test_zero_parameters():
    m = build_block_matrix((0, 1, 0), (0, 1, 0), (0, 0), (0, 0))
    y1, y3 = RING_Y4.gen("y1"), RING_Y4.gen("y3")
    assert m.m[1, 3] == y1 and m.m[0, 2] == y3


def test_node_at_the_half_point():
    rng = random.Random(2)
    for _ in range(5):
        assert node_at_halfpoint(random_block_matrix(rng))


def test_non_symmetric_matrix_rejected():
    with pytest.raises(ValueError):
        SymDetMatrix(PolyMatrix(RING_Y4, [["y1", "y2", 0, 0], [0, "y1", 0, 0],
                                          [0, 0, "y3", 0], [0, 0, 0, "y4"]]))


# -- the graded ring equations ---------------------------------------------------------------

def test_model_equation_counts_and_degrees():
    eqs = model_equations(random_block_matrix(random.Random(1)))
    assert [weighted_degree(p) for p in eqs.linear_syzygies] == [5] * 4
    assert [weighted_degree(p) for p in eqs.quadratic] == [6] * 10
    assert eqs.pairs[:4] == ((1, 1), (1, 2), (1, 3), (1, 4))


def test_diagonal_matrix_quadric():
    d = SymDetMatrix(PolyMatrix(RING_Y4, [["y1", 0, 0, 0], [0, "y2", 0, 0], [0, 0, "y3", 0], [0, 0, 0, "y4"]]))
    eqs = model_equations(d)
    assert eqs.quadratic[0] == eqs.ring.parse("y2*y3*y4 - z1^2")
    assert contact_cubics(d)[0] == RING_Y4.parse("y2*y3*y4")


def test_determinant_recovered_from_syzygies():
    """Substituting z_k -> cofactor(1, k) turns the syzygies into (det, 0, 0, 0)."""
    m = random_symmetric_matrix(random.Random(9))
    eqs = model_equations(m)
    sub = {f"z{k}": m.cofactor(1, k) for k in range(1, 5)}
    sub.update({n: RING_Y4.gen(n) for n in RING_Y4.names})
    images = [ring_hom_apply(sub, p, RING_Y4) for p in eqs.linear_syzygies]
    assert images == [m.det(), RING_Y4.zero, RING_Y4.zero, RING_Y4.zero]


def test_contact_cubics():
    m = random_symmetric_matrix(random.Random(4))
    cubics = contact_cubics(m)
    assert len(cubics) == 10 and all(weighted_degree(c) == 6 for c in cubics)
    d = m.det()
    for i in range(1, 5):
        for j in range(i + 1, 5):
            rel = m.cofactor(i, j) ** 2 - m.cofactor(i, i) * m.cofactor(j, j)
            rel.divide_exact(d)  # raises unless det divides it


# -- rank at points ------------------------------------------------------------------------

def conic_points(m: SymDetMatrix, count: int):
    """Rational points of the quartic over (u^2, uv, v^2): det is linear in y4 there."""
    out = []
    for u in range(1, 20):
        for v in range(-3, 4):
            y = {"y1": mpq(u * u), "y2": mpq(u * v), "y3": mpq(v * v)}
            parts = m.det().coefficients_in(["y4"])
            beta = parts.get((1,), m.ring.zero).evaluate({**y, "y4": 0})
            gamma = parts.get((0,), m.ring.zero).evaluate({**y, "y4": 0})
            if beta:
                out.append((y["y1"], y["y2"], y["y3"], -gamma / beta))
            if len(out) == count:
                return out
    return out


def test_ranks():
    m = random_block_matrix(random.Random(6))
    assert rank_at_point(m, (3, -1, 2, 5)) == 4
    assert rank_at_point(m, (0, 0, 0, 1)) == 2
    with pytest.raises(ZeroPointError):
        rank_at_point(m, (0, 0, 0, 0))
    for pt in conic_points(m, 10):
        assert m.det().evaluate(dict(zip(("y1", "y2", "y3", "y4"), pt))) == 0
        assert rank_at_point(m, pt) <= 3


def test_kernel_vectors_solve_the_model_equations():
    m = random_block_matrix(random.Random(6))
    eqs = model_equations(m)
    checked = 0
    for pt in conic_points(m, 10):
        if rank_at_point(m, pt) != 3:
            continue
        checked += 1
        vals = dict(zip(("y1", "y2", "y3", "y4"), pt))
        (k,) = linalg.kernel(m.m.evaluate(vals))
        zs = {f"z{i + 1}": x for i, x in enumerate(k)}
        assert all(p.evaluate({**vals, **zs}) == 0 for p in eqs.linear_syzygies)
        # the adjugate at a rank-3 point is a multiple of k k^T
        adj = [[m.cofactor(i, j).evaluate(vals) for j in range(1, 5)] for i in range(1, 5)]
        i0 = next(i for i in range(4) if k[i])
        c = adj[i0][i0] / (k[i0] * k[i0])
        assert all(adj[i][j] == c * k[i] * k[j] for i in range(4) for j in range(4))
    assert checked >= 8


# -- projection from the node -----------------------------------------------------------------

def test_projection_general_form():
    m, a, b = symbolic_block()
    p = project_from_halfpoint(m)
    R = p.F6.ring
    y1, y2, y3 = (R.gen(n) for n in ("y1", "y2", "y3"))
    A = y1 + R.gen("al1") * y2 + R.gen("al2") * y3
    B = R.gen("be1") * y1 + R.gen("be2") * y2 + y3
    Q = y1 * y3 - y2 * y2
    assert p.F6 == a.embed(R) * Q - y1 * A * A
    assert p.G6 == b.embed(R) * Q - y3 * B * B
    assert p.F6.free_of(["y4"]) and p.G6.free_of(["y4"])


def test_projection_worked_example():
    R = EXAMPLE_MATRIX_RING
    m = build_block_matrix("y2 + 2*y3", "y1", (R.gen("al1"), R.gen("al2")), (R.gen("be1"), R.gen("be2")), ring=R)
    p = project_from_halfpoint(m)
    S = p.F6.ring
    expected = S.parse("y1*(y1 + al1*y2 + al2*y3)^2 - (y2 + 2*y3)*(y1*y3 - y2^2)")
    # z1^2 = -cofactor reproduces the displayed right-hand side
    assert -p.F6 == expected


def test_projection_special_case():
    p = project_from_halfpoint(build_block_matrix((0, 1, 0), (0, 1, 0), (0, 0), (0, 0)))
    assert p.F6 == p.F6.ring.parse("y2*(y1*y3 - y2^2) - y1^3")


def test_projection_needs_block_form():
    with pytest.raises(NotBlockFormError):
        project_from_halfpoint(random_symmetric_matrix(random.Random(1)))


def test_branch_identity_constant_is_four():
    rng = random.Random(8)
    for _ in range(10):
        assert branch_identity_check(random_block_matrix(rng)).constant == 4
    m, _, _ = symbolic_block()
    assert branch_identity_check(m).constant == 4


def test_zero_a_form_degenerates_the_branch_curve_not_the_quadratic():
    m = build_block_matrix((0, 0, 0), (1, 2, 3), (2, 5), (7, -1))
    b = branch_identity_check(m)
    assert b.constant == 4
    assert b.alpha == RING_Y4.parse("y2^2 - y1*y3")
    p = project_from_halfpoint(m)
    assert not halfpoint_locus_check((p.F6, p.G6), raise_on_failure=False).transversal


def test_truncate_even():
    p = project_from_halfpoint(random_block_matrix(random.Random(3)))
    w = truncate_even(p.F6, p.G6)
    assert w.ring == RING_DOUBLE_PLANE
    assert weighted_degree(w) == 6
    assert hilbert_prefix([w], 3).as_list() == series_expand([6], RING_DOUBLE_PLANE.weights, 3) == [1, 3, 6, 11]
    fg = p.F6 * p.G6
    for y in ((1, 2, 3), (-1, 0, 5), (2, 7, -3)):
        vals = dict(zip(("y1", "y2", "y3"), y))
        assert w.evaluate({"w": 0, **vals}) == -fg.evaluate(vals)


def test_node_locus_report_flags_rather_than_guesses():
    from symdetfano.detmodel import node_locus_report
    from symdetfano.groebner import INFINITE
    for q in (31, 101):
        r = node_locus_report(random_block_matrix(random.Random(1)), q)
        assert r.colength == 10 and r.fq_points <= 10
        assert r.agree == (r.fq_points == 10)
    diag = SymDetMatrix(PolyMatrix(RING_Y4, [["y1", 0, 0, 0], [0, "y2", 0, 0], [0, 0, "y3", 0], [0, 0, 0, "y4"]]))
    r = node_locus_report(diag, 7)
    assert r.colength == INFINITE and not r.agree
