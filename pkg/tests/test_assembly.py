from __future__ import annotations

import random

import pytest

from symdetfano.assembly import (
    EXAMPLE_RING,
    assemble_tprime,
    assemble_wprime,
    block_correspondence,
    branch_forms,
    conic_pullback,
    cuspidal_branch_instance,
    halfpoint_locus_check,
    hilbert_check,
    model_pair,
    nonreduced_branch_instance,
    random_slice,
    slice_surface,
    tangency_check,
    tangency_report,
    worked_example,
)
from symdetfano.detmodel import project_from_halfpoint
from symdetfano.errors import CertificateMismatch, DegenerateBranch
from symdetfano.extension import (
    RING_P1,
    RING_PLANE,
    RING_S,
    RING_T,
    Instance,
    build_certificate,
    build_phi_full,
    restrict_abcd,
    shared_root_instance,
)
from symdetfano.groebner import INFINITE, series_expand
from symdetfano.poly import ring_hom_apply

ZERO_PARAMS = Instance(0, 0, 0, 0)


def test_tprime_equations():
    inst = Instance(1, 2, 3, 4, (1, 0, 0), (0, 0, 1))
    t1, t2 = assemble_tprime(inst)
    assert t1 == RING_T.parse("z1^2 - y1*(y1 + y2 + 2*y3)^2 - y1*(y1*y3 - y2^2)")
    assert t2 == RING_T.parse("z2^2 - y3*(3*y1 + 4*y2 + y3)^2 - y3*(y1*y3 - y2^2)")


def test_wprime_restricts_to_tprime(generic_pairs):
    for inst, cert in generic_pairs:
        pair = model_pair(inst, cert)
        assert pair.restriction_ok


def test_wprime_pulls_back_to_zero(generic_pairs):
    for inst, cert in generic_pairs[:4]:
        phi = build_phi_full(inst)
        U = phi["z1"].ring
        assert all(not ring_hom_apply(phi, w, U) for w in assemble_wprime(inst, cert))


def test_wprime_without_linear_terms_is_the_square_equations(generic_pairs):
    inst, _ = generic_pairs[0]
    bare = Instance(inst.alpha1, inst.alpha2, inst.beta1, inst.beta2)
    cert = build_certificate(bare)
    assert assemble_wprime(bare, cert) == (cert.eq_z1sq, cert.eq_z2sq)


def test_wprime_rejects_a_foreign_certificate(generic_pairs):
    (i1, _), (_, c2) = generic_pairs[:2]
    with pytest.raises(CertificateMismatch):
        assemble_wprime(i1, c2)


def test_block_correspondence_reproduces_tprime(generic_instances):
    for inst in generic_instances[:6]:
        corr = block_correspondence(inst)
        proj = project_from_halfpoint(corr.matrix(inst))
        F, G = branch_forms(inst)
        assert proj.F6.scale(corr.sign_F) == F and proj.G6.scale(corr.sign_G) == G
        assert (corr.sign_F, corr.sign_G) == (-1, -1)


def test_worked_example():
    w = worked_example()
    assert w.sign == -1
    R = EXAMPLE_RING
    assert w.tprime[0] == R.parse("z1^2 - y1*(y1 + al1*y2 + al2*y3)^2 + (y2 + 2*y3)*(y1*y3 - y2^2)")
    assert w.tprime[1] == R.parse("z2^2 - y3*(be1*y1 + be2*y2 + y3)^2 + y1*(y1*y3 - y2^2)")


# -- branch curves ---------------------------------------------------------------------

def test_generic_branch_curves_meet_transversally(generic_instances):
    for inst in generic_instances[:8]:
        r = halfpoint_locus_check(inst)
        assert r.colength == 9 and r.transversal and r.jacobian_colength == 0


def test_equal_branch_curves():
    F, _ = branch_forms(Instance(1, 2, 3, 4, (1, 0, 0), (0, 0, 1)))
    assert halfpoint_locus_check((F, F), raise_on_failure=False).colength == INFINITE
    with pytest.raises(DegenerateBranch):
        halfpoint_locus_check((F, F))


def test_shared_root_gives_a_tangency_between_the_branch_curves():
    inst, _ = shared_root_instance(random.Random(3))
    r = halfpoint_locus_check(inst, raise_on_failure=False)
    assert r.colength == 9 and not r.transversal
    with pytest.raises(DegenerateBranch):
        halfpoint_locus_check(inst)


def test_planted_instances_are_not_transversal():
    cusp, p = cuspidal_branch_instance()
    assert cusp.is_generic
    F, _ = branch_forms(cusp)
    vals = dict(zip(("y1", "y2", "y3"), p))
    assert F.evaluate(vals) == 0 and all(F.diff(n).evaluate(vals) == 0 for n in vals)
    assert halfpoint_locus_check(cusp, raise_on_failure=False).colength == 9
    assert not halfpoint_locus_check(nonreduced_branch_instance(cusp), raise_on_failure=False).transversal


# -- tangency --------------------------------------------------------------------------

def test_branch_curves_are_totally_tangent_to_the_conic(generic_instances):
    assert all(tangency_check(inst) for inst in generic_instances)


def test_tangency_is_insensitive_to_the_linear_forms():
    inst = Instance(1, 2, 3, 4, (5, -7, 1), (2, 2, 2))
    assert tangency_check(inst)
    assert tangency_check(Instance(1, 2, 3, 4, (1, 0, 0), (2, 2, 2)))


def test_perturbation_off_the_pencil_is_not_a_square():
    inst = Instance(1, 2, 3, 4, (1, 0, 0), (0, 0, 1))
    F, G = branch_forms(inst)
    y2 = RING_PLANE.gen("y2")
    r = tangency_report(inst, (F + y2 * inst.f(RING_PLANE) ** 2, G))
    assert r.squares == (False, True) and not r.ok


def test_zero_parameters_give_sixth_powers():
    F, G = branch_forms(ZERO_PARAMS)
    assert conic_pullback(F) == RING_P1.parse("u^6")
    assert conic_pullback(G) == RING_P1.parse("v^6")


# -- Hilbert series and slices ------------------------------------------------------------

def test_hilbert_series(generic_pairs):
    inst, cert = generic_pairs[0]
    res = hilbert_check(model_pair(inst, cert), 12)
    assert res["tprime"].computed[:7] == [1, 0, 3, 2, 6, 6, 11]
    assert res["wprime"].computed[:4] == [1, 4, 13, 34]
    assert all(c.ok for c in res.values())


def test_slice_tally_and_hilbert_series(generic_pairs):
    inst, cert = generic_pairs[0]
    pair = model_pair(inst, cert)
    hs, q2 = random_slice(random.Random(4))
    s = slice_surface(pair, hs, q2)
    assert s.linear_rank == 3 and s.transverse
    assert (s.weight_one_parameters, s.weight_two_parameters, s.parameter_tally) == (3, 4, 16)
    assert s.curve_hilbert.ok
    assert s.curve_hilbert.computed == series_expand([6, 6, 2], RING_T.weights, 8)


def test_dependent_slice_is_not_transverse(generic_pairs):
    inst, cert = generic_pairs[0]
    pair = model_pair(inst, cert)
    a, b = RING_S.gen("a"), RING_S.gen("b")
    s = slice_surface(pair, [a, b, a + b], RING_S.parse("y1 + a*c"))
    assert s.linear_rank == 2 and not s.transverse


def test_slice_needs_three_linear_forms(generic_pairs):
    inst, cert = generic_pairs[0]
    pair = model_pair(inst, cert)
    with pytest.raises(ValueError):
        slice_surface(pair, [RING_S.gen("a")], "y1")
    with pytest.raises(ValueError):
        slice_surface(model_pair(inst, with_wprime=False), ["a", "b", "c"], "y1")


def test_restriction_of_a_slice_form():
    assert restrict_abcd(RING_S.parse("y1 + a*c - 3*b^2")) == RING_T.parse("y1")
