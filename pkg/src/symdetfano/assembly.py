"""Assembling the double-plane model T′ and its extension W′, and checking them.

T′ in P(2,2,2,3,3) is cut out by

    z1^2 - y1 f^2 - l1 Q,    z2^2 - y3 g^2 - l3 Q,    Q = y1 y3 - y2^2,

so it is a double cover of the plane branched in the two cubics
F = y1 f^2 + l1 Q and G = y3 g^2 + l3 Q.  W′ in P(1^4,2^3,3^2) combines the
kernel equations of a certificate so that setting a = b = c = d = 0 gives T′
back exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from . import detmodel, linalg
from .errors import CertificateMismatch, DegenerateBranch
from .extension import (
    RING_P1,
    RING_PLANE,
    RING_S,
    RING_T,
    Instance,
    KernelCertificate,
    build_certificate,
    build_phi,
    conic,
    linear_y,
    restrict_abcd,
)
from .ffscan import ScanReport, quasismooth_scan
from .groebner import (
    INFINITE,
    colength_projective,
    hilbert_prefix,
    minors,
    series_expand,
)
from .matrix import PolyMatrix
from .poly import QQ, Poly, Ring, perfect_square_root, ring_hom_apply, weighted_degree

__all__ = [
    "ModelPair", "ScanReport", "quasismooth_scan", "tprime_from_forms", "assemble_tprime",
    "assemble_wprime", "model_pair", "block_correspondence", "branch_forms",
    "halfpoint_locus_check", "tangency_check", "hilbert_check", "slice_surface",
    "cuspidal_branch_instance", "nonreduced_branch_instance",
]

T_WEIGHTS = (2, 2, 2, 3, 3)
W_WEIGHTS = (1, 1, 1, 1, 2, 2, 2, 3, 3)
MODULI = 9


# -- T′ and W′ ----------------------------------------------------------------------

def tprime_from_forms(f: Poly, g: Poly, l1: Poly, l3: Poly) -> tuple[Poly, Poly]:
    """z1^2 - y1 f^2 - l1 Q and z2^2 - y3 g^2 - l3 Q in the ring of ``f``."""
    ring = f.ring
    z1, z2, y1, y3 = (ring.gen(n) for n in ("z1", "z2", "y1", "y3"))
    Q = conic(ring)
    return z1 * z1 - y1 * f * f - l1 * Q, z2 * z2 - y3 * g * g - l3 * Q


def assemble_tprime(inst: Instance, ring: Ring = RING_T) -> tuple[Poly, Poly]:
    return tprime_from_forms(inst.f(ring), inst.g(ring), linear_y(ring, inst.l1), linear_y(ring, inst.l3))


def assemble_wprime(inst: Instance, cert: KernelCertificate) -> tuple[Poly, Poly]:
    """eq_z1sq - sum l1_i * (y_i L3 equation), and likewise for z2.

    The y_i L3 equation restricts to y_i Q on a = b = c = d = 0, so the minus
    sign is the one that restricts to T′.
    """
    if cert.instance != inst:
        raise CertificateMismatch("certificate was built for a different instance")
    E = cert.eq_yL3
    w1 = cert.eq_z1sq - sum((QQ(c) * e for c, e in zip(inst.l1, E) if c), RING_S.zero)
    w2 = cert.eq_z2sq - sum((QQ(c) * e for c, e in zip(inst.l3, E) if c), RING_S.zero)
    return w1, w2


@dataclass(frozen=True)
class BlockCorrespondence:
    """How T′ matches the projection of a block matrix: sign * F6 = F, sign * G6 = G."""
    sign_F: int
    sign_G: int
    a_form: tuple[mpq, mpq, mpq]
    b_form: tuple[mpq, mpq, mpq]

    def matrix(self, inst: Instance) -> detmodel.SymDetMatrix:
        return detmodel.build_block_matrix(self.a_form, self.b_form,
                                           (inst.alpha1, inst.alpha2), (inst.beta1, inst.beta2))


def block_correspondence(inst: Instance) -> BlockCorrespondence:
    """Find the sign and the diagonal entries of the block matrix whose
    projection from the node is T′.

    With the diagonal entries zero the cofactors are -y1 f^2 and -y3 g^2,
    which fixes the sign; the cofactors are then affine in the diagonal entry
    with slope Q, which fixes the entry.  The result is checked, not assumed.
    """
    alpha, beta = (inst.alpha1, inst.alpha2), (inst.beta1, inst.beta2)
    zero = (0, 0, 0)
    base = detmodel.project_from_halfpoint(detmodel.build_block_matrix(zero, zero, alpha, beta))
    F, G = branch_forms(inst)
    F0 = F.ring.gen("y1") * inst.f(F.ring) ** 2
    G0 = G.ring.gen("y3") * inst.g(G.ring) ** 2
    signs = []
    for cof, target in ((base.F6, F0), (base.G6, G0)):
        if cof == target:
            signs.append(1)
        elif cof == -target:
            signs.append(-1)
        else:
            raise DegenerateBranch("projected cofactor is not +-y f^2 at zero diagonal")
    sF, sG = signs
    a_form = tuple(sF * c for c in inst.l1)
    b_form = tuple(sG * c for c in inst.l3)
    corr = BlockCorrespondence(sF, sG, a_form, b_form)
    proj = detmodel.project_from_halfpoint(corr.matrix(inst))
    if proj.F6.scale(sF) != F or proj.G6.scale(sG) != G:
        raise DegenerateBranch("block matrix projection does not reproduce T′")
    return corr


@dataclass
class ModelPair:
    instance: Instance
    certificate: KernelCertificate | None
    tprime: tuple[Poly, Poly]
    wprime: tuple[Poly, Poly] | None
    correspondence: BlockCorrespondence | None = None
    notes: dict = field(default_factory=dict)

    @property
    def restriction_ok(self) -> bool:
        if self.wprime is None:
            return False
        return tuple(restrict_abcd(w) for w in self.wprime) == tuple(self.tprime)


def model_pair(inst: Instance, cert: KernelCertificate | None = None, with_wprime: bool = True) -> ModelPair:
    tp = assemble_tprime(inst)
    wp = None
    if with_wprime:
        cert = cert or build_certificate(inst)
        wp = assemble_wprime(inst, cert)
    return ModelPair(inst, cert, tp, wp, block_correspondence(inst))


# -- the illustrative instance with symbolic alpha, beta ----------------------------

EXAMPLE_PARAMS = ("al1", "al2", "be1", "be2")
EXAMPLE_RING = Ring(("z1", "z2", "y1", "y2", "y3") + EXAMPLE_PARAMS, (3, 3, 2, 2, 2, 1, 1, 1, 1))
EXAMPLE_MATRIX_RING = Ring(("y1", "y2", "y3", "y4") + EXAMPLE_PARAMS, (2, 2, 2, 2, 1, 1, 1, 1))


@dataclass(frozen=True)
class WorkedExample:
    tprime: tuple[Poly, Poly]
    matrix: detmodel.SymDetMatrix
    projection: detmodel.HalfPointProjection
    sign: int


def worked_example() -> WorkedExample:
    """l1 = -(y2 + 2 y3), l3 = -y1 with alpha, beta left as parameters.

    The matching block matrix has diagonal entries y1 and y2 + 2 y3; its
    projection from the node gives z_i^2 = -cofactor, i.e. ``sign`` = -1.
    """
    R = EXAMPLE_RING
    y1, y2, y3 = (R.gen(n) for n in ("y1", "y2", "y3"))
    al1, al2, be1, be2 = (R.gen(n) for n in EXAMPLE_PARAMS)
    tp = tprime_from_forms(y1 + al1 * y2 + al2 * y3, be1 * y1 + be2 * y2 + y3, -(y2 + 2 * y3), -y1)
    M = EXAMPLE_MATRIX_RING
    mat = detmodel.build_block_matrix("y2 + 2*y3", "y1", (M.gen("al1"), M.gen("al2")),
                                      (M.gen("be1"), M.gen("be2")), ring=M)
    proj = detmodel.project_from_halfpoint(mat)
    F, G = (eq.ring.gen(z) ** 2 - eq for eq, z in zip(tp, ("z1", "z2")))
    F6, G6 = proj.F6.embed(R), proj.G6.embed(R)
    if F == -F6 and G == -G6:
        sign = -1
    elif F == F6 and G == G6:
        sign = 1
    else:
        raise DegenerateBranch("the illustrative matrix does not reproduce T′")
    return WorkedExample(tp, mat, proj, sign)


# -- the branch curves ----------------------------------------------------------------

def branch_forms(inst_or_pair, ring: Ring = RING_PLANE) -> tuple[Poly, Poly]:
    """F and G with z_i^2 = F, G on T′, as cubics in the plane ring."""
    tp = inst_or_pair.tprime if isinstance(inst_or_pair, ModelPair) else assemble_tprime(inst_or_pair)
    out = []
    for eq, z in zip(tp, ("z1", "z2")):
        zz = eq.ring.gen(z)
        out.append((zz * zz - eq).embed(ring))
    return out[0], out[1]


@dataclass(frozen=True)
class BranchReport:
    colength: object
    transversal: bool
    jacobian_colength: object


def halfpoint_locus_check(pair_or_forms, raise_on_failure: bool = True) -> BranchReport:
    """Count the intersection of the branch cubics and test transversality.

    Transversal means the ideal (F, G, 2 x 2 minors of their Jacobian) defines
    the empty projective scheme.
    """
    if isinstance(pair_or_forms, (ModelPair, Instance)):
        F, G = branch_forms(pair_or_forms)
    else:
        F, G = pair_or_forms
    ring = F.ring
    count = colength_projective([F, G])
    jac = PolyMatrix(ring, [[F.diff(n) for n in ring.names], [G.diff(n) for n in ring.names]])
    jcount = colength_projective([F, G] + minors(jac, 2))
    report = BranchReport(count, jcount == 0, jcount)
    if raise_on_failure:
        if count == INFINITE:
            raise DegenerateBranch("the branch cubics share a component (infinite colength)")
        if count != 9:
            raise DegenerateBranch(f"branch cubics meet in a scheme of length {count}, not 9")
        if not report.transversal:
            raise DegenerateBranch("branch cubics meet tangentially")
    return report


def conic_pullback(p: Poly) -> Poly:
    """Restrict a plane form to the conic through (u^2, uv, v^2)."""
    u, v = RING_P1.gens()
    return ring_hom_apply({"y1": u * u, "y2": u * v, "y3": v * v}, p, RING_P1)


@dataclass(frozen=True)
class TangencyReport:
    squares: tuple[bool, bool]
    roots: tuple[Poly | None, Poly | None]
    roots_match_phi: tuple[bool, bool]

    @property
    def ok(self) -> bool:
        return all(self.squares) and all(self.roots_match_phi)


def tangency_report(inst: Instance, forms: Sequence[Poly] | None = None) -> TangencyReport:
    F, G = forms if forms is not None else branch_forms(inst)
    phi = build_phi(inst, check_shared_root=False)
    squares, roots, match = [], [], []
    for form, z in ((F, "z1"), (G, "z2")):
        r = perfect_square_root(conic_pullback(form))
        squares.append(r is not None)
        roots.append(r)
        match.append(r is not None and (r == phi[z] or r == -phi[z]))
    return TangencyReport(tuple(squares), tuple(roots), tuple(match))


def tangency_check(inst: Instance, forms: Sequence[Poly] | None = None) -> bool:
    """Both branch cubics restrict to squares on the conic, with roots +-phi*(z_i)."""
    return tangency_report(inst, forms).ok


# -- Hilbert series ------------------------------------------------------------------

@dataclass(frozen=True)
class HilbertComparison:
    name: str
    computed: list[int]
    expected: list[int]

    @property
    def ok(self) -> bool:
        return self.computed == self.expected


def compare_hilbert(name: str, equations: Sequence[Poly], relation_degrees: Sequence[int], n: int) -> HilbertComparison:
    computed = hilbert_prefix(list(equations), n).as_list()
    expected = series_expand(relation_degrees, equations[0].ring.weights, n)
    return HilbertComparison(name, computed, expected)


def hilbert_check(pair: ModelPair, n: int = 12) -> dict[str, HilbertComparison]:
    out = {"tprime": compare_hilbert("tprime", pair.tprime, (6, 6), n)}
    if pair.wprime is not None:
        out["wprime"] = compare_hilbert("wprime", pair.wprime, (6, 6), n)
    return out


# -- slices -------------------------------------------------------------------------

@dataclass
class SliceReport:
    surface: list[Poly]
    curve: list[Poly]
    surface_hilbert: HilbertComparison
    curve_hilbert: HilbertComparison
    linear_rank: int
    transverse: bool
    weight_one_parameters: int
    weight_two_parameters: int
    scan: ScanReport | None = None

    @property
    def parameter_tally(self) -> int:
        return MODULI + self.weight_one_parameters + self.weight_two_parameters


def _as_form(ring: Ring, x) -> Poly:
    if isinstance(x, Poly):
        return x.embed(ring)
    if isinstance(x, str):
        return ring.parse(x)
    raise TypeError(f"cannot read a form from {x!r}")


def slice_surface(pair: ModelPair, h: Sequence, q2, n: int = 8, scan_q: int | None = None,
                  scan_samples: int = 1000, seed: int = 0) -> SliceReport:
    """Adjoin three weight-1 forms and one weight-2 form to W′, and one weight-2
    form to T′, then compare with complete-intersection Hilbert series.

    Dependent weight-1 forms make the surface Hilbert series disagree with the
    (1,1,1,2) closed form; that is reported as a non-transverse slice.
    """
    if pair.wprime is None:
        raise ValueError("slicing needs W′")
    ring = pair.wprime[0].ring
    hs = [_as_form(ring, x) for x in h]
    if len(hs) != 3 or any(x and (x.is_homogeneous() is False or weighted_degree(x) != 1) for x in hs):
        raise ValueError("need three weight-1 forms")
    q = _as_form(ring, q2)
    surface = list(pair.wprime) + hs + [q]
    rank = _linear_rank(hs)
    surf = compare_hilbert("surface", [e for e in surface if e], (6, 6, 1, 1, 1, 2), n)
    tq = restrict_abcd(q)
    curve = list(pair.tprime) + [tq]
    crv = compare_hilbert("curve", curve, (6, 6, 2), n)
    # the degree-2 piece of the ring after the linear slice
    lin = hilbert_prefix(list(pair.wprime) + [x for x in hs if x], 2).as_list()
    report = SliceReport(surface, curve, surf, crv, rank, rank == 3 and surf.ok,
                         weight_one_parameters=3 * (4 - 3), weight_two_parameters=lin[2])
    if scan_q is not None:
        report.scan = quasismooth_scan([e for e in surface if e], ring, scan_q, scan_samples, seed=seed)
    return report


def _linear_rank(forms: Sequence[Poly]) -> int:
    names = ("a", "b", "c", "d")
    rows = [[f.coefficient({n: 1}) for n in names] for f in forms]
    return linalg.rank(rows) if rows else 0


def random_slice(rng: random.Random, ring: Ring = RING_S, height: int = 5) -> tuple[list[Poly], Poly]:
    """Three weight-1 forms in a..d and a weight-2 form, with small integer coefficients."""
    def c():
        return rng.randint(-height, height)
    a, b, cc, d = (ring.gen(n) for n in ("a", "b", "c", "d"))
    hs = [c() * a + c() * b + c() * cc + c() * d for _ in range(3)]
    q = sum((c() * m for m in (ring.gen("y1"), ring.gen("y2"), ring.gen("y3"))), ring.zero)
    q = q + sum((c() * x * y for i, x in enumerate((a, b, cc, d)) for y in (a, b, cc, d)[i:]), ring.zero)
    return hs, q


# -- planted singularities -------------------------------------------------------------

def cuspidal_branch_instance(s=2, alpha1=1, beta=(mpq(1, 3), 2), l3=(1, 0, -1)) -> tuple[Instance, tuple]:
    """An instance whose branch cubic F has a cusp at the conic point p = (1, s, s^2).

    alpha2 is chosen so that f(p) = 0; then l1 = 2 df + dQ at p (in the
    chart y1 = 1) makes F and its gradient vanish at p with a rank-one
    Hessian.  Returns the instance and p.
    """
    s, a1 = QQ(s), QQ(alpha1)
    a2 = -(1 + a1 * s) / (s * s)
    c2 = 2 * a1 - 2 * s
    c3 = 2 * a2 + 1
    c1 = -(c2 * s + c3 * s * s)
    inst = Instance(a1, a2, QQ(beta[0]), QQ(beta[1]), (c1, c2, c3), tuple(QQ(c) for c in l3))
    return inst, (QQ(1), s, s * s)


def nonreduced_branch_instance(base: Instance) -> Instance:
    """``base`` with l1 = 0, so F = y1 f^2 is singular along the line f = 0."""
    return Instance(base.alpha1, base.alpha2, base.beta1, base.beta2, (0, 0, 0), base.l3)
