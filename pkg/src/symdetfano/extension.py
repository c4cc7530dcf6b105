"""Extension of the conic embedding to the six-dimensional model.

The moduli point is an :class:`Instance`.  From it we build the pullback
maps ``phi`` (the conic in P(2,2,2,3,3)), ``Phi0`` (P^5 -> P(1^4,2^3)) and
``Phi`` (P^5 -> P(1^4,2^3,3^2)), the module presentation matrices ``A`` and
``B``, the coefficient matrix ``C`` governing the correction terms, and the
six kernel equations together with witnesses that replay exactly.

Module elements are triples over ``R = Q[y1,y2,y3,a,b,c,d]`` in the basis
``(1, u, v)`` of ``Q[u,v,a,b,c,d]`` viewed as an R-module through ``Phi0``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from gmpy2 import mpq

from . import linalg
from .errors import (
    DegenerateInstanceError,
    ExhaustedRejection,
    InexactDivisionError,
    MembershipFailure,
    SharedRootError,
    WrongStratumError,
)
from .matrix import PolyMatrix, det_bareiss, rank_over_fraction_field, adjugate
from .membership import Witness, graded_submodule_membership
from .poly import QQ, Poly, Ring, ring_hom_apply

RING_P1 = Ring(("u", "v"), (1, 1))
RING_UV = Ring(("u", "v", "a", "b", "c", "d"), (1,) * 6)
RING_R = Ring(("y1", "y2", "y3", "a", "b", "c", "d"), (2, 2, 2, 1, 1, 1, 1))
RING_S = Ring(("z1", "z2", "y1", "y2", "y3", "a", "b", "c", "d"), (3, 3, 2, 2, 2, 1, 1, 1, 1))
RING_T = Ring(("z1", "z2", "y1", "y2", "y3"), (3, 3, 2, 2, 2))
RING_PLANE = Ring(("y1", "y2", "y3"), (2, 2, 2))
RING_ABCD = Ring(("a", "b", "c", "d"), (1, 1, 1, 1))

# degenerate stratum: the free correction term s4 becomes a coordinate of weight 2
RING_R_S = Ring(("y1", "y2", "y3", "s", "a", "b", "c", "d"), (2, 2, 2, 2, 1, 1, 1, 1))
RING_S_S = Ring(("z1", "z2", "y1", "y2", "y3", "s", "a", "b", "c", "d"), (3, 3, 2, 2, 2, 2, 1, 1, 1, 1))
RING_UV_S = Ring(("u", "v", "s", "a", "b", "c", "d"), (1, 1, 2, 1, 1, 1, 1))

KERNEL_NAMES = ("z1sq", "z2sq", "z1z2", "y1L3", "y2L3", "y3L3")


# -- the moduli point ------------------------------------------------------------

@dataclass(frozen=True)
class Deltas:
    d1: mpq
    d2: mpq
    d3: mpq
    Delta: mpq

    @classmethod
    def of(cls, a1, a2, b1, b2) -> "Deltas":
        d1 = 1 - a2 * b1
        d2 = a1 - a2 * b2
        d3 = b2 - a1 * b1
        return cls(d1, d2, d3, d1 * d1 - d2 * d3)


@dataclass(frozen=True)
class Instance:
    """Parameters alpha1, alpha2, beta1, beta2 and the linear forms l1, l3.

    ``l1`` and ``l3`` are coefficient triples against ``(y1, y2, y3)``.
    """

    alpha1: mpq
    alpha2: mpq
    beta1: mpq
    beta2: mpq
    l1: tuple[mpq, mpq, mpq] = (mpq(0), mpq(0), mpq(0))
    l3: tuple[mpq, mpq, mpq] = (mpq(0), mpq(0), mpq(0))

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "beta1", "beta2"):
            object.__setattr__(self, name, QQ(getattr(self, name)))
        for name in ("l1", "l3"):
            v = tuple(QQ(x) for x in getattr(self, name))
            if len(v) != 3:
                raise ValueError(f"{name} needs three coefficients")
            object.__setattr__(self, name, v)

    @property
    def deltas(self) -> Deltas:
        return Deltas.of(self.alpha1, self.alpha2, self.beta1, self.beta2)

    @property
    def is_generic(self) -> bool:
        d = self.deltas
        return d.Delta != 0 and d.d1 != 0

    @property
    def in_delta1_stratum(self) -> bool:
        d = self.deltas
        return d.d1 == 0 and d.d2 * d.d3 != 0

    def f(self, ring: Ring = RING_R) -> Poly:
        return linear_y(ring, (1, self.alpha1, self.alpha2))

    def g(self, ring: Ring = RING_R) -> Poly:
        return linear_y(ring, (self.beta1, self.beta2, 1))

    def l1_form(self, ring: Ring = RING_PLANE) -> Poly:
        return linear_y(ring, self.l1)

    def l3_form(self, ring: Ring = RING_PLANE) -> Poly:
        return linear_y(ring, self.l3)

    def parameters(self) -> tuple[mpq, ...]:
        return (self.alpha1, self.alpha2, self.beta1, self.beta2) + self.l1 + self.l3


def linear_y(ring: Ring, coeffs: Sequence) -> Poly:
    return sum((QQ(c) * ring.gen(f"y{i + 1}") for i, c in enumerate(coeffs) if c), ring.zero)


def conic(ring: Ring) -> Poly:
    y1, y2, y3 = (ring.gen(n) for n in ("y1", "y2", "y3"))
    return y1 * y3 - y2 * y2


def l_forms(ring: Ring = RING_R) -> tuple[Poly, Poly, Poly]:
    """The entries L1, L2, L3 of the presentation matrix."""
    y1, y2, y3, a, b, c, d = (ring.gen(n) for n in ("y1", "y2", "y3", "a", "b", "c", "d"))
    L1 = b * y1 + c * y2 + d * y3
    L2 = a * y1 + b * y2 + c * y3
    L3 = y1 * y3 - y2 * y2 + b * b * y1 + (2 * b * c - a * d) * y2 + c * c * y3
    return L1, L2, L3


def resultant_matrix(inst: Instance) -> list[list[mpq]]:
    """6 x 6 Sylvester-type matrix of the cubics u*f and v*g on the conic."""
    a1, a2, b1, b2 = inst.alpha1, inst.alpha2, inst.beta1, inst.beta2
    z = mpq(0)
    one = mpq(1)
    return [
        [one, a1, a2, z, z, z],
        [z, one, a1, a2, z, z],
        [z, z, one, a1, a2, z],
        [z, b1, b2, one, z, z],
        [z, z, b1, b2, one, z],
        [z, z, z, b1, b2, one],
    ]


def resultant_constant(inst: Instance) -> mpq | None:
    """det(T) / Delta, or None when Delta = 0 (then det(T) is checked to vanish)."""
    dt = linalg.det(resultant_matrix(inst))
    delta = inst.deltas.Delta
    if delta == 0:
        if dt != 0:
            raise AssertionError("det T nonzero while Delta vanishes")
        return None
    return dt / delta


# -- random instances ---------------------------------------------------------------

def random_rational(rng: random.Random, height: int = 9) -> mpq:
    return mpq(rng.randint(-height, height), rng.randint(1, height))


def random_instance(rng: random.Random, stratum: str = "generic", max_draws: int = 10_000) -> Instance:
    """Draw an instance of the requested stratum by rejection sampling."""
    for _ in range(max_draws):
        a1, b2 = random_rational(rng), random_rational(rng)
        if stratum == "generic":
            a2, b1 = random_rational(rng), random_rational(rng)
        elif stratum == "delta1_zero":
            b1 = random_rational(rng)
            if b1 == 0:
                continue
            a2 = 1 / b1
        else:
            raise ValueError(f"unknown stratum {stratum!r}")
        l1 = tuple(random_rational(rng) for _ in range(3))
        l3 = tuple(random_rational(rng) for _ in range(3))
        inst = Instance(a1, a2, b1, b2, l1, l3)
        if stratum == "generic" and inst.is_generic:
            return inst
        if stratum == "delta1_zero" and inst.in_delta1_stratum:
            return inst
    raise ExhaustedRejection(f"no {stratum} instance in {max_draws} draws")


def shared_root_instance(rng: random.Random) -> tuple[Instance, mpq]:
    """An instance where phi*(z1), phi*(z2) share the root (u : v) = (r : 1)."""
    while True:
        r = random_rational(rng)
        if r == 0:
            continue
        a1, b1 = random_rational(rng), random_rational(rng)
        a2 = -r * r - a1 * r
        b2 = -(b1 * r * r + 1) / r
        l1 = tuple(random_rational(rng) for _ in range(3))
        l3 = tuple(random_rational(rng) for _ in range(3))
        return Instance(a1, a2, b1, b2, l1, l3), r


# -- pullback maps -------------------------------------------------------------------

def _phi_parts(inst: Instance) -> tuple[Poly, Poly]:
    u, v = RING_P1.gens()
    p = u * u + inst.alpha1 * u * v + inst.alpha2 * v * v
    q = inst.beta1 * u * u + inst.beta2 * u * v + v * v
    return p, q


def build_phi(inst: Instance, check_shared_root: bool = True) -> dict[str, Poly]:
    """Pullback of the conic embedding P^1 -> P(2,2,2,3,3)."""
    u, v = RING_P1.gens()
    p, q = _phi_parts(inst)
    if check_shared_root and inst.deltas.Delta == 0:
        raise SharedRootError("phi*(z1) and phi*(z2) share a root (Delta = 0)")
    return {"y1": u * u, "y2": u * v, "y3": v * v, "z1": u * p, "z2": v * q}


def image_equations(inst: Instance, ring: Ring = RING_T) -> dict[str, Poly]:
    """The equations C1, C2, C3 and Q of the image of phi."""
    z1, z2, y2 = ring.gen("z1"), ring.gen("z2"), ring.gen("y2")
    y1, y3 = ring.gen("y1"), ring.gen("y3")
    f, g = inst.f(ring), inst.g(ring)
    return {
        "C1": z1 * z1 - y1 * f * f,
        "C2": z1 * z2 - y2 * f * g,
        "C3": z2 * z2 - y3 * g * g,
        "Q": y1 * y3 - y2 * y2,
    }


def build_phi0() -> dict[str, Poly]:
    """Pullback of P^5 -> P(1^4,2^3): the 2 x 2 cofactor parametrisation."""
    u, v, a, b, c, d = RING_UV.gens()
    return {
        "y1": u * u - d * v + b * d - c * c,
        "y2": u * v + b * u + c * v - a * d + b * c,
        "y3": v * v - a * u + a * c - b * b,
        "a": a, "b": b, "c": c, "d": d,
    }


def phi0_cofactor_matrix() -> PolyMatrix:
    u, v, a, b, c, d = RING_UV.gens()
    return PolyMatrix(RING_UV, [[a, b - v, c + u], [b + v, c - u, d]])


def signed_maximal_minors(m: PolyMatrix) -> list[Poly]:
    """(-1)^(j+1) times the minor deleting column j, for a 2 x 3 matrix."""
    out = []
    for j in range(3):
        cols = [k for k in range(3) if k != j]
        mi = det_bareiss(m.submatrix([0, 1], cols))
        out.append(mi if j % 2 == 0 else -mi)
    return out


def phi0_matches_cofactors() -> bool:
    phi0 = build_phi0()
    return [phi0[n] for n in ("y1", "y2", "y3")] == signed_maximal_minors(phi0_cofactor_matrix())


def presentation_matrix_A(ring: Ring = RING_R) -> PolyMatrix:
    """Relations among 1, u, v as an R-module."""
    L1, L2, L3 = l_forms(ring)
    y1, y2, y3 = (ring.gen(n) for n in ("y1", "y2", "y3"))
    return PolyMatrix(ring, [[L1, L2, L3], [-y2, y3, L2], [y1, -y2, L1]])


def module_value(element: Sequence[Poly], phi0: Mapping[str, Poly] | None = None) -> Poly:
    """The polynomial ``e0 + e1*u + e2*v`` in Q[u,v,a,b,c,d] (or the s-extended ring)."""
    if phi0 is None:
        phi0 = build_phi0()
    target = next(iter(phi0.values())).ring
    u, v = target.gen("u"), target.gen("v")
    imgs = [ring_hom_apply(phi0, e, target) for e in element]
    return imgs[0] + imgs[1] * u + imgs[2] * v


def column_kill_residues() -> list[Poly]:
    """(1, u, v) . column_j(A) under Phi0 for j = 1, 2, 3; all should vanish."""
    A = presentation_matrix_A()
    phi0 = build_phi0()
    return [module_value(A.column(j), phi0) for j in range(3)]


def phi0_conic_image() -> Poly:
    """Phi0*(y1*y3 - y2^2); unlike for the conic map this is not zero."""
    return ring_hom_apply(build_phi0(), conic(RING_R), RING_UV)


# -- Phi and the module columns ------------------------------------------------------

@dataclass(frozen=True)
class Corrections:
    """The free terms s4, s5, t4, t5 of Phi*(z1), Phi*(z2) (zero by default)."""
    s4: Poly
    s5: Poly
    t4: Poly
    t5: Poly

    @classmethod
    def zero(cls, ring: Ring = RING_R) -> "Corrections":
        return cls(ring.zero, ring.zero, ring.zero, ring.zero)

    def is_zero(self) -> bool:
        return not (self.s4 or self.s5 or self.t4 or self.t5)

    def embed(self, ring: Ring) -> "Corrections":
        return Corrections(*(p.embed(ring) for p in (self.s4, self.s5, self.t4, self.t5)))


def z_columns(inst: Instance, ring: Ring = RING_R, corr: Corrections | None = None) -> tuple[tuple, tuple, tuple]:
    """Module columns for the generators 1, z1, z2."""
    corr = (corr or Corrections.zero(ring)).embed(ring)
    f, g = inst.f(ring), inst.g(ring)
    zero, one = ring.zero, ring.one
    return (one, zero, zero), (zero, f + corr.s4, corr.s5), (zero, corr.t4, g + corr.t5)


def matrix_B(inst: Instance, ring: Ring = RING_R, corr: Corrections | None = None) -> PolyMatrix:
    e1, c1, c2 = z_columns(inst, ring, corr)
    A = presentation_matrix_A(ring)
    cols = [e1, c1, c2] + [A.column(j) for j in range(3)]
    return PolyMatrix(ring, [[col[i] for col in cols] for i in range(3)])


def build_phi_full(inst: Instance, corr: Corrections | None = None,
                   allow_degenerate: bool = False) -> dict[str, Poly]:
    """Pullback of Phi: P^5 -> P(1^4,2^3,3^2) extending Phi0.

    With ``corr`` the correction terms are added; they are polynomials in the
    ring of the coefficients (R or its s-extension) and are pushed through Phi0.
    """
    if not allow_degenerate and not inst.is_generic:
        raise DegenerateInstanceError("Phi needs Delta * delta1 != 0")
    phi0 = build_phi0()
    if corr is not None and corr.s4.ring.names != RING_R.names:
        phi0 = extend_phi0(corr.s4.ring)
    ring = corr.s4.ring if corr is not None else RING_R
    _, c1, c2 = z_columns(inst, ring, corr)
    z1 = module_value(c1, phi0)
    z2 = module_value(c2, phi0)
    out = dict(phi0)
    out["z1"] = z1
    out["z2"] = z2
    return out


def extend_phi0(ring: Ring) -> dict[str, Poly]:
    """Phi0 over a ring with extra coordinates, which map to themselves."""
    extra = [n for n in ring.names if n not in RING_R.names]
    names = ("u", "v") + tuple(extra) + ("a", "b", "c", "d")
    weights = (1, 1) + tuple(ring.weights[ring.index[n]] for n in extra) + (1, 1, 1, 1)
    target = Ring(names, weights)
    base = {k: p.embed(target) for k, p in build_phi0().items()}
    for n in extra:
        base[n] = target.gen(n)
    return base


# -- kernel equations -------------------------------------------------------------------

@dataclass(frozen=True)
class KernelEquation:
    """An equation in the kernel of Phi* with its module witness.

    ``equation = head - sign * (w1 + w2 z1 + w3 z2)`` where ``B w = target``
    and ``Phi*(head) = sign * (target_1 + target_2 u + target_3 v)``.
    """

    name: str
    equation: Poly
    head: Poly
    target: tuple[Poly, Poly, Poly]
    witness: tuple[Poly, ...]
    sign: int
    route: str = "explicit"

    def replay(self, B: PolyMatrix) -> bool:
        return replay_witness(B, self.witness, self.target)


def replay_witness(B: PolyMatrix, witness: Sequence[Poly], target: Sequence[Poly]) -> bool:
    """Check ``B * witness == target`` coefficient by coefficient."""
    ring = B.ring
    for i in range(3):
        acc = ring.zero
        for j in range(B.ncols):
            if B[i, j] and witness[j]:
                acc = acc + B[i, j] * witness[j]
        if acc != target[i]:
            return False
    return True


def _assemble(name: str, head: Poly, target, witness, sign: int, route: str,
              ring_s: Ring = RING_S) -> KernelEquation:
    z1, z2 = ring_s.gen("z1"), ring_s.gen("z2")
    w = [p.embed(ring_s) for p in witness[:3]]
    equation = head - (w[0] + w[1] * z1 + w[2] * z2).scale(sign)
    return KernelEquation(name, equation, head, tuple(target), tuple(witness), sign, route)


def _require_generic(inst: Instance) -> None:
    if not inst.is_generic:
        raise DegenerateInstanceError("kernel equations need Delta * delta1 != 0")


def square_witnesses(inst: Instance, ring: Ring = RING_R) -> tuple[tuple[Poly, ...], tuple[Poly, ...]]:
    """The witnesses eta (for d f^2 v) and xi (for a g^2 u).

    The starred entries eta2, xi3 are exact quotients by f and g.
    """
    dl = inst.deltas
    f, g = inst.f(ring), inst.g(ring)
    y1, y2, y3, a, d = (ring.gen(n) for n in ("y1", "y2", "y3", "a", "d"))
    L1, L2, _ = l_forms(ring)
    zero = ring.zero

    e4 = dl.d1 * d * f
    e5 = -dl.d2 * d * f
    e3 = inst.alpha2 * d * f
    e2 = (y2 * e4 - y3 * e5).divide_exact(f)
    e1 = -L1 * e4 - L2 * e5
    eta = (e1, e2, e3, e4, e5, zero)

    x4 = -dl.d3 * a * g
    x5 = dl.d1 * a * g
    x2 = inst.beta1 * a * g
    x3 = (y2 * x5 - y1 * x4).divide_exact(g)
    x1 = -L1 * x4 - L2 * x5
    xi = (x1, x2, x3, x4, x5, zero)
    return eta, xi


def kernel_square_equations(inst: Instance) -> tuple[KernelEquation, KernelEquation]:
    """The two equations extending C1 and C3, written out verbatim.

    The verbatim forms are compared against the witness assembly.
    """
    _require_generic(inst)
    dl = inst.deltas
    eta, xi = square_witnesses(inst)
    S = RING_S
    z1, z2, y1, y2, y3, a, b, c, d = S.gens()
    f, g = inst.f(S), inst.g(S)
    L1, L2, _ = l_forms(S)

    head1 = z1 * z1 - y1 * f * f - (c * c - b * d) * f * f
    head2 = z2 * z2 - y3 * g * g - (b * b - a * c) * g * g
    ring = RING_R
    fr, gr = inst.f(ring), inst.g(ring)
    zero = ring.zero
    t1 = (zero, zero, ring.gen("d") * fr * fr)
    t2 = (zero, ring.gen("a") * gr * gr, zero)
    k1 = _assemble("z1sq", head1, t1, eta, +1, "explicit")
    k2 = _assemble("z2sq", head2, t2, xi, +1, "explicit")

    verbatim1 = (z1 * z1 - y1 * f * f) - ((c * c - b * d) * f * f - (dl.d1 * L1 - dl.d2 * L2) * d * f
                                          + (dl.d1 * y2 + dl.d2 * y3) * d * z1 + inst.alpha2 * d * f * z2)
    verbatim2 = (z2 * z2 - y3 * g * g) - ((b * b - a * c) * g * g - (-dl.d3 * L1 + dl.d1 * L2) * a * g
                                          + inst.beta1 * a * g * z1 + (dl.d3 * y1 + dl.d1 * y2) * a * z2)
    if verbatim1 != k1.equation or verbatim2 != k2.equation:
        raise AssertionError("witness assembly disagrees with the displayed equations")
    return k1, k2


def kernel_mixed_equation(inst: Instance) -> KernelEquation:
    """z1 z2 - f g y2 = f g (ad - bc) - b g z1 - c f z2."""
    _require_generic(inst)
    S = RING_S
    z1, z2, y1, y2, y3, a, b, c, d = S.gens()
    f, g = inst.f(S), inst.g(S)
    head = z1 * z2 - f * g * y2 - f * g * (a * d - b * c)
    ring = RING_R
    fr, gr = inst.f(ring), inst.g(ring)
    br, cr = ring.gen("b"), ring.gen("c")
    zero = ring.zero
    nu = (zero, br * gr, cr * fr, zero, zero, zero)
    target = (zero, br * fr * gr, cr * fr * gr)
    k = _assemble("z1z2", head, target, nu, -1, "explicit")
    verbatim = z1 * z2 - f * g * y2 - (f * g * (a * d - b * c) - b * g * z1 - c * f * z2)
    if verbatim != k.equation:
        raise AssertionError("witness assembly disagrees with the displayed equation")
    return k


def conic_target(i: int, part: str | None = None, ring: Ring = RING_R) -> tuple[Poly, Poly, Poly]:
    """Module target for y_i L3: (0, y_i L2, y_i L1), or one half of it."""
    L1, L2, _ = l_forms(ring)
    yi = ring.gen(f"y{i}")
    zero = ring.zero
    if part == "u":
        return (zero, yi * L2, zero)
    if part == "v":
        return (zero, zero, yi * L1)
    return (zero, yi * L2, yi * L1)


def _mat_vec(m: Sequence[Sequence[mpq]], vec: Sequence[Poly]) -> list[Poly]:
    ring = vec[0].ring
    return [sum((x * p for x, p in zip(row, vec) if x and p), ring.zero) for row in m]


def _row_dot(row: Sequence[Poly], vec: Sequence[Poly]) -> Poly:
    return sum((x * p for x, p in zip(row, vec) if x and p), row[0].ring.zero)


def _blocks(m: list[list[mpq]]) -> tuple:
    top = ([r[:3] for r in m[:3]], [r[3:] for r in m[:3]])
    bottom = ([r[:3] for r in m[3:]], [r[3:] for r in m[3:]])
    return top, bottom


def permute_columns(m: list[list[mpq]], positions: Sequence[int]) -> list[list[mpq]]:
    """Move column j of ``m`` to position ``positions[j]`` (0-based)."""
    out = [[mpq(0)] * len(row) for row in m]
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            out[i][positions[j]] = x
    return out


#: sigma = (3,4,5,6,1,2): old column j goes to position sigma(j), 1-based
SIGMA = (3, 4, 5, 6, 1, 2)


def conic_witnesses_y1(inst: Instance, literal_z_hat: bool = False) -> tuple[tuple[Poly, ...], tuple[Poly, ...]]:
    """The vectors nu, nu_hat for y1 L3 from the resultant-matrix blocks.

    ``nu`` maps to (0, y1 L2, 0) under B and ``nu_hat`` to (0, 0, y1 L1).
    With ``literal_z_hat`` the unhatted Z4, Z5 are reused in ``nu_hat``;
    that variant does not replay and is kept to document why the hatted
    corrections are needed.
    """
    ring = RING_R
    y1, y2, y3, a, b, c, d = ring.gens()
    a1, a2, b1, b2 = inst.alpha1, inst.alpha2, inst.beta1, inst.beta2
    L1, L2, _ = l_forms(ring)
    zero = ring.zero
    Y = [y1, y2, y3]

    T = resultant_matrix(inst)
    (v1, v2), _ = _blocks(linalg.inverse(T))
    X4 = [-b1 * y1 - y3, -b2 * y3, -b1 * y3]
    X5 = [b2 * y1, b1 * y1 + y3, b2 * y3]

    def corr(p, q, e4, e5):
        return [x + y for x, y in zip(_mat_vec(p, e4), _mat_vec(q, e5))]

    Z4 = corr(v1, v2, [zero, a1 * y2, zero], [zero, b2 * y3, zero])
    Z5 = corr(v1, v2, [zero, a1 * y1, zero], [zero, b2 * y2, zero])
    lam2 = [a, b, c]
    n2 = _row_dot(lam2, _mat_vec(v1, Y))
    n3 = _row_dot(lam2, _mat_vec(v2, Y))
    n4 = _row_dot(lam2, [x + z for x, z in zip(_mat_vec(v2, X4), Z4)])
    n5 = _row_dot(lam2, [x + z for x, z in zip(_mat_vec(v2, X5), Z5)])
    nu = (-n4 * L1 - n5 * L2, n2, n3, n4, n5, zero)

    sT = permute_columns(T, [s - 1 for s in SIGMA])
    _, (w1, w2) = _blocks(linalg.inverse(sT))
    X4h = [a1 * y1, y1 + a2 * y3, a1 * y3]
    X5h = [-a2 * y1, -a1 * y1, -y1 - a2 * y3]
    if literal_z_hat:
        Z4h, Z5h = Z4, Z5
    else:
        Z4h = corr(w1, w2, [zero, a1 * y2, zero], [zero, b2 * y3, zero])
        Z5h = corr(w1, w2, [zero, a1 * y1, zero], [zero, b2 * y2, zero])
    lam1 = [b, c, d]
    h2 = _row_dot(lam1, _mat_vec(w1, Y))
    h3 = _row_dot(lam1, _mat_vec(w2, Y))
    h4 = _row_dot(lam1, [x + z for x, z in zip(_mat_vec(w1, X4h), Z4h)])
    h5 = _row_dot(lam1, [x + z for x, z in zip(_mat_vec(w1, X5h), Z5h)])
    nu_hat = (-h4 * L1 - h5 * L2, h2, h3, h4, h5, zero)
    return nu, nu_hat


def conic_witness_by_permutation(inst: Instance, i: int, part: str) -> tuple[Poly, ...]:
    """Witness for one half of y_i L3 from a cyclic column shift of T.

    The z-coefficients are ``Lambda w1 Y`` and ``Lambda w2 Y`` where (w1, w2)
    are the bottom blocks of the inverse of T with its columns shifted by
    ``k = 4 - i - [part == 'v']``; the A-coefficients are then forced, and are
    obtained by exact division by the conic.  Raises InexactDivisionError if
    the shift does not produce a witness.
    """
    if i not in (1, 2, 3) or part not in ("u", "v"):
        raise ValueError("i in 1..3, part in {'u', 'v'}")
    ring = RING_R
    y1, y2, y3, a, b, c, d = ring.gens()
    L1, L2, _ = l_forms(ring)
    zero = ring.zero
    k = (4 - i - (1 if part == "v" else 0)) % 6
    sT = permute_columns(resultant_matrix(inst), [(j + k) % 6 for j in range(6)])
    _, (w1, w2) = _blocks(linalg.inverse(sT))
    lam = [a, b, c] if part == "u" else [b, c, d]
    Y = [y1, y2, y3]
    n2 = _row_dot(lam, _mat_vec(w1, Y))
    n3 = _row_dot(lam, _mat_vec(w2, Y))
    target = conic_target(i, part, ring)
    ru = target[1] - inst.f(ring) * n2
    rv = target[2] - inst.g(ring) * n3
    det2 = y2 * y2 - y1 * y3
    n4 = (-y2 * ru - y3 * rv).divide_exact(det2)
    n5 = (-y1 * ru - y2 * rv).divide_exact(det2)
    return (-n4 * L1 - n5 * L2, n2, n3, n4, n5, zero)


def conic_witness_by_membership(inst: Instance, i: int, ring: Ring = RING_R,
                                corr: Corrections | None = None) -> Witness | None:
    """Solve B w = (0, y_i L2, y_i L1) with the third column of A excluded.

    Allowing that column makes the problem trivial (w6 = y_i), which yields
    the tautology y_i L3 - y_i L3 = 0 instead of a genuine equation.
    """
    e1, c1, c2 = z_columns(inst, ring, corr)
    return graded_submodule_membership(
        conic_target(i, None, ring), [e1, c1, c2], presentation_matrix_A(ring),
        allowed_monomials={5: []},
    )


def _sum_vec(x: Sequence[Poly], y: Sequence[Poly]) -> tuple[Poly, ...]:
    return tuple(p + q for p, q in zip(x, y))


def kernel_conic_equations(inst: Instance, cross_check: bool = True) -> tuple[list[KernelEquation], dict]:
    """The three equations extending y_i * Q.

    i = 1 follows the resultant-matrix construction; i = 2, 3 use the
    membership solver, and every i is cross-checked against the column-shift
    construction.  Returns the equations and a dict of auxiliary data
    (``nu``, ``nu_hat`` for i = 1 and the cross-check outcomes).
    """
    _require_generic(inst)
    ring = RING_R
    S = RING_S
    B = matrix_B(inst, ring)
    eqs: list[KernelEquation] = []
    aux: dict = {"cross_check": {}}

    nu, nu_hat = conic_witnesses_y1(inst)
    if not replay_witness(B, nu, conic_target(1, "u")) or not replay_witness(B, nu_hat, conic_target(1, "v")):
        raise MembershipFailure("resultant-matrix witnesses for y1 L3 do not replay")
    aux["nu"], aux["nu_hat"] = nu, nu_hat
    for i in (1, 2, 3):
        head = S.gen(f"y{i}") * l_forms(S)[2]
        target = conic_target(i)
        if i == 1:
            w = _sum_vec(nu, nu_hat)
            route = "resultant"
        else:
            sol = conic_witness_by_membership(inst, i)
            if sol is None:
                raise MembershipFailure(f"no witness for y{i} L3")
            w = sol.coefficients
            route = "membership"
        if not replay_witness(B, w, target):
            raise MembershipFailure(f"witness for y{i} L3 does not replay")
        eqs.append(_assemble(f"y{i}L3", head, target, w, -1, route))
        if cross_check:
            try:
                wp = _sum_vec(conic_witness_by_permutation(inst, i, "u"),
                              conic_witness_by_permutation(inst, i, "v"))
                ok = replay_witness(B, wp, target)
                perm_eq = _assemble(f"y{i}L3", head, target, wp, -1, "permutation").equation
            except InexactDivisionError:
                ok, perm_eq = False, None
            aux["cross_check"][i] = {"permutation_replays": ok, "permutation_equation": perm_eq}
    return eqs, aux


# -- certificates -----------------------------------------------------------------------

@dataclass(frozen=True)
class KernelCertificate:
    instance: Instance
    equations: dict[str, KernelEquation]
    aux: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, name: str) -> KernelEquation:
        return self.equations[name]

    @property
    def eq_z1sq(self) -> Poly:
        return self.equations["z1sq"].equation

    @property
    def eq_z2sq(self) -> Poly:
        return self.equations["z2sq"].equation

    @property
    def eq_z1z2(self) -> Poly:
        return self.equations["z1z2"].equation

    @property
    def eq_yL3(self) -> tuple[Poly, Poly, Poly]:
        return tuple(self.equations[f"y{i}L3"].equation for i in (1, 2, 3))


def build_certificate(inst: Instance, cross_check: bool = False) -> KernelCertificate:
    k1, k2 = kernel_square_equations(inst)
    k3 = kernel_mixed_equation(inst)
    conics, aux = kernel_conic_equations(inst, cross_check=cross_check)
    eqs = {k.name: k for k in (k1, k2, k3, *conics)}
    return KernelCertificate(inst, eqs, aux)


def pullback_residues(cert: KernelCertificate, phi: Mapping[str, Poly] | None = None) -> dict[str, Poly]:
    """Phi*(equation) for every certificate equation (all zero when valid)."""
    phi = phi or build_phi_full(cert.instance)
    return {n: ring_hom_apply(phi, k.equation, RING_UV) for n, k in cert.equations.items()}


@dataclass(frozen=True)
class CertificateCheck:
    pullbacks_zero: dict[str, bool]
    witnesses_replay: dict[str, bool]
    heads_match: dict[str, bool]
    assembly_consistent: dict[str, bool]

    @property
    def kernel_ok(self) -> bool:
        return all(self.pullbacks_zero.values())

    @property
    def replay_ok(self) -> bool:
        return all(self.witnesses_replay.values()) and all(self.heads_match.values()) \
            and all(self.assembly_consistent.values())


def check_certificate(cert: KernelCertificate) -> CertificateCheck:
    """Replay every equation of a certificate from scratch.

    Four independent facts per equation: Phi* kills the equation; B times
    the witness is the target; Phi* of the head is the signed target; and the
    equation is the head minus the signed witness combination.
    """
    inst = cert.instance
    phi = build_phi_full(inst, allow_degenerate=True)
    phi0 = build_phi0()
    B = matrix_B(inst)
    pull, rep, heads, asm = {}, {}, {}, {}
    for name, k in cert.equations.items():
        pull[name] = not ring_hom_apply(phi, k.equation, RING_UV)
        rep[name] = replay_witness(B, k.witness, k.target)
        heads[name] = ring_hom_apply(phi, k.head, RING_UV) == module_value(k.target, phi0).scale(k.sign)
        asm[name] = _assemble(name, k.head, k.target, k.witness, k.sign, k.route).equation == k.equation
    return CertificateCheck(pull, rep, heads, asm)


def restrict_abcd(p: Poly, ring: Ring = RING_T) -> Poly:
    """Set a = b = c = d = 0 and move to the smaller ring."""
    return p.subs({"a": 0, "b": 0, "c": 0, "d": 0}).embed(ring)


# -- correction terms and the coefficient system -----------------------------------------

def coefficient_system(inst: Instance) -> PolyMatrix:
    """The 4 x 4 matrix C with C (s4, s5, t4, t5)^T the obstruction coefficients."""
    ring = RING_ABCD
    a, b, c, d = ring.gens()
    dl = inst.deltas
    d1, d2, d3 = dl.d1, dl.d2, dl.d3
    a1, a2, b1, b2 = inst.alpha1, inst.alpha2, inst.beta1, inst.beta2
    z = ring.zero
    return PolyMatrix(ring, [
        [d1 * d, -2 * d1 * c + b1 * d2 * d, z, -a2 * d1 * d],
        [d2 * d, -2 * d2 * c + (b2 * d2 - d1) * d, z, -a2 * d2 * d],
        [-b1 * d3 * a, z, (a1 * d3 - d1) * a - 2 * d3 * b, d3 * a],
        [-b1 * d1 * a, z, a2 * d3 * a - 2 * d1 * b, d1 * a],
    ])


@dataclass(frozen=True)
class KernelReport:
    dimension: int
    basis_vector: tuple[Poly, ...] | None


def coefficient_kernel(inst: Instance) -> KernelReport:
    """Kernel of C over the fraction field of Q[a,b,c,d].

    When the kernel is a line, a nonzero column of the adjugate spans it.
    """
    C = coefficient_system(inst)
    r = rank_over_fraction_field(C)
    dim = 4 - r
    vec = None
    if dim == 1:
        adj = adjugate(C)
        for j in range(4):
            col = adj.column(j)
            if any(col):
                vec = col
                break
    return KernelReport(dim, vec)


@dataclass(frozen=True)
class ResidualReport:
    K: Poly
    L: Poly
    K2: Poly
    L2: Poly
    coefficients: tuple[Poly, Poly, Poly, Poly]


def residual_computation(inst: Instance, corr: Corrections) -> ResidualReport:
    """Residuals K, L of z1^2, z2^2 and their reductions K'', L''.

    ``corr`` holds s4, s5, t4, t5 as polynomials in a ring whose names include
    a, b, c, d (further names act as formal parameters).  The returned
    coefficients are those of u^2 v, u v^2 in K'' and in L''.
    """
    base = corr.s4.ring
    extra = [n for n in base.names if n not in ("a", "b", "c", "d") and n not in RING_R.names]
    names = ("u", "v") + tuple(extra) + ("a", "b", "c", "d")
    weights = (1, 1) + tuple(base.weights[base.index[n]] for n in extra) + (1, 1, 1, 1)
    U = Ring(names, weights)
    phi0 = {k: p.embed(U) for k, p in build_phi0().items()}
    for n in extra:
        phi0[n] = U.gen(n)
    u, v, a, b, c, d = (U.gen(n) for n in ("u", "v", "a", "b", "c", "d"))
    s4, s5, t4, t5 = (p.embed(U) for p in (corr.s4, corr.s5, corr.t4, corr.t5))
    dl = inst.deltas
    a2, b1 = inst.alpha2, inst.beta1

    def img(p: Poly) -> Poly:
        return ring_hom_apply(phi0, p, U)

    f, g = img(inst.f()), img(inst.g())
    Z1 = (f + s4) * u + s5 * v
    Z2 = t4 * u + (g + t5) * v
    K = (f + s4) ** 2 * d * v - 2 * (f + s4) * s5 * (b * u + c * v) + s5 * s5 * a * u
    L = t4 * t4 * d * v - 2 * (g + t5) * t4 * (b * u + c * v) + (g + t5) ** 2 * a * u
    eta, xi = square_witnesses(inst)
    eta = [img(p) for p in eta]
    xi = [img(p) for p in xi]
    K1 = K - (eta[0] + eta[1] * Z1 + eta[2] * Z2)
    L1 = L - (xi[0] + xi[1] * Z1 + xi[2] * Z2)
    K2 = K1 - (-2 * b * s5 - a2 * d * t4) * Z1 \
        - (2 * a2 * (-c * s5 + d * s4) - dl.d2 * d * s5 - a2 * a2 * d * t5) * Z2
    L2 = L1 - (-b1 * b1 * a * s4 - dl.d3 * a * t4 + 2 * b1 * (a * t5 - b * t4)) * Z1 \
        - (-b1 * a * s5 - 2 * c * t4) * Z2

    def coeff(p: Poly, eu: int, ev: int) -> Poly:
        return p.coefficients_in(("u", "v")).get((eu, ev), U.zero)

    coeffs = (coeff(K2, 2, 1), coeff(K2, 1, 2), coeff(L2, 2, 1), coeff(L2, 1, 2))
    return ResidualReport(K, L, K2, L2, coeffs)


# -- the degenerate stratum ----------------------------------------------------------------

@dataclass(frozen=True)
class DegenerateReport:
    instance: Instance
    kernel: KernelReport
    z1sq_member: bool
    z2sq_member: bool
    conic_member_free_s: bool
    conic_member_s_zero: bool
    conic_member_specialised: bool | None
    pullbacks_zero: bool


def degenerate_extension(inst: Instance, specialise: Poly | None = None) -> DegenerateReport:
    """Membership behaviour on the stratum delta1 = 0, delta2 delta3 != 0.

    The correction s4 becomes a formal coordinate ``s`` of weight 2 with
    t5 = s4 / alpha2 = beta1 s4.  Optionally ``specialise`` gives a concrete
    weight-2 form in a, b, c, d to substitute for s as a further test.
    """
    dl = inst.deltas
    if dl.d1 != 0 or dl.d2 * dl.d3 == 0:
        raise WrongStratumError("degenerate extension needs delta1 = 0 and delta2 delta3 != 0")
    ring = RING_R_S
    s = ring.gen("s")
    corr = Corrections(s, ring.zero, ring.zero, inst.beta1 * s)
    e1, c1, c2 = z_columns(inst, ring, corr)
    A = presentation_matrix_A(ring)
    phi = build_phi_full(inst, corr, allow_degenerate=True)
    phi0 = extend_phi0(ring)
    U = next(iter(phi0.values())).ring

    # module images of z1^2 - y1 f^2 and z2^2 - y3 g^2 via Phi
    def head_target(head_ring_poly: Poly) -> tuple[Poly, Poly, Poly]:
        return lift_to_module(ring_hom_apply(phi, head_ring_poly, U), ring)

    S = RING_S_S
    z1, z2 = S.gen("z1"), S.gen("z2")
    h1 = z1 * z1 - S.gen("y1") * inst.f(S) ** 2
    h2 = z2 * z2 - S.gen("y3") * inst.g(S) ** 2
    w1 = graded_submodule_membership(head_target(h1), [e1, c1, c2], A)
    w2 = graded_submodule_membership(head_target(h2), [e1, c1, c2], A)
    pull_ok = True
    for head, w in ((h1, w1), (h2, w2)):
        if w is not None:
            eq = head - (w.coefficients[0].embed(S) + w.coefficients[1].embed(S) * z1
                         + w.coefficients[2].embed(S) * z2)
            pull_ok &= not ring_hom_apply(phi, eq, U)

    free = conic_witness_by_membership(inst, 1, ring, corr)
    zero_inst = conic_witness_by_membership(inst, 1, RING_R)
    spec = None
    if specialise is not None:
        sp = specialise.embed(RING_R)
        spec = conic_witness_by_membership(inst, 1, RING_R, Corrections(sp, RING_R.zero, RING_R.zero, inst.beta1 * sp)) is not None
    return DegenerateReport(inst, coefficient_kernel(inst), w1 is not None, w2 is not None,
                            free is not None, zero_inst is not None, spec, pull_ok)


def lift_to_module(p: Poly, ring: Ring) -> tuple[Poly, Poly, Poly]:
    """Write p in Q[u,v,...] as e0 + e1 u + e2 v with e_i in ``ring`` (y's as symbols).

    Repeatedly rewrites u^2, uv, v^2 with the Phi0 relations, which lowers
    the (u, v)-degree until at most linear terms remain.
    """
    U = p.ring
    y1, y2, y3 = (ring.gen(n) for n in ("y1", "y2", "y3"))
    a, b, c, d = (ring.gen(n) for n in ("a", "b", "c", "d"))
    # u^2 = y1 + dv - bd + c^2 ; uv = y2 - bu - cv + ad - bc ; v^2 = y3 + au - ac + b^2
    rules = {
        (2, 0): (y1 - b * d + c * c, ring.zero, d),
        (1, 1): (y2 + a * d - b * c, -b, -c),
        (0, 2): (y3 - a * c + b * b, a, ring.zero),
    }
    others = [n for n in U.names if n not in ("u", "v")]
    for n in others:
        if n not in ring.index:
            raise ValueError(f"variable {n} has no counterpart in {ring}")
    memo: dict[tuple[int, int], tuple[Poly, Poly, Poly]] = {
        (0, 0): (ring.one, ring.zero, ring.zero),
        (1, 0): (ring.zero, ring.one, ring.zero),
        (0, 1): (ring.zero, ring.zero, ring.one),
    }

    def reduce_uv(i: int, j: int) -> tuple[Poly, Poly, Poly]:
        got = memo.get((i, j))
        if got is not None:
            return got
        if i >= 2:
            rule, rest = rules[(2, 0)], (i - 2, j)
        elif i == 1 and j >= 1:
            rule, rest = rules[(1, 1)], (0, j - 1)
        else:
            rule, rest = rules[(0, 2)], (i, j - 2)
        r0, r1, r2 = reduce_uv(*rest)
        # (r0 + r1 u + r2 v) * (q0 + q1 u + q2 v), reduced again for the quadratic terms
        q0, q1, q2 = rule
        out0 = r0 * q0
        out1 = r0 * q1 + r1 * q0
        out2 = r0 * q2 + r2 * q0
        for coeff, key in ((r1 * q1, (2, 0)), (r1 * q2 + r2 * q1, (1, 1)), (r2 * q2, (0, 2))):
            if coeff:
                s0, s1, s2 = rules[key]
                out0, out1, out2 = out0 + coeff * s0, out1 + coeff * s1, out2 + coeff * s2
        memo[(i, j)] = (out0, out1, out2)
        return memo[(i, j)]

    parts = p.coefficients_in(("u", "v"))
    e = [ring.zero, ring.zero, ring.zero]
    for (i, j), coeff in parts.items():
        c_r = coeff.embed(ring) if others else ring.const(coeff.constant_term())
        m = reduce_uv(i, j)
        for k in range(3):
            if m[k]:
                e[k] = e[k] + c_r * m[k]
    return tuple(e)
