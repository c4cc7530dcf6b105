"""The ordered verification pipeline behind ``symdetfano verify``.

Each stage records pass, fail or skipped with a short detail.  The exit
code is the code of the first failing stage, so scripts can gate on a
particular stage.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import __version__
from .assembly import (
    assemble_tprime,
    assemble_wprime,
    block_correspondence,
    halfpoint_locus_check,
    hilbert_check,
    slice_surface,
    tangency_report,
    ModelPair,
)
from .errors import AlgebraError
from .extension import (
    KernelCertificate,
    build_certificate,
    build_phi,
    check_certificate,
    coefficient_kernel,
    column_kill_residues,
    degenerate_extension,
    image_equations,
    phi0_matches_cofactors,
    restrict_abcd,
)
from .ffscan import quasismooth_scan
from .poly import ring_hom_apply
from .serialize import InstanceFile, certificate_digest

EXIT_OK = 0
EXIT_PARSE = 10
EXIT_DEGENERATE = 20
EXIT_KERNEL = 30
EXIT_REPLAY = 31
EXIT_ASSEMBLY = 40
EXIT_SCAN = 50

STAGES = (
    ("deltas", EXIT_DEGENERATE),
    ("image", EXIT_KERNEL),
    ("phi0", EXIT_KERNEL),
    ("column_kill", EXIT_KERNEL),
    ("coefficient_kernel", EXIT_KERNEL),
    ("kernel", EXIT_KERNEL),
    ("replay", EXIT_REPLAY),
    ("assembly", EXIT_ASSEMBLY),
    ("tangency", EXIT_ASSEMBLY),
    ("branch", EXIT_ASSEMBLY),
    ("hilbert", EXIT_ASSEMBLY),
    ("slice", EXIT_ASSEMBLY),
    ("degenerate", EXIT_KERNEL),
    ("scan", EXIT_SCAN),
)
STAGE_CODES = dict(STAGES)
DEFAULT_CHECKS = tuple(n for n, _ in STAGES if n not in ("scan", "degenerate"))


def parse_checks(spec: str | None, stratum: str = "generic") -> tuple[str, ...]:
    """``default``, ``all``, ``degenerate`` or a comma list of stage names."""
    if spec is None or spec == "default":
        if stratum == "delta1_zero":
            return ("deltas", "phi0", "column_kill", "degenerate")
        return DEFAULT_CHECKS
    if spec == "all":
        return tuple(n for n, _ in STAGES if n != "degenerate")
    names = tuple(s.strip() for s in spec.split(",") if s.strip())
    if names == ("degenerate",):
        return ("deltas", "phi0", "column_kill", "degenerate")
    unknown = [n for n in names if n not in STAGE_CODES]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    return tuple(n for n, _ in STAGES if n in names)


@dataclass
class StageResult:
    name: str
    status: str
    detail: str = ""
    seconds: float | None = None

    def to_json(self, timings: bool) -> dict:
        d = {"name": self.name, "status": self.status, "detail": self.detail}
        if timings and self.seconds is not None:
            d["seconds"] = round(self.seconds, 3)
        return d


@dataclass
class VerificationReport:
    seed: int | None
    stages: list[StageResult] = field(default_factory=list)
    certificate_digest: str | None = None
    parameter_tally: int | None = None
    scan: dict | None = None

    @property
    def exit_code(self) -> int:
        for s in self.stages:
            if s.status == "fail":
                return STAGE_CODES[s.name]
        return EXIT_OK

    def status(self, name: str) -> str | None:
        return next((s.status for s in self.stages if s.name == name), None)

    def to_json(self, timings: bool = False) -> dict:
        return {
            "tool": "symdetfano",
            "version": __version__,
            "seed": self.seed,
            "certificate_digest": self.certificate_digest,
            "parameter_tally": self.parameter_tally,
            "checks": [s.to_json(timings) for s in self.stages],
            "scan": self.scan,
            "exit_code": self.exit_code,
        }


class _Runner:
    def __init__(self, report: VerificationReport, selected: Sequence[str]):
        self.report = report
        self.selected = set(selected)
        self.blocked = False

    def run(self, name: str, fn: Callable[[], tuple[bool, str]]) -> bool:
        if name not in self.selected:
            return True
        if self.blocked:
            self.report.stages.append(StageResult(name, "skipped", "an earlier stage failed"))
            return False
        t = time.perf_counter()
        try:
            ok, detail = fn()
        except AlgebraError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        self.report.stages.append(StageResult(name, "pass" if ok else "fail", detail, time.perf_counter() - t))
        if not ok:
            self.blocked = True
        return ok


def verify_instance(data: InstanceFile, checks: Sequence[str] | None = None,
                    certificate: KernelCertificate | None = None,
                    scan_q: int = 10007, scan_samples: int = 1000, scan_seed: int = 0,
                    hilbert_depth: int = 12) -> VerificationReport:
    """Run the selected stages in their fixed order and collect the results."""
    inst = data.instance
    checks = tuple(checks) if checks is not None else parse_checks(None, data.stratum)
    report = VerificationReport(data.seed)
    run = _Runner(report, checks)
    state: dict = {}

    def deltas():
        d = inst.deltas
        detail = f"Delta={d.Delta} delta1={d.d1} delta2={d.d2} delta3={d.d3}"
        if "degenerate" in checks:
            return inst.in_delta1_stratum, detail
        return inst.is_generic, detail

    def image():
        phi = build_phi(inst)
        bad = [k for k, e in image_equations(inst).items() if ring_hom_apply(phi, e, phi["z1"].ring)]
        return not bad, "all four vanish" if not bad else f"nonzero: {bad}"

    def phi0():
        return phi0_matches_cofactors(), "images are the signed 2x2 minors"

    def column_kill():
        res = column_kill_residues()
        return not any(res), "(1,u,v) A = 0"

    def coeff_kernel():
        k = coefficient_kernel(inst)
        return k.dimension == 0, f"kernel dimension {k.dimension}"

    def kernel():
        cert = certificate if certificate is not None else build_certificate(inst)
        if cert.instance != inst:
            return False, "certificate belongs to another instance"
        state["cert"] = cert
        report.certificate_digest = certificate_digest(cert)
        chk = check_certificate(cert)
        state["check"] = chk
        bad = [n for n, ok in chk.pullbacks_zero.items() if not ok]
        return not bad, "six equations pull back to zero" if not bad else f"nonzero pullback: {bad}"

    def replay():
        chk = state.get("check")
        if chk is None:
            cert = certificate if certificate is not None else build_certificate(inst)
            state["cert"] = cert
            chk = check_certificate(cert)
        bad = [n for n in chk.witnesses_replay
               if not (chk.witnesses_replay[n] and chk.heads_match[n] and chk.assembly_consistent[n])]
        return not bad, "witnesses replay exactly" if not bad else f"replay failed: {bad}"

    def assembly():
        cert = state.get("cert") or build_certificate(inst)
        tp = assemble_tprime(inst)
        wp = assemble_wprime(inst, cert)
        state["pair"] = ModelPair(inst, cert, tp, wp, block_correspondence(inst))
        ok = tuple(restrict_abcd(w) for w in wp) == tp
        return ok, "Wprime restricts to Tprime" if ok else "restriction differs from Tprime"

    def pair() -> ModelPair:
        if "pair" not in state:
            cert = state.get("cert") or build_certificate(inst)
            state["pair"] = ModelPair(inst, cert, assemble_tprime(inst), assemble_wprime(inst, cert),
                                      block_correspondence(inst))
        return state["pair"]

    def tangency():
        r = tangency_report(inst)
        return r.ok, f"squares={list(r.squares)} roots_match={list(r.roots_match_phi)}"

    def branch():
        r = halfpoint_locus_check(inst, raise_on_failure=False)
        ok = r.colength == 9 and r.transversal
        return ok, f"colength={r.colength} transversal={r.transversal}"

    def hilbert():
        res = hilbert_check(pair(), hilbert_depth)
        ok = all(c.ok for c in res.values())
        return ok, "; ".join(f"{k}: {c.computed[:7]}" for k, c in res.items())

    def slicing():
        if data.slice is None:
            return True, "no slice data"
        hs, q2 = data.slice.forms()
        s = slice_surface(pair(), hs, q2)
        report.parameter_tally = s.parameter_tally
        ok = s.transverse and s.curve_hilbert.ok
        return ok, (f"tally={s.parameter_tally} (9+{s.weight_one_parameters}+{s.weight_two_parameters}) "
                    f"linear_rank={s.linear_rank} surface_ok={s.surface_hilbert.ok}")

    def degenerate():
        r = degenerate_extension(inst)
        vec = r.kernel.basis_vector
        shape = (r.kernel.dimension == 1 and vec is not None and not vec[1] and not vec[2]
                 and bool(vec[3]) and vec[0] == vec[3].scale(inst.alpha2))
        ok = (shape and r.z1sq_member and r.z2sq_member and not r.conic_member_free_s
              and r.conic_member_s_zero and r.pullbacks_zero)
        return ok, (f"kernel_dim={r.kernel.dimension} z-squares={r.z1sq_member and r.z2sq_member} "
                    f"y1L3 member: free s4={r.conic_member_free_s}, s4=0={r.conic_member_s_zero}")

    def scan():
        rep = quasismooth_scan(list(pair().wprime), pair().wprime[0].ring, scan_q, scan_samples, seed=scan_seed)
        report.scan = rep.to_json()
        return rep.quasismooth_evidence, (f"q={scan_q} points={rep.points_on_variety} drops={len(rep.drops)} "
                                          f"half_points={len(rep.half_points)}")

    for name, fn in (("deltas", deltas), ("image", image), ("phi0", phi0), ("column_kill", column_kill),
                     ("coefficient_kernel", coeff_kernel), ("kernel", kernel), ("replay", replay),
                     ("assembly", assembly), ("tangency", tangency), ("branch", branch),
                     ("hilbert", hilbert), ("slice", slicing), ("degenerate", degenerate), ("scan", scan)):
        run.run(name, fn)
    return report
