"""Command-line front end: ``gen``, ``verify``, ``emit`` and ``scan``.

Exit codes: 0 pass, 10 unreadable input, 20 degenerate instance, 30 kernel
equation failure, 31 witness replay failure, 40 assembly failure, 50 scan
failure.  Every output is a function of the inputs and the ``--seed`` flag.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import __version__
from .assembly import (
    EXAMPLE_RING,
    model_pair,
    random_slice,
    worked_example,
)
from .detmodel import model_equations
from .errors import AlgebraError, BadPrimeError, ExhaustedRejection, ParseError
from .extension import build_certificate, random_instance
from .ffscan import quasismooth_scan
from .pipeline import EXIT_DEGENERATE, EXIT_OK, EXIT_PARSE, EXIT_SCAN, parse_checks, verify_instance
from .poly import Poly, Ring
from .serialize import (
    InstanceFile,
    SliceData,
    certificate_from_json,
    certificate_to_json,
    dumps,
    poly_to_json,
)

FORMATS = ("text", "json", "cas")


class UnknownFormat(ParseError):
    pass


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def read_instances(path: str) -> list[InstanceFile]:
    data = _read_json(path)
    if isinstance(data, dict) and "instances" in data:
        return [InstanceFile.from_json(d) for d in data["instances"]]
    return [InstanceFile.from_json(data)]


# -- gen --------------------------------------------------------------------------

def generate(seed: int, count: int, stratum: str, with_slice: bool = False) -> list[InstanceFile]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        inst = random_instance(rng, stratum)
        sl = None
        if with_slice:
            hs, q2 = random_slice(rng)
            sl = SliceData([h.to_text() for h in hs], q2.to_text())
        out.append(InstanceFile(inst, seed, stratum, sl))
    return out


def cmd_gen(args) -> int:
    try:
        files = generate(args.seed, args.count, args.stratum, args.with_slice)
    except ExhaustedRejection as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    if len(files) == 1:
        payload = files[0].to_json()
    else:
        payload = {"instances": [f.to_json() for f in files]}
    _write(dumps(payload), args.out)
    return EXIT_OK


# -- verify ----------------------------------------------------------------------

def cmd_verify(args) -> int:
    try:
        files = read_instances(args.input)
        cert = None
        if args.certificate:
            data = _read_json(args.certificate)
            cert = certificate_from_json(data.get("certificate", data))
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    reports = []
    code = EXIT_OK
    for f in files:
        try:
            checks = parse_checks(args.checks, f.stratum)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        rep = verify_instance(f, checks, certificate=cert, scan_q=args.scan_q,
                              scan_samples=args.scan_samples, scan_seed=args.scan_seed)
        reports.append(rep.to_json(timings=args.timings))
        if code == EXIT_OK:
            code = rep.exit_code
        if not args.quiet:
            for s in rep.stages:
                print(f"{s.status:7} {s.name:20} {s.detail}", file=sys.stderr)
    payload = reports[0] if len(reports) == 1 else {"reports": reports, "exit_code": code}
    _write(dumps(payload), args.out)
    return code


# -- emit ------------------------------------------------------------------------

def _listing(f: InstanceFile) -> dict:
    """Everything ``emit`` prints, as polynomials."""
    inst = f.instance
    cert = build_certificate(inst)
    pair = model_pair(inst, cert)
    mat = pair.correspondence.matrix(inst)
    model = model_equations(mat)
    return {
        "matrix": mat.m,
        "model": model,
        "tprime": list(pair.tprime),
        "certificate": cert,
        "wprime": list(pair.wprime),
    }


def _ring_decl(name: str, ring: Ring) -> str:
    return f"{name} = QQ[{','.join(ring.names)}, Degrees => {{{','.join(map(str, ring.weights))}}}];"


def _ideal(name: str, polys: Sequence[Poly]) -> str:
    body = ",\n  ".join(p.to_text() for p in polys)
    return f"{name} = ideal(\n  {body});"


def render_text(f: InstanceFile) -> str:
    L = _listing(f)
    lines = ["# symdetfano equation listing", f"# version {__version__}", "",
             "## instance"]
    for k, v in f.to_json().items():
        if k not in ("schema", "seed", "stratum"):
            lines.append(f"{k} = {v}")
    m = L["matrix"]
    lines += ["", f"## symmetric matrix M over {m.ring.to_json()['names']}"]
    lines += ["[" + ", ".join(x.to_text() for x in row) + "]" for row in m.rows]
    model = L["model"]
    lines += ["", f"## determinantal model: z.M = 0 and cofactors = z_i z_j, ring {list(model.ring.names)}"]
    lines += [f"syzygy[{j + 1}] = {p.to_text()}" for j, p in enumerate(model.linear_syzygies)]
    lines += [f"quadric[{i}{j}] = {p.to_text()}" for (i, j), p in zip(model.pairs, model.quadratic)]
    lines += ["", "## Tprime, ring z1:3 z2:3 y1:2 y2:2 y3:2"]
    lines += [f"tprime[{k + 1}] = {p.to_text()}" for k, p in enumerate(L["tprime"])]
    lines += ["", "## kernel equations, ring z1:3 z2:3 y1:2 y2:2 y3:2 a b c d"]
    lines += [f"{n} = {k.equation.to_text()}" for n, k in L["certificate"].equations.items()]
    lines += ["", "## Wprime"]
    lines += [f"wprime[{k + 1}] = {p.to_text()}" for k, p in enumerate(L["wprime"])]
    return "\n".join(lines) + "\n"


def render_json(f: InstanceFile) -> str:
    L = _listing(f)
    m = L["matrix"]
    model = L["model"]
    return dumps({
        "instance": f.to_json(),
        "matrix": {"ring": m.ring.to_json(), "rows": [[x.to_text() for x in row] for row in m.rows]},
        "model_equations": [poly_to_json(p) for p in model.all()],
        "tprime": [poly_to_json(p) for p in L["tprime"]],
        "certificate": certificate_to_json(L["certificate"]),
        "wprime": [poly_to_json(p) for p in L["wprime"]],
    })


def render_cas(f: InstanceFile) -> str:
    L = _listing(f)
    m = L["matrix"]
    model = L["model"]
    S = L["wprime"][0].ring
    T = L["tprime"][0].ring
    out = ["-- ring and ideal listing (Macaulay2 syntax)", _ring_decl("P", m.ring),
           "M = matrix {" + ", ".join("{" + ", ".join(x.to_text() for x in row) + "}" for row in m.rows) + "};",
           _ring_decl("A", model.ring), _ideal("Imodel", model.all()),
           _ring_decl("T", T), _ideal("Tprime", L["tprime"]),
           _ring_decl("S", S), _ideal("Kernel", [k.equation for k in L["certificate"].equations.values()]),
           _ideal("Wprime", L["wprime"])]
    return "\n".join(out) + "\n"


def render_worked_example(fmt: str) -> str:
    w = worked_example()
    if fmt == "json":
        return dumps({"tprime": [poly_to_json(p) for p in w.tprime],
                      "matrix": {"ring": w.matrix.ring.to_json(),
                                 "rows": [[x.to_text() for x in row] for row in w.matrix.m.rows]},
                      "sign": w.sign})
    if fmt == "cas":
        M = w.matrix.m
        return "\n".join([
            "-- illustrative instance with symbolic alpha, beta (Macaulay2 syntax)",
            _ring_decl("P", M.ring),
            "M = matrix {" + ", ".join("{" + ", ".join(x.to_text() for x in row) + "}" for row in M.rows) + "};",
            _ring_decl("T", EXAMPLE_RING),
            _ideal("Tprime", w.tprime),
        ]) + "\n"
    lines = ["# illustrative instance, alpha and beta symbolic", "## matrix M"]
    lines += ["[" + ", ".join(x.to_text() for x in row) + "]" for row in w.matrix.m.rows]
    lines += ["## Tprime"] + [f"tprime[{k + 1}] = {p.to_text()}" for k, p in enumerate(w.tprime)]
    lines += [f"## z_i^2 = {w.sign} * cofactor(i, i) of M"]
    return "\n".join(lines) + "\n"


def cmd_emit(args) -> int:
    try:
        if args.format not in FORMATS:
            raise UnknownFormat(f"unknown format {args.format!r}; choose from {', '.join(FORMATS)}")
        if args.worked_example:
            _write(render_worked_example(args.format), args.out)
            return EXIT_OK
        if not args.input:
            raise ParseError("emit needs --in or --worked-example")
        files = read_instances(args.input)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    render = {"text": render_text, "json": render_json, "cas": render_cas}[args.format]
    try:
        text = "".join(render(f) for f in files)
    except AlgebraError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    _write(text, args.out)
    return EXIT_OK


# -- scan -------------------------------------------------------------------------

def cmd_scan(args) -> int:
    try:
        files = read_instances(args.input)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    reports = []
    code = EXIT_OK
    for f in files:
        try:
            pair = model_pair(f.instance, with_wprime=args.target == "wprime")
            eqs = list(pair.wprime if args.target == "wprime" else pair.tprime)
            rep = quasismooth_scan(eqs, eqs[0].ring, args.q, args.samples, seed=args.seed)
        except BadPrimeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_SCAN
        except AlgebraError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
        d = rep.to_json()
        d["target"] = args.target
        reports.append(d)
        if rep.drops and code == EXIT_OK:
            code = EXIT_SCAN
        if not args.quiet:
            print(f"q={rep.q} points={rep.points_on_variety} drops={len(rep.drops)} "
                  f"half_points={len(rep.half_points)}", file=sys.stderr)
            for drop in rep.drops[:10]:
                print(f"  rank {drop.rank} at {drop.point}", file=sys.stderr)
    _write(dumps(reports[0] if len(reports) == 1 else {"reports": reports}), args.out)
    return code


# -- argument parsing --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symdetfano", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate random instances")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--stratum", choices=("generic", "delta1_zero"), default="generic")
    g.add_argument("--with-slice", action="store_true", help="attach random slice forms")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run the verification pipeline")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--checks", default=None, help="default, all, degenerate or a comma list")
    v.add_argument("--certificate", help="verify this stored certificate instead of building one")
    v.add_argument("--out")
    v.add_argument("--scan-q", type=int, default=10007)
    v.add_argument("--scan-samples", type=int, default=1000)
    v.add_argument("--scan-seed", type=int, default=0)
    v.add_argument("--timings", action="store_true", help="record stage timings (output no longer reproducible)")
    v.add_argument("--quiet", action="store_true")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("emit", help="print equations and certificates")
    e.add_argument("--in", dest="input")
    e.add_argument("--format", default="text")
    e.add_argument("--worked-example", action="store_true",
                   help="the illustrative instance with symbolic alpha, beta")
    e.add_argument("--out")
    e.set_defaults(func=cmd_emit)

    s = sub.add_parser("scan", help="sample points over F_q and look for Jacobian rank drops")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--q", type=int, default=10007)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--target", choices=("wprime", "tprime"), default="wprime")
    s.add_argument("--out")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
