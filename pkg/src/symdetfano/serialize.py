"""JSON formats for instances, certificates and reports.

Rationals are written as ``"p/q"`` strings (or ``"p"`` for integers) and
polynomials in the canonical text format of :meth:`Poly.to_text`, next to
the ring they live in, so every file can be re-read without loss.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from gmpy2 import mpq

from .errors import ParseError
from .extension import RING_R, RING_S, Instance, KernelCertificate, KernelEquation
from .poly import Poly, Ring

SCHEMA_VERSION = 1


def rational_to_str(x) -> str:
    return str(mpq(x))


def rational_from_str(s) -> mpq:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise ParseError(f"expected a 'p/q' string, got {s!r}")
    try:
        num, _, den = str(s).strip().partition("/")
        if den and int(den) == 0:
            raise ParseError(f"zero denominator in {s!r}")
        return mpq(int(num), int(den) if den else 1)
    except ValueError as exc:
        raise ParseError(f"not a rational: {s!r}") from exc


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def digest(obj: Any) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(text.encode()).hexdigest()


def poly_to_json(p: Poly) -> dict:
    return {"ring": p.ring.to_json(), "text": p.to_text()}


def poly_from_json(data: Mapping) -> Poly:
    try:
        ring = Ring.from_json(data["ring"])
        return ring.parse(data["text"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad polynomial record: {exc}") from exc


# -- instances -------------------------------------------------------------------------

@dataclass
class SliceData:
    """Three weight-1 forms and a weight-2 form, as text over the W′ ring."""
    h: list[str]
    q2: str

    def forms(self, ring: Ring = RING_S) -> tuple[list[Poly], Poly]:
        return [ring.parse(t) for t in self.h], ring.parse(self.q2)


@dataclass
class InstanceFile:
    instance: Instance
    seed: int | None = None
    stratum: str = "generic"
    slice: SliceData | None = None
    schema: int = SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        inst = self.instance
        d = {
            "schema": self.schema,
            "seed": self.seed,
            "stratum": self.stratum,
            "alpha1": rational_to_str(inst.alpha1),
            "alpha2": rational_to_str(inst.alpha2),
            "beta1": rational_to_str(inst.beta1),
            "beta2": rational_to_str(inst.beta2),
            "l1": [rational_to_str(c) for c in inst.l1],
            "l3": [rational_to_str(c) for c in inst.l3],
        }
        if self.slice is not None:
            d["slice"] = {"h": list(self.slice.h), "q2": self.slice.q2}
        return d

    @classmethod
    def from_json(cls, data: Mapping) -> "InstanceFile":
        if not isinstance(data, Mapping):
            raise ParseError("instance file must be a JSON object")
        schema = data.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ParseError(f"unsupported schema version {schema!r}")
        try:
            a1, a2, b1, b2 = (rational_from_str(data[k]) for k in ("alpha1", "alpha2", "beta1", "beta2"))
            l1 = _triple(data["l1"])
            l3 = _triple(data["l3"])
        except KeyError as exc:
            raise ParseError(f"missing field {exc}") from exc
        sl = None
        if data.get("slice") is not None:
            s = data["slice"]
            try:
                sl = SliceData([str(t) for t in s["h"]], str(s["q2"]))
                hs, _ = sl.forms()
            except (KeyError, TypeError) as exc:
                raise ParseError(f"bad slice data: {exc}") from exc
            if len(hs) != 3:
                raise ParseError("slice needs exactly three weight-1 forms")
        seed = data.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise ParseError("seed must be an integer")
        return cls(Instance(a1, a2, b1, b2, l1, l3), seed, str(data.get("stratum", "generic")), sl, schema)


def _triple(x) -> tuple[mpq, mpq, mpq]:
    if not isinstance(x, Sequence) or isinstance(x, str) or len(x) != 3:
        raise ParseError(f"expected three coefficients, got {x!r}")
    return tuple(rational_from_str(c) for c in x)


def load_instance(path: str) -> InstanceFile:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return InstanceFile.from_json(data)


def save_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


# -- certificates ---------------------------------------------------------------------

def certificate_to_json(cert: KernelCertificate) -> dict:
    eqs = {}
    for name, k in cert.equations.items():
        eqs[name] = {
            "equation": k.equation.to_text(),
            "head": k.head.to_text(),
            "target": [t.to_text() for t in k.target],
            "witness": [w.to_text() for w in k.witness],
            "sign": k.sign,
            "route": k.route,
        }
    return {
        "schema": SCHEMA_VERSION,
        "instance": InstanceFile(cert.instance).to_json(),
        "equation_ring": RING_S.to_json(),
        "module_ring": RING_R.to_json(),
        "equations": eqs,
    }


def certificate_from_json(data: Mapping) -> KernelCertificate:
    try:
        inst = InstanceFile.from_json(data["instance"]).instance
        S = Ring.from_json(data["equation_ring"])
        R = Ring.from_json(data["module_ring"])
        eqs = {}
        for name, e in data["equations"].items():
            eqs[name] = KernelEquation(
                name,
                S.parse(e["equation"]),
                S.parse(e["head"]),
                tuple(R.parse(t) for t in e["target"]),
                tuple(R.parse(w) for w in e["witness"]),
                int(e["sign"]),
                str(e.get("route", "explicit")),
            )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad certificate: {exc}") from exc
    if S != RING_S or R != RING_R:
        raise ParseError("certificate rings do not match the model rings")
    return KernelCertificate(inst, eqs)


def certificate_digest(cert: KernelCertificate) -> str:
    return digest(certificate_to_json(cert))
