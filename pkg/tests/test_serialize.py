from __future__ import annotations

import json
import random

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from symdetfano.errors import ParseError
from symdetfano.extension import RING_S, Instance, random_instance
from symdetfano.serialize import (
    InstanceFile,
    SliceData,
    certificate_digest,
    certificate_from_json,
    certificate_to_json,
    digest,
    dumps,
    load_instance,
    poly_from_json,
    poly_to_json,
    rational_from_str,
    rational_to_str,
    save_json,
)

rationals = st.builds(lambda n, d: mpq(n, d), st.integers(-10**6, 10**6), st.integers(1, 10**6))


@given(rationals)
def test_rational_round_trip(x):
    assert rational_from_str(rational_to_str(x)) == x


@pytest.mark.parametrize("bad", ["1/0", "x", "1.5", None, 1.5, True, [1]])
def test_bad_rationals(bad):
    with pytest.raises(ParseError):
        rational_from_str(bad)


def test_poly_round_trip():
    p = RING_S.parse("z1^2 - 1/3*y1*a^4 + 7*z2*b - 2")
    assert poly_from_json(json.loads(dumps(poly_to_json(p)))) == p
    with pytest.raises(ParseError):
        poly_from_json({"text": "z1"})


def test_instance_round_trip(tmp_path):
    inst = random_instance(random.Random(3))
    f = InstanceFile(inst, 3, "generic", SliceData(["a", "b", "c - d"], "y1 + a*b"))
    path = tmp_path / "inst.json"
    save_json(str(path), f.to_json())
    back = load_instance(str(path))
    assert back.instance == inst and back.seed == 3 and back.slice == f.slice
    assert dumps(back.to_json()) == path.read_text()


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("alpha1"),
    lambda d: d.update(l1=["1", "2"]),
    lambda d: d.update(l3="123"),
    lambda d: d.update(schema=99),
    lambda d: d.update(seed="x"),
    lambda d: d.update(beta2="1/0"),
    lambda d: d.update(slice={"h": ["a", "b"], "q2": "y1"}),
    lambda d: d.update(slice={"h": ["a", "b", "c"]}),
])
def test_malformed_instances(mutate):
    d = InstanceFile(Instance(1, 2, 3, 4)).to_json()
    mutate(d)
    with pytest.raises(ParseError):
        InstanceFile.from_json(d)


def test_malformed_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    with pytest.raises(ParseError):
        load_instance(str(path))
    with pytest.raises(ParseError):
        InstanceFile.from_json([1, 2])


def test_certificate_round_trip(generic_pairs):
    _, cert = generic_pairs[0]
    data = json.loads(dumps(certificate_to_json(cert)))
    back = certificate_from_json(data)
    assert back.instance == cert.instance
    for name, k in cert.equations.items():
        b = back.equations[name]
        assert (b.equation, b.head, b.target, b.witness, b.sign, b.route) == \
               (k.equation, k.head, k.target, k.witness, k.sign, k.route)
    assert certificate_digest(back) == certificate_digest(cert)


def test_certificate_digest_changes_with_content(generic_pairs):
    (_, c1), (_, c2) = generic_pairs[:2]
    assert certificate_digest(c1) != certificate_digest(c2)
    assert len(certificate_digest(c1)) == 64


def test_certificate_in_the_wrong_rings_is_rejected(generic_pairs):
    _, cert = generic_pairs[0]
    data = certificate_to_json(cert)
    data["equation_ring"] = {"names": ["x"], "weights": [1]}
    with pytest.raises(ParseError):
        certificate_from_json(data)
    with pytest.raises(ParseError):
        certificate_from_json({"instance": data["instance"]})


def test_digest_ignores_key_order():
    assert digest({"a": 1, "b": [1, 2]}) == digest({"b": [1, 2], "a": 1})
