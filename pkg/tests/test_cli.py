from __future__ import annotations

import json
import pathlib
import subprocess
import sys

import pytest

from symdetfano.assembly import EXAMPLE_RING
from symdetfano.cli import generate, main
from symdetfano.pipeline import (
    DEFAULT_CHECKS,
    EXIT_DEGENERATE,
    EXIT_KERNEL,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_REPLAY,
    parse_checks,
    verify_instance,
)
from symdetfano.serialize import InstanceFile

GOLDEN = pathlib.Path(__file__).parent / "golden"


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def instance_file(tmp_path, capsys):
    path = tmp_path / "inst.json"
    assert main(["gen", "--seed", "11", "--with-slice", "--out", str(path)]) == EXIT_OK
    return path


# -- gen -------------------------------------------------------------------------------

def test_gen_is_deterministic(capsys):
    _, a = run(capsys, "gen", "--seed", "5", "--count", "3")
    _, b = run(capsys, "gen", "--seed", "5", "--count", "3")
    _, c = run(capsys, "gen", "--seed", "6", "--count", "3")
    assert a == b != c
    assert len(json.loads(a)["instances"]) == 3


def test_gen_strata():
    assert all(f.instance.is_generic for f in generate(1, 5, "generic"))
    assert all(f.instance.in_delta1_stratum for f in generate(1, 5, "delta1_zero"))


# -- verify ---------------------------------------------------------------------------

def test_verify_passes_and_records_the_tally(instance_file, capsys):
    code, out = run(capsys, "verify", "--in", str(instance_file), "--quiet")
    rep = json.loads(out)
    assert code == EXIT_OK == rep["exit_code"]
    assert rep["parameter_tally"] == 16
    assert [c["name"] for c in rep["checks"]] == list(DEFAULT_CHECKS)
    assert all(c["status"] == "pass" for c in rep["checks"])


def test_verify_output_is_reproducible(instance_file, capsys):
    _, a = run(capsys, "verify", "--in", str(instance_file), "--quiet")
    _, b = run(capsys, "verify", "--in", str(instance_file), "--quiet")
    assert a == b
    _, t = run(capsys, "verify", "--in", str(instance_file), "--quiet", "--timings")
    assert "seconds" in t


def test_verify_unreadable_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"alpha1": "1"}')
    assert main(["verify", "--in", str(bad)]) == EXIT_PARSE
    assert main(["verify", "--in", str(tmp_path / "missing.json")]) == EXIT_PARSE


def test_verify_unknown_check(instance_file, capsys):
    assert main(["verify", "--in", str(instance_file), "--checks", "nonsense"]) == EXIT_PARSE


def test_verify_degenerate_instance(tmp_path, capsys):
    f = InstanceFile(generate(1, 1, "delta1_zero")[0].instance, 1, "generic")
    path = tmp_path / "d.json"
    path.write_text(json.dumps(f.to_json()))
    code, _ = run(capsys, "verify", "--in", str(path), "--quiet")
    assert code == EXIT_DEGENERATE
    code, out = run(capsys, "verify", "--in", str(path), "--checks", "degenerate", "--quiet")
    assert code == EXIT_OK
    assert json.loads(out)["checks"][-1]["name"] == "degenerate"


def test_delta1_stratum_defaults_to_the_degenerate_checks(tmp_path, capsys):
    path = tmp_path / "d.json"
    main(["gen", "--seed", "3", "--stratum", "delta1_zero", "--out", str(path)])
    code, out = run(capsys, "verify", "--in", str(path), "--quiet")
    assert code == EXIT_OK
    assert [c["name"] for c in json.loads(out)["checks"]] == list(parse_checks(None, "delta1_zero"))


def stored_certificate(instance_file, tmp_path, capsys, tamper):
    _, out = run(capsys, "emit", "--in", str(instance_file), "--format", "json")
    data = json.loads(out)
    tamper(data["certificate"]["equations"]["z1sq"])
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(data))
    return path


def test_tampered_equation_fails_the_kernel_stage(instance_file, tmp_path, capsys):
    def tamper(e):
        e["equation"] = e["equation"] + " + a^6"
    cert = stored_certificate(instance_file, tmp_path, capsys, tamper)
    assert main(["verify", "--in", str(instance_file), "--certificate", str(cert), "--quiet"]) == EXIT_KERNEL


def test_tampered_witness_fails_the_replay_stage(instance_file, tmp_path, capsys):
    def tamper(e):
        e["witness"][0] = e["witness"][0] + " + a^4"
    cert = stored_certificate(instance_file, tmp_path, capsys, tamper)
    assert main(["verify", "--in", str(instance_file), "--certificate", str(cert), "--quiet"]) == EXIT_REPLAY


def test_untampered_certificate_passes(instance_file, tmp_path, capsys):
    cert = stored_certificate(instance_file, tmp_path, capsys, lambda e: None)
    assert main(["verify", "--in", str(instance_file), "--certificate", str(cert), "--quiet"]) == EXIT_OK


def test_failed_stage_blocks_later_stages():
    f = InstanceFile(generate(2, 1, "delta1_zero")[0].instance)
    rep = verify_instance(f, DEFAULT_CHECKS)
    assert rep.status("deltas") == "fail"
    assert all(s.status == "skipped" for s in rep.stages[1:])


# -- emit ------------------------------------------------------------------------------

@pytest.mark.parametrize("fmt", ["text", "json", "cas"])
def test_emit_is_stable(instance_file, capsys, fmt):
    code, a = run(capsys, "emit", "--in", str(instance_file), "--format", fmt)
    _, b = run(capsys, "emit", "--in", str(instance_file), "--format", fmt)
    assert code == EXIT_OK and a == b and a


def test_emit_rejects_unknown_formats(instance_file, capsys):
    assert main(["emit", "--in", str(instance_file), "--format", "latex"]) == EXIT_PARSE
    assert main(["emit", "--format", "text"]) == EXIT_PARSE


@pytest.mark.parametrize("fmt, name", [("text", "worked_example.txt"), ("cas", "worked_example.m2")])
def test_worked_example_matches_the_golden_files(capsys, fmt, name):
    _, out = run(capsys, "emit", "--worked-example", "--format", fmt)
    assert out == (GOLDEN / name).read_text()


def test_golden_tprime_is_the_displayed_pair():
    lines = (GOLDEN / "worked_example.txt").read_text().splitlines()
    got = [EXAMPLE_RING.parse(l.split(" = ", 1)[1]) for l in lines if l.startswith("tprime[")]
    displayed = [
        "z1^2 - (y1*(y1 + al1*y2 + al2*y3)^2 - (y2 + 2*y3)*(y1*y3 - y2^2))",
        "z2^2 - (y3*(be1*y1 + be2*y2 + y3)^2 - y1*(y1*y3 - y2^2))",
    ]
    assert got == [EXAMPLE_RING.parse(t) for t in displayed]
    assert "z_i^2 = -1 * cofactor(i, i)" in lines[-1]


# -- scan --------------------------------------------------------------------------------

def test_scan_of_tprime(instance_file, capsys):
    argv = ["scan", "--in", str(instance_file), "--q", "101", "--samples", "200", "--target", "tprime", "--quiet"]
    code, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert code == EXIT_OK and a == b
    rep = json.loads(a)
    assert rep["drops"] == [] and rep["target"] == "tprime"


def test_scan_bad_prime(instance_file, capsys):
    assert main(["scan", "--in", str(instance_file), "--q", "100", "--quiet"]) != EXIT_OK


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "symdetfano", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("symdetfano ")
