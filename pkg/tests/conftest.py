from __future__ import annotations

import random

import pytest

from symdetfano.extension import build_certificate, random_instance

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    """Store the one-line verdict printed at the end of the run."""
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


def instances(seed: int, count: int, stratum: str = "generic"):
    rng = random.Random(seed)
    return [random_instance(rng, stratum) for _ in range(count)]


@pytest.fixture(scope="session")
def generic_instances():
    return instances(1, 12)


@pytest.fixture(scope="session")
def generic_pairs(generic_instances):
    return [(i, build_certificate(i)) for i in generic_instances]


@pytest.fixture(scope="session")
def delta1_instances():
    return instances(2, 6, "delta1_zero")
