import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from valuon.ring import parse_ring_spec, r8  # noqa: E402

# Finite rings with at most 16 elements used across the suite.
CORPUS = ["z1", "z2", "z3", "z4", "z5", "z6", "z8", "f4", "f8", "f9", "z2*z2", "z2*z3", "z2*z4", "r8",
          "mat2:z2", "f16"]
COMMUTATIVE = [s for s in CORPUS if s not in ("r8", "mat2:z2")]

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def R8():
    return r8()


def ring(spec):
    return r8() if spec == "r8" else parse_ring_spec(spec)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
