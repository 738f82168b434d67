import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mscr.code import CodeParams, build_code  # noqa: E402
from mscr.field import FieldSpec  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def gf7():
    return FieldSpec.prime(7, 3)


@pytest.fixture(scope="session")
def gf256():
    return FieldSpec.default()


@pytest.fixture(scope="session")
def code7(gf7):
    """n=5, d=3 over GF(7) with omega=3."""
    return build_code(CodeParams(5, 3), gf7)


@pytest.fixture(scope="session")
def code256(gf256):
    return build_code(CodeParams(5, 3), gf256)


@pytest.fixture
def data7():
    return [1, 2, 3, 4, 5, 6]


def blocks_of(code, data):
    return {b.device: b.symbols for b in code.encode(data)}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
