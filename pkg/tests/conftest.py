import pytest

from statprio.features import parse_feature_diagram
from statprio.fixtures import VENDING_MACHINE
from statprio.models import parse_fts, parse_usage_model


@pytest.fixture(scope="session")
def fd():
    return parse_feature_diagram((VENDING_MACHINE / "fd.json").read_text())


@pytest.fixture(scope="session")
def fts(fd):
    return parse_fts((VENDING_MACHINE / "fts.json").read_text(), fd)


@pytest.fixture(scope="session")
def um():
    return parse_usage_model((VENDING_MACHINE / "um.json").read_text())


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
