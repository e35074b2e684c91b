import sys
from pathlib import Path

import pytest

from mserhkb import parse_ontology, parse_query

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
sys.path.insert(0, str(HERE))

BIRDS = "http://example.org/birds#"

# acceptance lines collected during the run, echoed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load_ontology(name: str):
    return parse_ontology((FIXTURES / name).read_text())


def load_query(name: str):
    return parse_query((FIXTURES / name).read_text())


@pytest.fixture(scope="session")
def golden_eagle():
    return load_ontology("golden_eagle.qlf")


@pytest.fixture(scope="session")
def eagle_query():
    return load_query("golden_eagle.rq")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
