from pathlib import Path

import pytest
from hypothesis import settings

from pseudorange_rigidity.graphs import load_graph
from pseudorange_rigidity.gnss import load_scenario

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


@pytest.fixture
def graph_fixture():
    return lambda name: load_graph(FIXTURES / name)


@pytest.fixture
def scenario_fixture():
    return lambda name: load_scenario(FIXTURES / name)


def pytest_terminal_summary(terminalreporter):
    from _helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, secs = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f} s)")
