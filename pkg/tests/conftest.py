import functools

import pytest

from lpbesov import GroupSpec, build_group, build_sublaplacian, word_metric

# (criterion id, PASS/FAIL, detail) appended by test_acceptance.py
ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def model(family, N, dim=1):
    """(group, word metric, sub-Laplacian), cached across tests."""
    g = build_group(GroupSpec(family, N, dim))
    return g, word_metric(g), build_sublaplacian(g)


@pytest.fixture
def torus64():
    return model("torus", 64)


@pytest.fixture
def heis4():
    return model("heisenberg", 4)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, status, detail in sorted(ACCEPTANCE_LINES, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {cid:2d}: {status}  {detail}")
