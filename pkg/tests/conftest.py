from __future__ import annotations

import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from dpospine.corpus import d_color, d_dual, k33

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def k33_graph():
    return k33()


@pytest.fixture(scope="session")
def dcolor():
    return d_color()


@pytest.fixture(scope="session")
def ddual():
    return d_dual()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
