from __future__ import annotations

import functools

import pytest

from earthfixed.array import build_array
from earthfixed.geometry import OrbitGeometry
from earthfixed.layout import build_layout, paper_designs
from earthfixed.link import LinkBudget

WAVELENGTH = 299_792_458.0 / 20e9


@pytest.fixture(scope="session")
def geo():
    return OrbitGeometry()


@pytest.fixture(scope="session")
def arr():
    return build_array(512, 0.65 * WAVELENGTH, WAVELENGTH)


@pytest.fixture(scope="session")
def lb():
    return LinkBudget()


@functools.lru_cache(maxsize=None)
def layout_of(name: str):
    return build_layout(paper_designs()[name])


@pytest.fixture(scope="session")
def layouts():
    return layout_of


def pytest_configure(config):
    config._criterion_lines = []


@pytest.fixture
def criterion(request, capsys):
    """Print one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        request.config._criterion_lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
