"""Shared fixtures and the acceptance-report terminal summary."""

from __future__ import annotations

import pytest

from spinfid import NoiseModel, SpinSystemSpec, TimeGrid

# Rows of (number, title, passed, detail) appended by tests/test_acceptance.py.
ACCEPTANCE_REPORT: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_REPORT:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_REPORT):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number} [{verdict}] {title} — {detail}")


@pytest.fixture
def default_system() -> SpinSystemSpec:
    """The stock three-spin system with its built-in offsets and couplings."""
    return SpinSystemSpec()


@pytest.fixture
def pps_system() -> SpinSystemSpec:
    """Stock system with the positive polarization used for pseudo-pure runs."""
    return SpinSystemSpec(polarization=1.0)


@pytest.fixture
def default_grid() -> TimeGrid:
    return TimeGrid()


@pytest.fixture
def lorentzian_28() -> NoiseModel:
    return NoiseModel("lorentzian", 28.0)


@pytest.fixture
def noiseless() -> NoiseModel:
    return NoiseModel("white", 0.0)
