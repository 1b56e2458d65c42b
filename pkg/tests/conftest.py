from pathlib import Path

import numpy as np
import pytest

from rpdiffusion.io import load_points

FIXTURES = Path(__file__).parent / "fixtures"
FIXTURE_NAMES = ["rp2_three_point", "rp2_five_point", "rp3_six_point"]

_acceptance: dict = {}


def record(number: int, title: str, passed: bool, detail: str = ""):
    """Remember an acceptance outcome; printed in the terminal summary."""
    _acceptance[number] = (title, bool(passed), detail)


@pytest.fixture
def acceptance():
    return record


@pytest.fixture(scope="session")
def fixture_laws():
    return {name: load_points(FIXTURES / f"{name}.csv") for name in FIXTURE_NAMES}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_acceptance):
        title, ok, detail = _acceptance[n]
        tr.write_line(f"[{n:2d}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else ""))
