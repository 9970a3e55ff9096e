import math

import numpy as np
import pytest

from symheun import CanonicalParams

ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


def random_circular(rng, n):
    """Canonical sets with phi in (0.2, 1.37), real chi in (0, pi/2), |lam| <= 5."""
    out = []
    for _ in range(n):
        phi = rng.uniform(0.2, 1.37)
        chi = rng.uniform(0.0, math.pi / 2, 4)
        lam = 5.0 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        out.append(CanonicalParams(phi, tuple(chi), complex(lam)))
    return out


@pytest.fixture(scope="session")
def circular_sets():
    return random_circular(np.random.default_rng(20240611), 50)


@pytest.fixture
def canonical():
    return CanonicalParams(0.7, (0.3, 0.9, 1.2, 0.4), 2.0 - 1.0j)
