import sys
from pathlib import Path

import numpy as np
import pytest

from jetgeo import parse_field

FIXTURES = Path(__file__).parent / "fixtures"


def random_polynomial_text(rng: np.random.Generator, n: int, degree: int = 3,
                           terms: int = 4) -> str:
    """Field text whose components are random polynomials of total degree <= ``degree``."""
    lines = []
    for i in range(1, n + 1):
        parts = []
        for _ in range(terms):
            coef = round(float(rng.uniform(-2, 2)), 3)
            d = int(rng.integers(0, degree + 1))
            idx = rng.integers(1, n + 1, size=d)
            mono = "*".join(f"x{k}" for k in idx)
            parts.append(f"({coef!r})" + (f"*{mono}" if mono else ""))
        lines.append(f"X{i} = " + " + ".join(parts))
    return "\n".join(lines) + "\n"


def random_polynomial_fields(seed: int = 7, count: int = 20):
    rng = np.random.default_rng(seed)
    out = []
    for c in range(count):
        n = (3, 4, 5)[c % 3]
        out.append(parse_field(random_polynomial_text(rng, n)))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
