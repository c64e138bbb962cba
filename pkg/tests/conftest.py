from pathlib import Path

import numpy as np
import pytest

from circula import ModelSpec, WrappedCauchy

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture
def excerpt_path():
    return DATA_DIR / "hourly_excerpt.csv"


def random_model(m, p, rng, max_rho=0.8):
    marginals = [WrappedCauchy(rng.uniform(0, 2 * np.pi), rng.uniform(0, max_rho)) for _ in range(m)]
    cross = {(a, b): rng.uniform(0, max_rho) for a in range(2, m + 1) for b in range(1, a)}
    serial = {(a, b, k): rng.uniform(0, max_rho)
              for k in range(1, p + 1) for a in range(1, m + 1) for b in range(1, m + 1)}
    q = {key: int(rng.choice([-1, 1])) for key in list(cross) + list(serial)}
    return ModelSpec(m, p, marginals, cross=cross, serial=serial, q=q)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LOG = []


def record(number, ok, detail):
    """Log one acceptance line and fail the calling test if ``ok`` is false."""
    line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LOG.append(line)
    print(line)
    assert ok, line


def record_skip(number, detail):
    line = f"[criterion {number}] SKIP: {detail}"
    ACCEPTANCE_LOG.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LOG, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
