"""Shared fixtures and the acceptance summary printer."""

import numpy as np
import pytest

from predlasso import PenaltySpec, TimeSeriesDataset


def make_instance(rng, n=None, p=None, inf_weights=False):
    """One random solver instance: dataset plus a weighted penalty."""
    n = int(n if n is not None else rng.integers(12, 101))
    p = int(p if p is not None else rng.integers(1, 9))
    n = max(n, p + 2)
    W = rng.standard_normal((n, p)) * rng.uniform(0.2, 5.0, size=p)
    beta = rng.standard_normal(p) * rng.uniform(0.0, 2.0)
    y = W @ beta + rng.standard_normal(n) + rng.uniform(-1.0, 1.0)
    data = TimeSeriesDataset(y=y, W=W)
    weights = rng.uniform(0.1, 3.0, size=p)
    if inf_weights and p > 1 and rng.random() < 0.5:
        weights[rng.integers(0, p)] = np.inf
    lam = float(rng.uniform(0.0, 2.0) * n ** 0.5)
    return data, PenaltySpec(family="plasso", lam=lam, weights=weights)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
