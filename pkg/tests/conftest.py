import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fractree.model import TreeParams, figure_params

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def fig():
    return figure_params(P=8)


def random_params(rng, P=None, a=None, u=None, v=None, theta_deg=None):
    """Parameters scattered around the figure values, for oracle comparisons."""
    base = figure_params()
    j = lambda: float(2.0 ** rng.uniform(-1, 1))  # noqa: E731
    E = base.E * j()
    A = base.A * j()
    return TreeParams(
        theta=math.radians(theta_deg if theta_deg is not None else rng.uniform(10, 80)),
        E=E, G=E / rng.uniform(2.5, 40), L=base.L * j(), I=base.I * j(),
        A=A, Astar=A * rng.uniform(0.7, 0.95),
        a=a if a is not None else float(rng.uniform(1.01, 15.9)),
        u=u if u is not None else float(rng.uniform(1.01, 3.95)),
        v=v if v is not None else float(rng.uniform(1.01, 3.95)),
        P=P if P is not None else int(rng.integers(1, 11)),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance lines are collected here and repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
