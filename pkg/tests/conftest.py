import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))  # oracle_traces


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_points(rng, k, lo=-2.0, hi=3.0, margin=0.05):
    """(mu, theta) with log-uniform mu and theta away from the poles."""
    return [(10 ** rng.uniform(lo, hi), rng.uniform(margin, math.pi - margin)) for _ in range(k)]


ACCEPTANCE_LINES = []


def record(number, title, ok, detail):
    """Log one acceptance line; shown again in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
