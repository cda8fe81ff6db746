import numpy as np
import pytest

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)


def random_unit_det(rng, n):
    """Random matrix with determinant exactly rescaled to one."""
    while True:
        g = rng.standard_normal((n, n))
        d = np.linalg.det(g)
        if abs(d) > 1e-3:
            break
    if d < 0:
        g[:, [0, 1]] = g[:, [1, 0]]
        d = -d
    return g / d ** (1.0 / n)


def random_functional_coeffs(rng, n):
    return rng.uniform(-2.0, 2.0, n)
