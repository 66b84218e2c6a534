import numpy as np
import pytest

from coframe import s3_frame
from coframe.obstruction import QuadratureGrid

NUS = (0.5, 1.0, 2.0)


@pytest.fixture(scope="session")
def spec():
    return s3_frame(1.0)


@pytest.fixture(scope="session", params=NUS, ids=lambda nu: f"nu={nu}")
def any_spec(request):
    return s3_frame(request.param)


@pytest.fixture
def grid(spec):
    return spec.standard_grid()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def interior_points(spec, n, rng, margin=0.05):
    """Random chart points kept ``margin`` (in nu*theta) away from the poles."""
    lp, lt, ls = spec.lengths
    phi = rng.uniform(0, lp, n)
    theta = rng.uniform(margin / spec.nu, lt - margin / spec.nu, n)
    psi = rng.uniform(0, ls, n)
    return spec.points(phi, theta, psi)


@pytest.fixture(scope="session")
def gl32():
    cache = {}

    def get(spec, n=32):
        key = (spec.nu, n)
        if key not in cache:
            cache[key] = QuadratureGrid.gauss_legendre(spec, n)
        return cache[key]
    return get


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda x: int(x.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
