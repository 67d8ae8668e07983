import math

import numpy as np
import pytest

from frgeom.manifold import Grid, ScalarField, SpherePoint, orthonormal_direction
from frgeom.transforms import PolarPoint

FOUR_EXAMPLES = ("reciprocal", "fisher_rao", "extended", "reciprocal_sq")


def random_grid(rng, n=8):
    return Grid.normalized(rng.uniform(0.2, 1.0, n))


def random_sphere_point(rng, grid):
    return SpherePoint.normalize(ScalarField(rng.uniform(0.2, 1.5, grid.n_points), grid))


def rotate(phi0: SpherePoint, theta: float, direction=None) -> SpherePoint:
    """Point at sphere distance ``theta`` from ``phi0`` along ``direction``."""
    u = orthonormal_direction(phi0) if direction is None else direction
    return SpherePoint.normalize(phi0.field * math.cos(theta) + u * math.sin(theta))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grid8(rng):
    return random_grid(rng, 8)


@pytest.fixture
def p_unit(grid8, rng):
    return PolarPoint(1.0, random_sphere_point(rng, grid8))


# -- acceptance reporting ------------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and report.passed:
        return
    n, title = marker.args
    status = "PASS" if report.passed else "FAIL"
    previous = _ACCEPTANCE.get(n, (title, "PASS"))[1]
    _ACCEPTANCE[n] = (title, "FAIL" if "FAIL" in (previous, status) else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {status}  {title}")
