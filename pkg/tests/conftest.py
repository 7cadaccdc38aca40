import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from rydtriad.coupling import Geometry


def random_geometry(rng, scale=10.0):
    """Three atoms at random non-coincident positions (a0 units, O(scale))."""
    while True:
        pts = rng.normal(scale=scale, size=(3, 3))
        d = [np.linalg.norm(pts[i] - pts[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
        if min(d) > 0.2 * scale:
            return Geometry.from_positions(pts, "a0")


def random_rotation(rng):
    return Rotation.random(random_state=rng).as_matrix()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def line_5um():
    return Geometry.collinear(5.0, "um")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
