import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes oracles importable

from quadft import Quadrilateral, WeightedQuadrilateral

RECT_COORDS = [(0.0, 0.0), (7.0, 0.0), (7.0, 4.0), (0.0, 4.0)]


@pytest.fixture(scope="session")
def rect():
    return Quadrilateral.from_coords(RECT_COORDS)


@pytest.fixture(scope="session")
def wq_ex2(rect):
    return WeightedQuadrilateral(rect, (3.0, 2.5, 1.7, 1.5))


@pytest.fixture(scope="session")
def wq_ex3(rect):
    return WeightedQuadrilateral(rect, (3.1, 2.3, 1.7, 1.4))
