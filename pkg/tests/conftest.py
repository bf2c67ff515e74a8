import os
import sys

import pytest

# Add the src directory to the path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from corrtail.schemas.schema import Edge, Graph
from corrtail.services.corpus import FIXTURES


@pytest.fixture
def e1() -> Graph:
    return FIXTURES["E1"]


@pytest.fixture
def e2() -> Graph:
    return FIXTURES["E2"]


@pytest.fixture
def e3() -> Graph:
    return FIXTURES["E3"]


@pytest.fixture
def c5() -> Graph:
    return FIXTURES["C5"]


@pytest.fixture
def z() -> Graph:
    return FIXTURES["z"]


@pytest.fixture
def e2_plus_z() -> Graph:
    """E2 with an isolated vertex z beside it."""
    return Graph(vertices=("v", "w", "z"), edges=(Edge(id="e", src="v", rng="w"),))


@pytest.fixture
def edgeless_pair() -> Graph:
    return Graph(vertices=("x", "y"))
