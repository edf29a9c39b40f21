import cmath
import math

import pytest

from artifact.solver import solve
from artifact.triangulation import FIXTURES, gluing_system, load_fixture

FIG8_SHAPE = complex(0.5, math.sqrt(3) / 2)
FIG8_VOLUME = 2.0298832128193072
WHITEHEAD_VOLUME = 3.66386237670887
BORROMEAN_VOLUME = 7.32772475341775


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in FIXTURES}


@pytest.fixture(scope="session")
def solved(fixtures):
    out = {}
    for name, tri in fixtures.items():
        sys_ = gluing_system(tri)
        out[name] = (tri, sys_, solve(sys_))
    return out
