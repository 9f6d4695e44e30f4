import math

import pytest

from disconn import (
    HopfBundle,
    Quaternion,
    TrivialBundle,
    UnitQuaternion,
)

ONE = UnitQuaternion(1.0, 0.0, 0.0, 0.0)
I_POINT = UnitQuaternion(0.0, 1.0, 0.0, 0.0)
J_POINT = UnitQuaternion(0.0, 0.0, 1.0, 0.0)
K_POINT = UnitQuaternion(0.0, 0.0, 0.0, 1.0)
#: horizontal partner of the identity over the base point k
HALF_J = UnitQuaternion(1.0 / math.sqrt(2.0), 0.0, 1.0 / math.sqrt(2.0), 0.0)

I_BASE = Quaternion(0.0, 1.0, 0.0, 0.0)
J_BASE = Quaternion(0.0, 0.0, 1.0, 0.0)
K_BASE = Quaternion(0.0, 0.0, 0.0, 1.0)


@pytest.fixture(scope="session")
def hopf():
    return HopfBundle()


@pytest.fixture(scope="session")
def line_bundle():
    return TrivialBundle(1)


@pytest.fixture(scope="session")
def plane_bundle():
    return TrivialBundle(2)
