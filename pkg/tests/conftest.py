import pytest

from relaxcycle.cycle import find_limit_cycle, segment_phases
from relaxcycle.reference import CYCLIC, CYCLIC_Y0


@pytest.fixture(scope="session")
def ref_cycle():
    return find_limit_cycle(CYCLIC, CYCLIC_Y0)


@pytest.fixture(scope="session")
def ref_segments(ref_cycle):
    return segment_phases(ref_cycle, 10.0, 16)
