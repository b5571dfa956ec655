import pytest
from hypothesis import settings

from finitedr.diffpoly import TruncationContext
from finitedr.fcohft import FamilySpec

settings.register_profile("exact", max_examples=200, deadline=None, derandomize=True)
settings.load_profile("exact")


@pytest.fixture(scope="session")
def spec2():
    return FamilySpec.rank2()


@pytest.fixture(scope="session")
def ctx64():
    return TruncationContext(2, 6, 4)


@pytest.fixture(scope="session")
def ctx1():
    return TruncationContext(1, 6, 4)
