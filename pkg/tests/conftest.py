import pytest

from yflift.cli import Instance, InstanceConfig


@pytest.fixture(scope="session")
def worked():
    """The instance (N-, N1, N2, k) = (11, 11, 33, (0, 0))."""
    return Instance(InstanceConfig().validate())


@pytest.fixture(scope="session")
def expansion(worked):
    return worked.expansion(13)
