import pytest

from phonebias.resources import ResourceSet


@pytest.fixture(scope="session")
def res() -> ResourceSet:
    return ResourceSet.load()
