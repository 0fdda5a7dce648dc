import pytest

from betaruns import make_beta


@pytest.fixture(scope="session")
def golden():
    return make_beta("golden")


@pytest.fixture(scope="session")
def base2():
    return make_beta("2")


@pytest.fixture(scope="session")
def base95():
    return make_beta("9/5")


@pytest.fixture(scope="session")
def base32():
    return make_beta("3/2")


@pytest.fixture(scope="session")
def tribonacci():
    return make_beta("tribonacci")
