import pytest

from oracle import oracle_nodes
from params_core import derive_params

# (n, α, β) 常用参数组
PARAMS_25 = (25, 50, 41)
PARAMS_125 = (125, 90, 75)
PARAMS_100 = (100, 50, 41)
PARAMS_1000 = (1000, 50, 41)


@pytest.fixture(scope="session")
def params_25():
    return derive_params(*PARAMS_25)


@pytest.fixture(scope="session")
def params_125():
    return derive_params(*PARAMS_125)


@pytest.fixture(scope="session")
def medium():
    return derive_params(*PARAMS_100)


@pytest.fixture(scope="session")
def large():
    return derive_params(*PARAMS_1000)


@pytest.fixture(scope="session")
def legendre():
    return derive_params(10, 0, 0)


@pytest.fixture(scope="session")
def oracle_25():
    return oracle_nodes(*PARAMS_25)


@pytest.fixture(scope="session")
def medium_oracle():
    return oracle_nodes(*PARAMS_100)


@pytest.fixture(scope="session")
def large_oracle():
    return oracle_nodes(*PARAMS_1000)
