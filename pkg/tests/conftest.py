import pytest

from radixasym import fixtures as fx
from radixasym.asym import build_expansion
from radixasym.fourier import FourierEngine


@pytest.fixture(scope="session")
def dicho():
    return fx.load_fixture("dichopile")


@pytest.fixture(scope="session")
def dicho_exp(dicho):
    return build_expansion(dicho, depth=14)


@pytest.fixture(scope="session")
def dicho_phi(dicho_exp):
    return next(t for t in dicho_exp.terms if t.constant is None)


@pytest.fixture(scope="session")
def dicho_engine(dicho_exp):
    return FourierEngine(dicho_exp)


@pytest.fixture(scope="session")
def rs4_exp():
    return build_expansion(fx.load_fixture("rudin_shapiro4"), depth=8)
