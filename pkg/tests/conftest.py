import pytest

from defzeta.connection import gauss_manin
from defzeta.family import FibreSpec, validate_family

from helpers import K3_TERMS, QUINTIC_TERMS


@pytest.fixture(scope="session")
def quintic_family():
    return validate_family(2, 5, 7, QUINTIC_TERMS)


@pytest.fixture(scope="session")
def quintic_family_p11():
    return validate_family(2, 5, 11, QUINTIC_TERMS)


@pytest.fixture(scope="session")
def k3_family():
    return validate_family(3, 4, 3, K3_TERMS)


@pytest.fixture(scope="session")
def quintic_connection(quintic_family):
    return gauss_manin(quintic_family)


@pytest.fixture(scope="session")
def k3_connection(k3_family):
    return gauss_manin(k3_family)


def fibre(tau, a=1, modulus=None):
    if isinstance(tau, int):
        tau = [tau]
    return FibreSpec(ext_degree=a, tau=tau, modulus=modulus)
