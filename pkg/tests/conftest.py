import pytest

from ucsk.channel import seawater
from ucsk.colorimetry import spectral_locus


@pytest.fixture(scope="session")
def locus():
    return spectral_locus()


@pytest.fixture(scope="session")
def water():
    return seawater()
