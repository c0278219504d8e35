import math
from pathlib import Path

import pytest

from poisson_newton.divisor import locate_divisor
from poisson_newton.number_theory import load_zeta_zeros, sieve_primes
from poisson_newton.series import DirichletSeries

DATA = Path(__file__).parent / "data"
ZEROS_PATH = DATA / "zeta_zeros_10000.txt"


@pytest.fixture(scope="session")
def two_frequency():
    return DirichletSeries((1.0, math.sqrt(2)), (0.5, 0.25))


@pytest.fixture(scope="session")
def two_frequency_divisor(two_frequency):
    return locate_divisor(two_frequency, 2000)


@pytest.fixture(scope="session")
def zeta_zeros():
    return load_zeta_zeros(ZEROS_PATH)


@pytest.fixture(scope="session")
def primes_1e6():
    return sieve_primes(10 ** 6)


@pytest.fixture(scope="session")
def selberg_fixture():
    """Genus-2 data made consistent by solving for the one length inside supp phi."""
    from scipy.optimize import brentq

    from poisson_newton.number_theory import selberg_atom_sum, selberg_remainder, selberg_spectral_sum
    from poisson_newton.transforms import TestFunction

    h = 2
    phi = TestFunction("bump", 3.0, 1.0)
    gammas = (1.5, 2.7, 3.9)
    target = selberg_spectral_sum(gammas, phi).value.real - selberg_remainder(h, phi)
    # 5.0 lies beyond the support and only checks that it is ignored
    tau = brentq(lambda x: selberg_atom_sum([x, 5.0], phi) - target, 2.05, 2.9, xtol=1e-15, rtol=1e-15)
    return h, gammas, (tau, 5.0), phi
