import numpy as np
import pytest

import spectral_hull as sh


@pytest.fixture(scope="session")
def shift5():
    sampling, scale = sh.build_shift_sampling(5)
    return sampling, scale, sh.atom_measure(sampling, scale)


@pytest.fixture(scope="session")
def shift17():
    sampling, scale = sh.build_shift_sampling(17)
    return sampling, scale, sh.atom_measure(sampling, scale)


@pytest.fixture(scope="session")
def shift257():
    sampling, scale = sh.build_shift_sampling(257)
    return sampling, scale, sh.atom_measure(sampling, scale)


@pytest.fixture(scope="session")
def diff12():
    sampling, scale = sh.build_diff_sampling(12, 6)
    return sampling, scale, sh.atom_measure(sampling, scale)


@pytest.fixture(scope="session")
def diff24():
    sampling, scale = sh.build_diff_sampling(24, 6)
    return sampling, scale, sh.atom_measure(sampling, scale)


@pytest.fixture(scope="session")
def pvm4():
    from spectral_hull.cli import build_demo_pvm

    sampling, scale = build_demo_pvm(4, 4)
    return sampling, scale, sh.atom_measure(sampling, scale)


def gauss(x):
    return (2.0 / np.pi) ** 0.25 * np.exp(-np.asarray(x, dtype=np.float64) ** 2)


def gauss_prime(x):
    x = np.asarray(x, dtype=np.float64)
    return -2.0 * x * gauss(x)


@pytest.fixture(scope="session")
def reference_gaussian():
    return gauss
