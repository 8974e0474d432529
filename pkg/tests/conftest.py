import numpy as np
import pytest

from gaussianlink.core import GaussianState, omega


@pytest.fixture
def rng():
    return np.random.default_rng(20230405)


def random_valid_two_mode(rng, margin=1.02):
    """Random valid two-mode covariance with min symplectic eigenvalue margin."""
    m = rng.normal(size=(4, 4))
    cov = m @ m.T + 0.3 * np.eye(4)
    nu = np.linalg.eigvals(1j * omega(2) @ cov).real
    scale = margin / min(abs(nu[nu > 0]))
    return GaussianState(2, np.zeros(4), cov * max(scale, 1.0))
