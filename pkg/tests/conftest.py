import pytest

from bipolar_mimo.config import SystemConfig


@pytest.fixture
def direct_config():
    """alpha = 4, r_d = 50 m, P = -20 dBm, sigma^2 = -104 dBm, n_r = 4."""
    return SystemConfig.fixed(lam=1e-5, n_t=2, n_r=4)
