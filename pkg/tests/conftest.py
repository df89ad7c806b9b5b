import numpy as np
import pytest

from mixdens import _fast
from mixdens.backend import USE_NUMBA


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Compile the numba kernels once so timed tests never pay for the JIT."""
    if USE_NUMBA:
        y = np.array([0.0, 1.0, 2.0])
        w = np.ones(3)
        A = np.array([[0.5, 0.5], [0.2, 0.8], [0.9, 0.1]])
        _fast.em_loop(A, w, np.array([0.5, 0.5]), 1e-6, 5)
        _fast.mix_objective(y, w, np.zeros(2), np.zeros(2), np.zeros(3),
                            np.zeros(2), np.zeros(2))
        _fast.logf_mean_draws(y, np.zeros((2, 2)), np.zeros((2, 2)))
        _fast.kde_gauss(y, y, w / 3.0, 1.0)
    yield
