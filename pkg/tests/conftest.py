import numpy as np
import pytest

from modinv import linalg


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # trigger numba JIT/cache load once so tests measure computation, not compilation
    linalg.rank(np.array([[1, 2], [2, 1]], dtype=np.int64), 3)
