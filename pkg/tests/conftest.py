import numpy as np
import pytest

from dcs.numerics import RngStream


@pytest.fixture
def rng():
    return RngStream(12345)


def central_difference(fn, x, step=1e-5):
    """Gradient of scalar fn at x by central finite differences."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp.flat[i] += step
        xm.flat[i] -= step
        grad.flat[i] = (fn(xp) - fn(xm)) / (2 * step)
    return grad


def relative_error(a, b, floor=1e-8):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / scale))
