import math

import numpy as np
import pytest

from precoder.exceptions import NoConvergence
from precoder.solvers.blahut_arimoto import blahut_arimoto


def binary_entropy(p: float) -> float:
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def test_binary_symmetric_channel():
    W = np.array([[0.9, 0.1], [0.1, 0.9]])
    result = blahut_arimoto(W, tol=1e-9)
    assert result.rate_bits == pytest.approx(1.0 - binary_entropy(0.1), abs=1e-8)
    np.testing.assert_allclose(result.p, [0.5, 0.5])


def test_z_channel():
    W = np.array([[1.0, 0.5], [0.0, 0.5]])
    result = blahut_arimoto(W, tol=1e-9)
    assert result.rate_bits == pytest.approx(math.log2(1.25), abs=1e-8)
    assert result.rate_bits <= result.upper_bits
    assert result.p[0] == pytest.approx(0.6, abs=1e-4)


def test_iteration_cap():
    with pytest.raises(NoConvergence) as excinfo:
        blahut_arimoto(np.array([[1.0, 0.5], [0.0, 0.5]]), tol=1e-12, max_iters=1)
    assert excinfo.value.iterations == 1
