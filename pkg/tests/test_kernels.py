import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.sparse import csr_matrix

from planarends import _pykernels, kernels
from planarends.configspace import Configuration

BACKENDS = kernels.available_backends()


def _random(rng, sizes):
    cfg = Configuration.from_points(
        [rng.normal(size=n) + 1j * rng.normal(size=n) for n in sizes])
    return cfg.flat()


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_backend_matches_numpy_twin(name, rng):
    mod = BACKENDS[name]
    for sizes in [(1, 1), (1, 2, 1), (2, 3, 2, 1), (1, 3, 3, 1)]:
        pts, ptr = _random(rng, sizes)
        F, G = mod.force_sums(pts, ptr)
        F0, G0 = _pykernels.force_sums(pts, ptr)
        np.testing.assert_allclose(F, F0, rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(G, G0, rtol=1e-13, atol=1e-14)
        n = len(pts)
        np.testing.assert_allclose(_dense(mod.force_jacobian(pts, ptr), n),
                                   _dense(_pykernels.force_jacobian(pts, ptr), n),
                                   rtol=1e-12, atol=1e-13)
        m = len(ptr) - 1
        np.testing.assert_allclose(_dense(mod.gvalue_jacobian(pts, ptr), n, m),
                                   _dense(_pykernels.gvalue_jacobian(pts, ptr), n, m),
                                   rtol=1e-12, atol=1e-13)
        assert mod.min_separation(pts, ptr) == pytest.approx(
            _pykernels.min_separation(pts, ptr), rel=1e-14)
    x = rng.normal(size=50) + 1j * rng.normal(size=50)
    c = np.array([0.3 + 0.1j, -1.0 + 0.5j])
    w = np.array([0.5, -1.0])
    np.testing.assert_allclose(mod.log_potential(x, c, w), _pykernels.log_potential(x, c, w),
                               rtol=1e-13, atol=1e-14)


def _dense(csr, ncols, nrows=None):
    indptr, indices, data = csr
    nrows = ncols if nrows is None else nrows
    return csr_matrix((data, indices, indptr), shape=(nrows, ncols)).toarray()


def test_numpy_jacobian_is_finite_on_wide_levels(rng):
    pts, ptr = _random(rng, (1, 3, 2, 1))
    assert np.all(np.isfinite(_dense(_pykernels.force_jacobian(pts, ptr), len(pts))))


def test_log_potential_definition(rng):
    x = rng.normal(size=7) + 1j * rng.normal(size=7)
    c = np.array([1j, 2.0])
    w = np.array([0.25, -0.75])
    ref = 0.25 * np.log(np.abs(x - 1j)) - 0.75 * np.log(np.abs(x - 2.0))
    np.testing.assert_allclose(kernels.log_potential(x, c, w), ref, rtol=1e-14)


def test_pure_python_switch():
    env = dict(os.environ, PLANARENDS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from planarends import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_default_backend_is_compiled_when_built():
    if "cython" in BACKENDS and not os.environ.get("PLANARENDS_PURE_PYTHON"):
        assert kernels.BACKEND == "cython"
    else:
        assert kernels.BACKEND == "python"
