import numpy as np
import pytest

from hannerfaces import _kernels


def random_log_arrays(rng, n):
    f = rng.uniform(0, 50, n)
    g = rng.uniform(0, 50, n)
    f[rng.integers(0, n, max(1, n // 5))] = -np.inf
    g[rng.integers(0, n, max(1, n // 5))] = -np.inf
    return f, g


@pytest.fixture
def restore_kernel():
    before = _kernels.ACTIVE_KERNEL
    yield
    _kernels.select_kernel(before)


class TestKernelSelection:
    def test_default_is_numba_when_available(self):
        assert _kernels.ACTIVE_KERNEL in ("numba", "numpy")
        if _kernels._HAS_NUMBA:
            assert _kernels._select_impl(None)[1] == "numba"

    def test_explicit_selection(self, restore_kernel):
        assert _kernels.select_kernel("numpy") == "numpy"
        if _kernels._HAS_NUMBA:
            assert _kernels.select_kernel("numba") == "numba"

    def test_unknown_name_rejected(self):
        with pytest.raises(RuntimeError):
            _kernels._select_impl("cuda")


class TestPathAgreement:
    @pytest.mark.skipif(not _kernels._HAS_NUMBA, reason="numba unavailable")
    def test_numba_numpy_within_tolerance(self, restore_kernel):
        rng = np.random.default_rng(7)
        for n in (1, 2, 17, 256, 1024):
            f, g = random_log_arrays(rng, n)
            _kernels.select_kernel("numpy")
            a = _kernels.log_convolve(f, g)
            _kernels.select_kernel("numba")
            b = _kernels.log_convolve(f, g)
            finite = np.isfinite(a)
            assert np.array_equal(finite, np.isfinite(b))
            assert np.allclose(a[finite], b[finite], rtol=0, atol=1e-12)

    def test_each_path_deterministic(self, restore_kernel):
        rng = np.random.default_rng(11)
        f, g = random_log_arrays(rng, 301)
        for name in ("numpy", "numba") if _kernels._HAS_NUMBA else ("numpy",):
            _kernels.select_kernel(name)
            a = _kernels.log_convolve(f, g)
            b = _kernels.log_convolve(f.copy(), g.copy())
            assert np.array_equal(a, b, equal_nan=True)

    def test_neg_inf_blocks(self, restore_kernel):
        f = np.array([-np.inf, 0.0, 1.0])
        g = np.array([-np.inf, -np.inf, 2.0])
        for name in ("numpy", "numba") if _kernels._HAS_NUMBA else ("numpy",):
            _kernels.select_kernel(name)
            out = _kernels.log_convolve(f, g)
            # k=0: (-inf)+(-inf); k=1: 0+(-inf), (-inf)+(-inf); k=2: only f1+g1 = -inf,
            # f0+g2 = -inf, f2+g0 = -inf -> all -inf except none finite here
            assert out[0] == -np.inf and out[1] == -np.inf and out[2] == -np.inf


class TestExactPacking:
    def test_pack_unpack_roundtrip(self):
        coeffs = [0, 1, 2**64 - 1, 12345678901234567890]
        packed = _kernels._pack(coeffs, 16)
        assert _kernels._unpack(packed, 16, 4) == coeffs

    def test_empty_and_zero_polys(self):
        assert _kernels.convolve_exact([], [1, 2], 3) == [0, 0, 0]
        assert _kernels.convolve_exact([0, 0], [1, 2], 3) == [0, 0, 0]

    def test_out_len_longer_than_product(self):
        assert _kernels.convolve_exact([1], [1], 4) == [1, 0, 0, 0]
