"""Low-level kernels: log-domain convolution and exact big-integer convolution.

The log-domain convolution is the one hot floating-point loop in the
package (quadratic in the truncation bound, run once per recursion step).
It ships in two interchangeable implementations:

* a numba ``@njit`` kernel with a strict left-to-right inner summation,
* a pure-numpy fallback using numpy's deterministic pairwise reduction.

Selection is by the ``HANNER_KERNELS`` environment variable ("numba" or
"numpy"); default is numba when importable.  Both paths are deterministic
run-to-run; they may differ from each other by a few ULPs, which the test
tolerances account for.

Exact convolution packs nonnegative big-integer coefficients into one huge
integer (Kronecker substitution) and multiplies once, via gmpy2 when
available.  A schoolbook reference implementation is kept alongside as the
independent oracle.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import gmpy2

    _HAS_GMPY2 = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _HAS_GMPY2 = False

try:
    import numba

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover
    _HAS_NUMBA = False

NEG_INF = float("-inf")


# ---------------------------------------------------------------------------
# log-domain convolution
# ---------------------------------------------------------------------------

def _log_convolve_numpy(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """out[k] = log2 sum_j 2**(f[j] + g[k-j]), by max extraction per entry."""
    n = f.shape[0]
    out = np.empty(n, dtype=np.float64)
    for k in range(n):
        s = f[: k + 1] + g[k::-1]
        m = s.max()
        if m == NEG_INF:
            out[k] = NEG_INF
        else:
            out[k] = m + np.log2(np.exp2(s - m).sum())
    return out


if _HAS_NUMBA:

    @numba.njit(cache=True)
    def _log_convolve_jit(f, g):  # pragma: no cover - exercised via wrapper
        n = f.shape[0]
        out = np.empty(n, dtype=np.float64)
        for k in range(n):
            m = NEG_INF
            for j in range(k + 1):
                s = f[j] + g[k - j]
                if s > m:
                    m = s
            if m == NEG_INF:
                out[k] = NEG_INF
                continue
            acc = 0.0
            for j in range(k + 1):
                s = f[j] + g[k - j]
                if s != NEG_INF:
                    acc += 2.0 ** (s - m)
            out[k] = m + math.log2(acc)
        return out


def _select_impl(name: str | None):
    if name in (None, ""):
        name = "numba" if _HAS_NUMBA else "numpy"
    if name == "numba":
        if not _HAS_NUMBA:
            raise RuntimeError("HANNER_KERNELS=numba requested but numba is not importable")
        return _log_convolve_jit, "numba"
    if name == "numpy":
        return _log_convolve_numpy, "numpy"
    raise RuntimeError(f"unknown HANNER_KERNELS value {name!r} (use 'numba' or 'numpy')")


_log_convolve_impl, ACTIVE_KERNEL = _select_impl(os.environ.get("HANNER_KERNELS"))


def select_kernel(name: str | None) -> str:
    """Re-select the log-convolution path ('numba'/'numpy'/None for default)."""
    global _log_convolve_impl, ACTIVE_KERNEL
    _log_convolve_impl, ACTIVE_KERNEL = _select_impl(name)
    return ACTIVE_KERNEL


def log_convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Truncated log-domain convolution of two equal-length log2-coefficient arrays.

    Raises OverflowError if any output leaves the finite-or--inf range.
    """
    out = _log_convolve_impl(np.ascontiguousarray(f), np.ascontiguousarray(g))
    if np.isposinf(out).any() or np.isnan(out).any():
        raise OverflowError("log-domain convolution left the representable exponent range")
    return out


# ---------------------------------------------------------------------------
# exact big-integer convolution (Kronecker substitution)
# ---------------------------------------------------------------------------

def _mul_bigint(x: int, y: int) -> int:
    if _HAS_GMPY2:
        return int(gmpy2.mpz(x) * gmpy2.mpz(y))
    return x * y


def _pack(coeffs: list[int], slot_bytes: int) -> int:
    buf = bytearray(len(coeffs) * slot_bytes)
    for i, c in enumerate(coeffs):
        buf[i * slot_bytes : i * slot_bytes + (c.bit_length() + 7) // 8] = c.to_bytes(
            (c.bit_length() + 7) // 8, "little"
        )
    return int.from_bytes(buf, "little")


def _unpack(packed: int, slot_bytes: int, count: int) -> list[int]:
    raw = packed.to_bytes(max(1, (packed.bit_length() + 7) // 8), "little")
    raw = raw.ljust(count * slot_bytes, b"\0")
    return [
        int.from_bytes(raw[i * slot_bytes : (i + 1) * slot_bytes], "little")
        for i in range(count)
    ]


def convolve_exact(f: list[int], g: list[int], out_len: int) -> list[int]:
    """First ``out_len`` coefficients of the product of two nonnegative-int polys."""
    n, m = len(f), len(g)
    if n == 0 or m == 0:
        return [0] * out_len
    bits_f = max((c.bit_length() for c in f), default=0)
    bits_g = max((c.bit_length() for c in g), default=0)
    if bits_f == 0 or bits_g == 0:
        return [0] * out_len
    slot_bits = bits_f + bits_g + (min(n, m)).bit_length() + 1
    slot_bytes = (slot_bits + 7) // 8
    prod = _mul_bigint(_pack(f, slot_bytes), _pack(g, slot_bytes))
    return _unpack(prod, slot_bytes, out_len)


def convolve_schoolbook(f: list[int], g: list[int], out_len: int) -> list[int]:
    """Quadratic reference convolution; the oracle for convolve_exact."""
    out = [0] * out_len
    for i, fi in enumerate(f):
        if fi == 0 or i >= out_len:
            continue
        for j, gj in enumerate(g):
            k = i + j
            if k >= out_len:
                break
            out[k] += fi * gj
    return out
