"""Hot loops: lower-triangular Toeplitz application along the first axis.

Every 1-D operator in :mod:`fracvec.frac1d` reduces to

    out[n, l] = sum_{k <= n} c[n - k] * v[k, l]

applied to a batch of grid lines ``v`` of shape ``(m, L)``. Two backends
implement it:

* ``numpy``: a cached dense lower-triangular matrix and one BLAS matmul for
  lines of up to :data:`DENSE_MAX` nodes, FFT convolution beyond that.
* ``numba``: an ``@njit`` loop that needs no O(m^2) matrix.

The numpy backend is the default: BLAS and FFT beat the compiled loop at
every size in ``benchmarks/bench_kernels.py``. Select numba per call with
``backend="numba"`` or globally with ``FRACVEC_BACKEND=numba``; set
``FRACVEC_DISABLE_NUMBA=1`` before import to make numba unavailable.
"""

from __future__ import annotations

import logging
import os
import threading

import numpy as np

logger = logging.getLogger(__name__)

_DISABLE = os.environ.get("FRACVEC_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    if _DISABLE:
        raise ImportError("disabled by FRACVEC_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError as exc:  # pragma: no cover - depends on environment
    logger.debug("numba unavailable, using numpy kernels: %s", exc)
    HAS_NUMBA = False


#: longest line for which the dense matrix is formed (32 MiB of float64)
DENSE_MAX = 2048


def toeplitz_apply_numpy(c: np.ndarray, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if c.size <= DENSE_MAX:
        return _lower_toeplitz(c) @ v
    from scipy.signal import fftconvolve

    shape = (c.size,) + (1,) * (v.ndim - 1)
    return fftconvolve(c.reshape(shape), v, axes=0)[: c.size]


# dense matrices keyed by the identity of the (read-only, cached) weight array
_MATRICES: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_MATRIX_LOCK = threading.Lock()
_MAX_MATRICES = 48


def _lower_toeplitz(c: np.ndarray) -> np.ndarray:
    key = id(c)
    hit = _MATRICES.get(key)
    if hit is not None and hit[0] is c:
        return hit[1]

    m = c.size
    idx = np.arange(m)
    diff = idx[:, None] - idx[None, :]
    mat = np.where(diff >= 0, c[np.clip(diff, 0, None)], 0.0)
    mat.setflags(write=False)

    if not c.flags.writeable:
        # only immutable weights may be cached by identity
        with _MATRIX_LOCK:
            if len(_MATRICES) >= _MAX_MATRICES:
                _MATRICES.pop(next(iter(_MATRICES)))
            _MATRICES[key] = (c, mat)
    return mat


if HAS_NUMBA:

    @njit(cache=True)
    def _toeplitz_apply_jit(c, v, out):  # pragma: no cover - compiled
        m, nl = v.shape
        for n in range(m):
            for k in range(n + 1):
                w = c[n - k]
                for j in range(nl):
                    out[n, j] += w * v[k, j]
        return out

    def toeplitz_apply_numba(c: np.ndarray, v: np.ndarray) -> np.ndarray:
        v = np.ascontiguousarray(v, dtype=np.float64)
        out = np.zeros_like(v)
        return _toeplitz_apply_jit(np.ascontiguousarray(c, dtype=np.float64), v, out)

else:
    toeplitz_apply_numba = None


BACKEND = os.environ.get("FRACVEC_BACKEND", "").strip().lower() or "numpy"
if BACKEND == "numba" and not HAS_NUMBA:
    logger.warning("FRACVEC_BACKEND=numba but numba is unavailable; using numpy")
    BACKEND = "numpy"


def toeplitz_apply(c: np.ndarray, v: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Apply the lower-triangular Toeplitz matrix with first column ``c``.

    ``v`` is 1-D of length ``m`` or 2-D of shape ``(m, L)``.
    """
    v = np.asarray(v, dtype=np.float64)
    squeeze = v.ndim == 1
    if squeeze:
        v = v[:, None]
    if v.shape[0] != c.size:
        raise ValueError(f"weight length {c.size} does not match line length {v.shape[0]}")

    name = backend or BACKEND
    if name == "numba":
        if toeplitz_apply_numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        out = toeplitz_apply_numba(c, v)
    elif name == "numpy":
        out = toeplitz_apply_numpy(c, v)
    else:
        raise ValueError(f"unknown backend: {name!r}")

    return out[:, 0] if squeeze else out
