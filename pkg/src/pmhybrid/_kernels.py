"""Hot loops with a numba fast path and a pure-numpy fallback.

The backend is chosen once per process from the PMHYBRID_BACKEND environment
variable: "auto" (numba if importable, else numpy), "numba", or "numpy".
Both implementations perform identical floating-point operations in the same
order, so results are bit-identical across backends.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "PMHYBRID_BACKEND"


def _requested_backend() -> str:
    value = os.environ.get(_ENV_VAR, "auto").lower()
    if value not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be auto|numba|numpy, got {value!r}")
    return value


def _track_row(theta_p, out):
    """Continuity-track one frequency row of principal phases in place.

    At fixed sqrt sign, 2*sin(theta/2) = w admits {theta_p + 4*pi*m} and
    {2*pi - theta_p + 4*pi*m}; the member nearest (complex distance) to the
    previous point wins, ties keeping the first family. The sqrt sign itself
    stays principal per point, so a damping-sign flip reflects theta to
    -theta; that genuine jump marks a negative-index pocket boundary and is
    reported downstream via the jump threshold, never absorbed.
    """
    four_pi = 4.0 * np.pi
    prev = theta_p[0]
    out[0] = prev
    for j in range(1, theta_p.shape[0]):
        a = theta_p[j]
        ma = np.floor((prev.real - a.real) / four_pi + 0.5)
        ca = a + four_pi * ma
        b = 2.0 * np.pi - a
        mb = np.floor((prev.real - b.real) / four_pi + 0.5)
        cb = b + four_pi * mb
        if abs(cb - prev) < abs(ca - prev):
            prev = cb
        else:
            prev = ca
        out[j] = prev


def _track_rows_numpy(theta_p: np.ndarray) -> np.ndarray:
    out = np.empty_like(theta_p)
    for i in range(theta_p.shape[0]):
        _track_row(theta_p[i], out[i])
    return out


def _build_numba_kernel():
    import numba

    @numba.njit(cache=True, parallel=True)
    def track_rows(theta_p):
        out = np.empty_like(theta_p)
        four_pi = 4.0 * np.pi
        for i in numba.prange(theta_p.shape[0]):
            prev = theta_p[i, 0]
            out[i, 0] = prev
            for j in range(1, theta_p.shape[1]):
                a = theta_p[i, j]
                ma = np.floor((prev.real - a.real) / four_pi + 0.5)
                ca = a + four_pi * ma
                b = 2.0 * np.pi - a
                mb = np.floor((prev.real - b.real) / four_pi + 0.5)
                cb = b + four_pi * mb
                if abs(cb - prev) < abs(ca - prev):
                    prev = cb
                else:
                    prev = ca
                out[i, j] = prev
        return out

    return track_rows


_BACKEND_NAME = "numpy"
_TRACK_ROWS = _track_rows_numpy
_requested = _requested_backend()
if _requested in ("auto", "numba"):
    try:
        _TRACK_ROWS = _build_numba_kernel()
        _BACKEND_NAME = "numba"
    except ImportError:
        if _requested == "numba":
            raise
del _requested


def backend_name() -> str:
    """Active kernel backend ("numba" or "numpy")."""
    return _BACKEND_NAME


def track_theta(theta_p: np.ndarray) -> np.ndarray:
    """Continuity-track principal Bloch phases along the last axis.

    ``theta_p`` must be a 2-D complex128 array (rows = field points,
    columns = the frequency sweep).
    """
    arr = np.ascontiguousarray(theta_p, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array of phases, got {arr.ndim}-D")
    if arr.shape[1] == 0:
        return arr.copy()
    return _TRACK_ROWS(arr)


def track_theta_numpy(theta_p: np.ndarray) -> np.ndarray:
    """Pure-numpy tracking, exposed for backend benchmarking."""
    arr = np.ascontiguousarray(theta_p, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array of phases, got {arr.ndim}-D")
    if arr.shape[1] == 0:
        return arr.copy()
    return _track_rows_numpy(arr)
