"""Hot numeric kernels: pointwise transmittance and fixed-step RK4.

Each kernel has a numba ``@njit`` loop implementation and a pure-numpy
implementation. The public names (:func:`transmittance_points`,
:func:`rk4_trajectory`) bind to the compiled path unless numba is missing
or ``NONRECIP_JIT=0`` is set in the environment at import time. Both
variants stay importable so they can be checked against each other.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
JIT_ENABLED = HAVE_NUMBA and os.environ.get("NONRECIP_JIT", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def _njit(func):
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


# --------------------------------------------------------------------------
# steady-state transmittance
# --------------------------------------------------------------------------


def _transmittance_numpy(g, omega_c, delta_p, kv, kappa1, kappa2, kappa,
                         gamma3, gamma12, delta_c, a1, a2):
    """Vectorised closed form. Arrays must share one shape; scalars broadcast.

    ``a1``/``a2`` multiply ``kv`` to give the single- and two-photon
    Doppler terms. Returns ``(chi, transmittance)``.
    """
    g = np.asarray(g, dtype=np.float64)
    omega_c = np.asarray(omega_c, dtype=np.float64)
    delta_p = np.asarray(delta_p, dtype=np.float64)
    kv = np.asarray(kv, dtype=np.float64)
    one = delta_p + a1 * kv
    two = delta_p + a2 * kv - delta_c
    inner = gamma12 + 1j * two
    denom = gamma3 + 1j * one + omega_c * omega_c / inner
    chi = -1j * g * g / denom
    cav = 1j * delta_p + 0.5 * kappa + 1j * chi
    trans = kappa1 * kappa2 / (cav.real * cav.real + cav.imag * cav.imag)
    return chi, trans


def _transmittance_loop(g, omega_c, delta_p, kv, kappa1, kappa2, kappa,
                        gamma3, gamma12, delta_c, a1, a2):
    n = g.shape[0]
    chi = np.empty(n, dtype=np.complex128)
    trans = np.empty(n, dtype=np.float64)
    num = kappa1 * kappa2
    for i in range(n):
        one = delta_p[i] + a1 * kv[i]
        two = delta_p[i] + a2 * kv[i] - delta_c
        denom = complex(gamma3, one) + omega_c[i] * omega_c[i] / complex(gamma12, two)
        c = -1j * g[i] * g[i] / denom
        re = 0.5 * kappa - c.imag
        im = delta_p[i] + c.real
        chi[i] = c
        trans[i] = num / (re * re + im * im)
    return chi, trans


_transmittance_jit = _njit(_transmittance_loop)


def transmittance_points(g, omega_c, delta_p, kv, kappa1, kappa2, kappa,
                         gamma3, gamma12, delta_c, a1, a2):
    """Susceptibility and transmittance at a list of parameter points.

    ``g``, ``omega_c``, ``delta_p``, ``kv`` are broadcast to a common 1-D
    shape; the remaining arguments are scalars.
    """
    arrays = np.broadcast_arrays(
        np.atleast_1d(np.asarray(g, dtype=np.float64)),
        np.atleast_1d(np.asarray(omega_c, dtype=np.float64)),
        np.atleast_1d(np.asarray(delta_p, dtype=np.float64)),
        np.atleast_1d(np.asarray(kv, dtype=np.float64)),
    )
    shape = arrays[0].shape
    flat = [np.ascontiguousarray(a).ravel() for a in arrays]
    scalars = (float(kappa1), float(kappa2), float(kappa), float(gamma3),
               float(gamma12), float(delta_c), float(a1), float(a2))
    if JIT_ENABLED:
        chi, trans = _transmittance_jit(*flat, *scalars)
    else:
        chi, trans = _transmittance_numpy(*flat, *scalars)
    return chi.reshape(shape), trans.reshape(shape)


# --------------------------------------------------------------------------
# fixed-step classical RK4 for y' = A y + b
# --------------------------------------------------------------------------


def _rk4_numpy(drift, drive, y0, dt, n_steps, stride):
    n_out = n_steps // stride + 1
    out = np.empty((n_out, y0.shape[0]), dtype=np.complex128)
    y = y0.astype(np.complex128).copy()
    out[0] = y
    half = 0.5 * dt
    j = 1
    for step in range(1, n_steps + 1):
        k1 = drift @ y + drive
        k2 = drift @ (y + half * k1) + drive
        k3 = drift @ (y + half * k2) + drive
        k4 = drift @ (y + dt * k3) + drive
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            return out[:j], step
        if step % stride == 0:
            out[j] = y
            j += 1
    return out[:j], -1


def _matvec_affine(a, y, b, out):
    n = y.shape[0]
    for r in range(n):
        acc = b[r]
        for c in range(n):
            acc += a[r, c] * y[c]
        out[r] = acc


def _rk4_loop(drift, drive, y0, dt, n_steps, stride):
    n = y0.shape[0]
    n_out = n_steps // stride + 1
    out = np.empty((n_out, n), dtype=np.complex128)
    y = y0.copy()
    tmp = np.empty(n, dtype=np.complex128)
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    out[0, :] = y
    half = 0.5 * dt
    sixth = dt / 6.0
    j = 1
    for step in range(1, n_steps + 1):
        _matvec_affine_impl(drift, y, drive, k1)
        for r in range(n):
            tmp[r] = y[r] + half * k1[r]
        _matvec_affine_impl(drift, tmp, drive, k2)
        for r in range(n):
            tmp[r] = y[r] + half * k2[r]
        _matvec_affine_impl(drift, tmp, drive, k3)
        for r in range(n):
            tmp[r] = y[r] + dt * k3[r]
        _matvec_affine_impl(drift, tmp, drive, k4)
        finite = True
        for r in range(n):
            y[r] += sixth * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])
            if not (np.isfinite(y[r].real) and np.isfinite(y[r].imag)):
                finite = False
        if not finite:
            return out[:j], step
        if step % stride == 0:
            out[j, :] = y
            j += 1
    return out[:j], -1


if HAVE_NUMBA:
    _matvec_affine_impl = numba.njit(cache=True, nogil=True, inline="always")(_matvec_affine)
    _rk4_jit = numba.njit(cache=True, nogil=True)(_rk4_loop)
else:  # pragma: no cover
    _matvec_affine_impl = _matvec_affine
    _rk4_jit = _rk4_loop


def rk4_trajectory(drift, drive, y0, dt, n_steps, stride=1):
    """Integrate ``y' = drift @ y + drive`` with ``n_steps`` RK4 steps.

    Returns ``(samples, bad_step)``; ``samples`` holds the state every
    ``stride`` steps starting with ``y0``. ``bad_step`` is the first step
    producing a non-finite state, or -1.
    """
    drift = np.ascontiguousarray(drift, dtype=np.complex128)
    drive = np.ascontiguousarray(drive, dtype=np.complex128)
    y0 = np.ascontiguousarray(y0, dtype=np.complex128)
    n_steps = int(n_steps)
    stride = max(int(stride), 1)
    if JIT_ENABLED:
        samples, bad = _rk4_jit(drift, drive, y0, float(dt), n_steps, stride)
    else:
        samples, bad = _rk4_numpy(drift, drive, y0, float(dt), n_steps, stride)
    return samples, int(bad)
