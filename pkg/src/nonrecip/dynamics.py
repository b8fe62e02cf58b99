"""Mean-field Heisenberg-Langevin dynamics of (a, sigma13, sigma12).

With the NV center pinned in |1> (sigma11 = 1, sigma33 = sigma32 = 0) and
zero-mean noise, the equations of motion are linear::

    d/dt y = drift @ y + drive,    y = (<a>, <sigma13>, <sigma12>)

The closed-form steady state in :mod:`nonrecip.steady_state` is the fixed
point of this system; integrating it in time gives an independent check.

``delta_a`` is the offset of the cavity from the |1>-|3> transition, so
the cavity sees the probe at detuning ``delta_a + delta_p``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dark_state import eig3
from .errors import DivergenceError, ParameterError, SingularityError, StabilityError
from .params import Direction, SystemParams, doppler_shifts

#: Upper bound on dt * ||drift||_2 accepted by :func:`integrate`.
STABILITY_LIMIT = 0.1


@dataclass(frozen=True)
class MeanFieldState:
    a: complex
    sigma13: complex
    sigma12: complex
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.sigma13, self.sigma12], dtype=np.complex128)


@dataclass(frozen=True)
class LinearSystem:
    drift: np.ndarray
    drive: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.drift, 2))


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # (n_samples, 3): a, sigma13, sigma12

    def final(self) -> MeanFieldState:
        a, s13, s12 = self.states[-1]
        return MeanFieldState(complex(a), complex(s13), complex(s12), float(self.t[-1]))


def build_linear_system(p: SystemParams, d: Direction | str,
                        probe_amplitude: complex = 1.0) -> LinearSystem:
    shifts = doppler_shifts(p, Direction(d))
    one = p.delta_p + shifts.single_photon
    two = p.delta_p + shifts.two_photon - p.delta_c
    cav = p.delta_a + p.delta_p
    g, oc = p.g, p.omega_c_rabi
    drift = np.array(
        [
            [-(0.5 * p.kappa + 1j * cav), -1j * g, 0.0],
            [-1j * g, -(p.gamma3 + 1j * one), -1j * oc],
            [0.0, -1j * oc, -(p.gamma12 + 1j * two)],
        ],
        dtype=np.complex128,
    )
    drive = np.array([math.sqrt(p.kappa1) * complex(probe_amplitude), 0.0, 0.0],
                     dtype=np.complex128)
    drift.setflags(write=False)
    drive.setflags(write=False)
    return LinearSystem(drift, drive)


def solve_steady(sys: LinearSystem) -> MeanFieldState:
    """Fixed point ``-drift^-1 @ drive``."""
    try:
        y = np.linalg.solve(sys.drift, -sys.drive)
    except np.linalg.LinAlgError:
        raise SingularityError("drift matrix is singular (no damping?)") from None
    if not np.all(np.isfinite(y)):
        raise SingularityError("drift matrix is numerically singular")
    return MeanFieldState(complex(y[0]), complex(y[1]), complex(y[2]), math.inf)


def slowest_rate(sys: LinearSystem) -> float:
    """Smallest damping rate ``min(-Re eig(drift))``; negative means unstable."""
    values, _ = eig3(sys.drift)
    return float(np.min(-values.real))


def default_dt(sys: LinearSystem, fraction: float = 0.05) -> float:
    return fraction / sys.norm


def integrate(sys: LinearSystem, t_end: float, dt: float | None = None,
              output_stride: int = 1, initial: MeanFieldState | None = None) -> Trajectory:
    """Classical RK4 with a fixed step from ``initial`` (default: all zero).

    ``dt`` is shrunk slightly so that an integer number of steps lands on
    ``t_end``; samples are kept every ``output_stride`` steps plus the
    initial state.
    """
    if not t_end > 0:
        raise ParameterError("t_end", "must be > 0")
    if dt is None:
        dt = default_dt(sys)
    if not dt > 0:
        raise ParameterError("dt", "must be > 0")
    if dt * sys.norm >= STABILITY_LIMIT:
        raise StabilityError(
            f"dt * ||drift|| = {dt * sys.norm:.3g} exceeds {STABILITY_LIMIT}; "
            f"use dt < {STABILITY_LIMIT / sys.norm:.3e} s"
        )
    n_steps = math.ceil(t_end / dt - 1e-9)
    dt = t_end / n_steps
    y0 = np.zeros(3, dtype=np.complex128) if initial is None else initial.as_array()
    stride = max(int(output_stride), 1)
    samples, bad = _kernels.rk4_trajectory(sys.drift, sys.drive, y0, dt, n_steps, stride)
    if bad >= 0:
        raise DivergenceError(bad)
    t = np.arange(samples.shape[0], dtype=np.float64) * (stride * dt)
    if n_steps % stride:
        # always finish on t_end
        rest = n_steps % stride
        tail, bad = _kernels.rk4_trajectory(sys.drift, sys.drive, samples[-1], dt, rest, rest)
        if bad >= 0:
            raise DivergenceError(n_steps - rest + bad)
        samples = np.vstack([samples, tail[-1:]])
        t = np.append(t, t_end)
    else:
        t[-1] = t_end
    return Trajectory(t, samples)
