"""Closed-form steady state of the driven cavity + Lambda-system.

The NV center is linearised around |1> (sigma11 ~ 1, sigma32 ~ 0), which
makes it act on the cavity field as a complex susceptibility ``chi``. The
closed forms here assume the cavity is resonant with the |1>-|3>
transition (``delta_a == 0``) and the control is resonant
(``delta_c == 0``); :func:`nonrecip.dynamics.solve_steady` covers the
general case.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ContractError, SingularityError
from .params import Direction, SystemParams, doppler_shifts

#: Below this value of T+ + T- the contrast is reported as 0.
ETA_FLOOR = 1e-30


@dataclass(frozen=True)
class ComplexResponse:
    chi: complex
    amplitude: complex
    transmittance: float
    direction: Direction


def _detunings(p: SystemParams, d: Direction) -> tuple[float, float]:
    shifts = doppler_shifts(p, d)
    return p.delta_p + shifts.single_photon, p.delta_p + shifts.two_photon - p.delta_c


def susceptibility(p: SystemParams, d: Direction | str) -> complex:
    """NV susceptibility seen by the cavity mode.

    ``chi = -i g^2 / [gamma3 + i delta1 + Omega_c^2 / (gamma12 + i delta2)]``
    where ``delta1``/``delta2`` are the Doppler-shifted single- and
    two-photon detunings.
    """
    d = Direction(d)
    one, two = _detunings(p, d)
    inner = complex(p.gamma12, two)
    if inner == 0:
        if p.omega_c_rabi == 0:
            inner = 1.0  # the control term vanishes identically
        else:
            raise SingularityError(
                "two-photon denominator gamma12 + i*(delta_p + s2) vanished"
            )
    denom = complex(p.gamma3, one) + p.omega_c_rabi**2 / inner
    if denom == 0:
        if p.g == 0:
            return 0j
        raise SingularityError(
            "susceptibility denominator gamma3 + i*(delta_p + s1) + Omega_c^2/(...) vanished"
        )
    return -1j * p.g**2 / denom


def _require_resonant_cavity(p: SystemParams) -> None:
    if p.delta_a != 0 or p.delta_c != 0:
        raise ContractError(
            "closed-form steady state assumes delta_a = delta_c = 0; "
            "use nonrecip.dynamics.solve_steady for detuned cavity or control"
        )


def _cavity_denominator(p: SystemParams, chi: complex) -> complex:
    den = 1j * p.delta_p + 0.5 * p.kappa + 1j * chi
    if den == 0:
        raise SingularityError("cavity denominator i*delta_p + kappa/2 + i*chi vanished")
    return den


def cavity_amplitude(p: SystemParams, d: Direction | str) -> complex:
    """Intracavity amplitude per unit probe amplitude, <a>/<a_p>."""
    _require_resonant_cavity(p)
    chi = susceptibility(p, d)
    return math.sqrt(p.kappa1) / _cavity_denominator(p, chi)


def transmittance(p: SystemParams, d: Direction | str) -> float:
    _require_resonant_cavity(p)
    chi = susceptibility(p, d)
    return p.kappa1 * p.kappa2 / abs(_cavity_denominator(p, chi)) ** 2


def response(p: SystemParams, d: Direction | str) -> ComplexResponse:
    """Bundle chi, amplitude and transmittance for one direction."""
    d = Direction(d)
    _require_resonant_cavity(p)
    chi = susceptibility(p, d)
    den = _cavity_denominator(p, chi)
    return ComplexResponse(
        chi=chi,
        amplitude=math.sqrt(p.kappa1) / den,
        transmittance=p.kappa1 * p.kappa2 / abs(den) ** 2,
        direction=d,
    )


def contrast_from(t_plus: float, t_minus: float) -> float:
    total = t_plus + t_minus
    if total < ETA_FLOOR:
        return 0.0
    return (t_plus - t_minus) / total


def contrast(p: SystemParams) -> float:
    """Nonreciprocity contrast (T+ - T-)/(T+ + T-)."""
    return contrast_from(transmittance(p, Direction.CO), transmittance(p, Direction.COUNTER))


def empty_cavity_transmittance(p: SystemParams) -> float:
    return p.kappa1 * p.kappa2 / (p.delta_p**2 + (0.5 * p.kappa) ** 2)


def normalized_transmittance(p: SystemParams, d: Direction | str) -> float:
    """Transmittance relative to the empty cavity at the same probe detuning."""
    return transmittance(p, d) / empty_cavity_transmittance(p)

