"""Physical parameters, unit handling and Doppler geometry.

All frequencies are stored internally as angular frequencies in rad/s.
Configuration documents may instead quote them in units of 2*pi*MHz, the
way cavity and NV linewidths are usually reported.
"""
from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import ParameterError

TWO_PI_MHZ = 2.0 * math.pi * 1e6

#: NV zero-phonon line between |+-1> and |A2>.
NV_WAVELENGTH = 637.2e-9


class Direction(str, enum.Enum):
    """Probe propagation relative to the control beam."""

    CO = "co"
    COUNTER = "counter"

    @property
    def sign(self) -> str:
        return "+" if self is Direction.CO else "-"


class SignConvention(str, enum.Enum):
    """How the counter-propagating Doppler shifts are assigned.

    ``AS_PRINTED`` keeps ``+kv`` in the single-photon detuning and ``+2kv``
    in the two-photon detuning. ``PHYSICAL_TEXT`` uses ``k_a.v = -kv`` for
    the counter-propagating probe, giving ``(-kv, -2kv)``. Both place the
    transmission dip on the same locus.
    """

    AS_PRINTED = "as_printed"
    PHYSICAL_TEXT = "physical_text"


class Units(str, enum.Enum):
    TWO_PI_MHZ = "two_pi_MHz"
    RAD_PER_S = "rad_per_s"

    @property
    def scale(self) -> float:
        return TWO_PI_MHZ if self is Units.TWO_PI_MHZ else 1.0


FREQUENCY_FIELDS = (
    "g",
    "omega_c_rabi",
    "kappa1",
    "kappa2",
    "kappa_c",
    "gamma3",
    "gamma12",
    "delta_a",
    "delta_p",
    "delta_c",
)
NONNEGATIVE_FIELDS = ("kappa1", "kappa2", "kappa_c", "gamma3", "gamma12")

# Cavity and NV rates of the reference configuration (rad/s). gamma12 is
# quoted without a 2*pi factor; see GAMMA12_READINGS.
_KAPPA1 = 0.5 * TWO_PI_MHZ
_KAPPA2 = 4.0 * TWO_PI_MHZ
_KAPPA_C = 6.0 * TWO_PI_MHZ
_KAPPA = _KAPPA1 + _KAPPA2 + _KAPPA_C

GAMMA12_READINGS = {"literal": 10.6e6, "two_pi": 10.6 * TWO_PI_MHZ}


@dataclass(frozen=True)
class SystemParams:
    """Validated, immutable record of every rate and geometry input.

    Defaults reproduce the reference cavity (kappa1, kappa2, kappa_c =
    2pi x 0.5, 4, 6 MHz), NV linewidths (gamma3 = 2pi x 14.3 MHz,
    gamma12 = 10.6e6 rad/s), v = 250 m/s and resonant detunings, with
    g = kappa and Omega_c = 2pi x 500 MHz.
    """

    g: float = _KAPPA
    omega_c_rabi: float = 500.0 * TWO_PI_MHZ
    kappa1: float = _KAPPA1
    kappa2: float = _KAPPA2
    kappa_c: float = _KAPPA_C
    gamma3: float = 14.3 * TWO_PI_MHZ
    gamma12: float = GAMMA12_READINGS["literal"]
    delta_a: float = 0.0
    delta_p: float = 0.0
    delta_c: float = 0.0
    wavelength: float = NV_WAVELENGTH
    refractive_index: float = 1.0
    velocity: float = 250.0
    sign_convention: SignConvention = SignConvention.AS_PRINTED

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if f.name == "sign_convention":
                continue
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParameterError(f.name, f"expected a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f.name, f"must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        for name in NONNEGATIVE_FIELDS:
            if getattr(self, name) < 0:
                raise ParameterError(name, "must be >= 0")
        if self.wavelength <= 0:
            raise ParameterError("wavelength", "must be > 0")
        if self.refractive_index < 1:
            raise ParameterError("refractive_index", "must be >= 1")
        if self.velocity < 0:
            raise ParameterError("velocity", "must be >= 0")
        if self.kappa <= 0:
            raise ParameterError("kappa", "kappa1 + kappa2 + kappa_c must be > 0")
        try:
            object.__setattr__(self, "sign_convention", SignConvention(self.sign_convention))
        except ValueError:
            raise ParameterError(
                "sign_convention", f"unknown convention {self.sign_convention!r}"
            ) from None

    @property
    def kappa(self) -> float:
        """Total cavity linewidth kappa1 + kappa2 + kappa_c."""
        return self.kappa1 + self.kappa2 + self.kappa_c

    @property
    def k(self) -> float:
        return wavenumber(self.wavelength, self.refractive_index)

    @property
    def kv(self) -> float:
        return self.k * self.velocity

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_document(self) -> dict[str, Any]:
        """Round-trippable configuration document in rad/s."""
        doc: dict[str, Any] = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        doc["sign_convention"] = self.sign_convention.value
        doc["units"] = Units.RAD_PER_S.value
        return doc

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class DopplerShifts:
    single_photon: float
    two_photon: float


def wavenumber(wavelength: float, refractive_index: float = 1.0) -> float:
    """Return ``2*pi*n/lambda`` in rad/m."""
    if not wavelength > 0:
        raise ParameterError("wavelength", "must be > 0")
    if not refractive_index >= 1:
        raise ParameterError("refractive_index", "must be >= 1")
    return 2.0 * math.pi * refractive_index / wavelength


def doppler_factors(d: Direction | str,
                    convention: SignConvention | str = SignConvention.AS_PRINTED) -> tuple[float, float]:
    """Multipliers of ``kv`` for the (single-photon, two-photon) detunings."""
    if Direction(d) is Direction.CO:
        return 1.0, 0.0
    if SignConvention(convention) is SignConvention.AS_PRINTED:
        return 1.0, 2.0
    return -1.0, -2.0


def doppler_shifts(p: SystemParams, d: Direction | str) -> DopplerShifts:
    """Doppler terms entering the single- and two-photon detunings.

    The control beam always sees ``k_c.v = kv``. A co-propagating probe sees
    the same shift, so the two-photon term cancels exactly.
    """
    a1, a2 = doppler_factors(d, p.sign_convention)
    kv = p.kv
    return DopplerShifts(a1 * kv, a2 * kv)


def _number(key: str, value: Any) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        # numeric strings arrive from environment overrides
        try:
            return float(value)
        except ValueError:
            pass
    raise ParameterError(key, f"expected a number, got {value!r}")


_FIELD_NAMES = tuple(f.name for f in dataclasses.fields(SystemParams))
_META_KEYS = ("units", "gamma12_reading")
REQUIRED_KEYS = ("g", "omega_c_rabi")


def parse_params(document: Mapping[str, Any] | str) -> SystemParams:
    """Build :class:`SystemParams` from a flat configuration document.

    ``document`` is a mapping or its JSON text. Frequencies are read in the
    unit declared by ``"units"`` (default ``"two_pi_MHz"``). ``g`` and
    ``omega_c_rabi`` are required; every other field falls back to the
    reference configuration. ``"gamma12_reading"`` selects the default
    dephasing rate: ``"literal"`` (10.6e6 rad/s) or ``"two_pi"``.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParameterError("<document>", f"invalid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise ParameterError("<document>", "expected a key/value object")

    for key in document:
        if key not in _FIELD_NAMES and key not in _META_KEYS:
            raise ParameterError(key, "unknown key")
    for key in REQUIRED_KEYS:
        if key not in document:
            raise ParameterError(key, "required key missing")

    try:
        units = Units(document.get("units", Units.TWO_PI_MHZ.value))
    except ValueError:
        raise ParameterError("units", f"unknown unit tag {document['units']!r}") from None
    reading = document.get("gamma12_reading", "literal")
    if reading not in GAMMA12_READINGS:
        raise ParameterError("gamma12_reading", f"unknown reading {reading!r}")

    kwargs: dict[str, Any] = {"gamma12": GAMMA12_READINGS[reading]}
    for key in _FIELD_NAMES:
        if key not in document:
            continue
        if key == "sign_convention":
            kwargs[key] = document[key]
            continue
        value = _number(key, document[key])
        if key in FREQUENCY_FIELDS:
            value *= units.scale
        kwargs[key] = value
    return SystemParams(**kwargs)


def load_params(path: str | Path) -> SystemParams:
    return parse_params(Path(path).read_text())
