"""Doppler-induced optical nonreciprocity of a rotating NV center in a cavity."""

__version__ = "0.1.0"

from .params import Direction, SignConvention, SystemParams, parse_params  # noqa: E402
from .steady_state import (  # noqa: E402
    cavity_amplitude,
    contrast,
    normalized_transmittance,
    susceptibility,
    transmittance,
)

__all__ = [
    "Direction",
    "SignConvention",
    "SystemParams",
    "parse_params",
    "susceptibility",
    "cavity_amplitude",
    "transmittance",
    "normalized_transmittance",
    "contrast",
]
