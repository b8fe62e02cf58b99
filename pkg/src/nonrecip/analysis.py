"""Parameter sweeps and feature extraction.

Covers transmission spectra, (Omega_c, v) maps of T+, T- and the contrast,
location of the counter-propagation dip, the width of the contrast peak in
velocity, and log-log power-law fits of that width against g.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import InsufficientDataError, ParameterError
from .params import TWO_PI_MHZ, Direction, SystemParams, doppler_factors
from .steady_state import ETA_FLOOR, _require_resonant_cavity


@dataclass(frozen=True)
class Grid1D:
    axis_name: str
    values: np.ndarray
    units: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if v.size < 2:
            raise ParameterError(self.axis_name, "grid needs at least 2 points")
        if not np.all(np.isfinite(v)):
            raise ParameterError(self.axis_name, "grid values must be finite")
        if np.any(np.diff(v) <= 0):
            raise ParameterError(self.axis_name, "grid must be strictly increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def linear(cls, axis_name, start, stop, n, units=""):
        return cls(axis_name, np.linspace(start, stop, int(n)), units)

    @classmethod
    def log(cls, axis_name, start, stop, n, units=""):
        if not (start > 0 and stop > 0):
            raise ParameterError(axis_name, "log grid bounds must be > 0")
        return cls(axis_name, np.geomspace(start, stop, int(n)), units)

    def __len__(self):
        return self.values.size

    def describe(self) -> dict:
        v = self.values
        return {"name": self.axis_name, "units": self.units, "n": int(v.size),
                "min": float(v[0]), "max": float(v[-1])}


@dataclass(frozen=True)
class SweepResult:
    """Maps over (v, Omega_c): rows follow ``v_axis``, columns ``omega_c_axis``."""

    omega_c_axis: Grid1D
    v_axis: Grid1D
    t_plus: np.ndarray
    t_minus: np.ndarray
    eta: np.ndarray
    params_fingerprint: str
    template: SystemParams


@dataclass(frozen=True)
class PeakFeature:
    location: float
    extremum_value: float
    fwhm: float = math.nan
    valid: bool = True
    diagnostic: str = ""


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    r_squared: float


@dataclass(frozen=True)
class FwhmScan:
    points: np.ndarray  # (n, 2): g, v_fwhm
    rejected: list = field(default_factory=list)  # (g, diagnostic)


@dataclass(frozen=True)
class DipLine:
    """Per-velocity transmission minima fitted by ``Omega_c = slope * kv``."""

    kv: np.ndarray
    omega_c: np.ndarray
    slope: float
    r_squared: float

    @property
    def closer_to(self) -> str:
        """Which candidate constant the slope matches: ``sqrt2`` or ``inv_sqrt2``."""
        text, caption = math.sqrt(2.0), 1.0 / math.sqrt(2.0)
        return "sqrt2" if abs(self.slope - text) <= abs(self.slope - caption) else "inv_sqrt2"


# --------------------------------------------------------------------------
# pointwise evaluation
# --------------------------------------------------------------------------


def evaluate(template: SystemParams, d: Direction | str, *, g=None, omega_c=None,
             delta_p=None, velocity=None):
    """Vectorised ``(chi, T)`` with any of g, Omega_c, Delta_p, v overridden by arrays."""
    _require_resonant_cavity(template)
    a1, a2 = doppler_factors(d, template.sign_convention)
    g = template.g if g is None else g
    omega_c = template.omega_c_rabi if omega_c is None else omega_c
    delta_p = template.delta_p if delta_p is None else delta_p
    kv = template.kv if velocity is None else template.k * np.asarray(velocity, dtype=np.float64)
    return _kernels.transmittance_points(
        g, omega_c, delta_p, kv, template.kappa1, template.kappa2, template.kappa,
        template.gamma3, template.gamma12, template.delta_c, a1, a2,
    )


def contrast_array(t_plus: np.ndarray, t_minus: np.ndarray) -> np.ndarray:
    total = t_plus + t_minus
    safe = np.where(total < ETA_FLOOR, 1.0, total)
    return np.where(total < ETA_FLOOR, 0.0, (t_plus - t_minus) / safe)


def spectrum(p: SystemParams, delta_p_grid: Grid1D, d: Direction | str) -> np.ndarray:
    """Transmittance versus probe detuning."""
    return evaluate(p, d, delta_p=delta_p_grid.values)[1]


def sweep2d(template: SystemParams, omega_c_grid: Grid1D, v_grid: Grid1D,
            threads: int = 1) -> SweepResult:
    """T+, T- and contrast on the (v, Omega_c) grid.

    Rows are filled in independent tiles; with ``threads > 1`` tiles run on
    a thread pool (the compiled kernel releases the GIL). Output does not
    depend on the tiling.
    """
    oc = omega_c_grid.values
    v = v_grid.values
    shape = (v.size, oc.size)
    t_plus = np.empty(shape)
    t_minus = np.empty(shape)

    def fill(rows: slice) -> None:
        vv = v[rows, None]
        for d, out in ((Direction.CO, t_plus), (Direction.COUNTER, t_minus)):
            _, t = evaluate(template, d, omega_c=oc[None, :], velocity=vv)
            out[rows] = t

    threads = max(int(threads), 1)
    n_tiles = min(v.size, threads * 4) if threads > 1 else 1
    bounds = np.linspace(0, v.size, n_tiles + 1).astype(int)
    tiles = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, tiles))
    else:
        for tile in tiles:
            fill(tile)
    eta = contrast_array(t_plus, t_minus)
    return SweepResult(omega_c_grid, v_grid, t_plus, t_minus, eta,
                       template.fingerprint(), template)


# --------------------------------------------------------------------------
# feature extraction
# --------------------------------------------------------------------------


def _parabola_vertex(x0, x1, x2, y0, y1, y2):
    d0 = (x0 - x1) * (x0 - x2)
    d1 = (x1 - x0) * (x1 - x2)
    d2 = (x2 - x0) * (x2 - x1)
    a = y0 / d0 + y1 / d1 + y2 / d2
    b = -(y0 * (x1 + x2) / d0 + y1 * (x0 + x2) / d1 + y2 * (x0 + x1) / d2)
    c = y0 * x1 * x2 / d0 + y1 * x0 * x2 / d1 + y2 * x0 * x1 / d2
    if a == 0:
        return x1, y1
    xv = -b / (2 * a)
    xv = min(max(xv, x0), x2)
    return xv, (a * xv + b) * xv + c


def find_extremum(x: Sequence[float], y: Sequence[float], mode: str = "min") -> PeakFeature:
    """Discrete extremum refined by a parabola through it and its neighbours.

    Extrema on the first or last sample are flagged ``valid=False``. Width
    is not measured here (``fwhm`` stays NaN); see :func:`fwhm_of_peak`.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 5 or x.size != y.size:
        raise InsufficientDataError("find_extremum needs >= 5 (x, y) samples")
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    i = int(np.argmin(y) if mode == "min" else np.argmax(y))
    if i == 0 or i == x.size - 1:
        return PeakFeature(float(x[i]), float(y[i]), valid=False,
                           diagnostic="extremum on the grid boundary")
    xv, yv = _parabola_vertex(x[i - 1], x[i], x[i + 1], y[i - 1], y[i], y[i + 1])
    return PeakFeature(float(xv), float(yv))


def _crossing(xa, xb, ya, yb, level):
    return xa + (level - ya) * (xb - xa) / (yb - ya)


def fwhm_of_peak(x: Sequence[float], y: Sequence[float]) -> PeakFeature:
    """Full width at half maximum of the dominant peak of ``y(x)``.

    Half maximum is measured from zero. Each crossing is linearly
    interpolated between the bracketing samples nearest the peak.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 3 or x.size != y.size:
        raise InsufficientDataError("fwhm_of_peak needs >= 3 (x, y) samples")
    i = int(np.argmax(y))
    peak = float(y[i])
    if not peak > 0:
        return PeakFeature(float(x[i]), peak, valid=False, diagnostic="no positive peak")
    half = 0.5 * peak
    below_left = np.nonzero(y[:i] < half)[0]
    below_right = np.nonzero(y[i:] < half)[0]
    if below_left.size == 0 or below_right.size == 0:
        side = "left" if below_left.size == 0 else "right"
        return PeakFeature(float(x[i]), peak, valid=False,
                           diagnostic=f"half maximum not bracketed on the {side}")
    a = below_left[-1]
    b = i + below_right[0]
    left = _crossing(x[a], x[a + 1], y[a], y[a + 1], half)
    right = _crossing(x[b - 1], x[b], y[b - 1], y[b], half)
    return PeakFeature(float(x[i]), peak, float(right - left))


def power_law_fit(x: Sequence[float], y: Sequence[float]) -> PowerLawFit:
    """Least-squares fit of ``y = prefactor * x**exponent`` in log-log space."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise ValueError("x and y differ in length")
    if x.size < 3:
        raise InsufficientDataError("power_law_fit needs >= 3 points")
    for xi, yi in zip(x, y):
        if not (xi > 0 and yi > 0):
            raise ParameterError("points", f"non-positive point ({xi!r}, {yi!r})")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(float(slope), float(math.exp(intercept)), r2)


def eta_vs_velocity(template: SystemParams, v_grid: Grid1D) -> np.ndarray:
    _, tp = evaluate(template, Direction.CO, velocity=v_grid.values)
    _, tm = evaluate(template, Direction.COUNTER, velocity=v_grid.values)
    return contrast_array(tp, tm)


EtaCurve = Callable[[float, np.ndarray], np.ndarray]


def fwhm_vs_g_scan(template: SystemParams, g_grid: Grid1D, v_grid: Grid1D,
                   omega_c_slice: float | None = None,
                   curve: EtaCurve | None = None) -> FwhmScan:
    """Velocity FWHM of the contrast peak for each coupling strength.

    The contrast is sliced at fixed Omega_c (``omega_c_slice``, default the
    template value). ``curve(g, v)`` replaces the physical contrast when
    given, for feeding synthetic peaks through the same pipeline.
    """
    base = template if omega_c_slice is None else template.replace(omega_c_rabi=omega_c_slice)
    pts, rejected = [], []
    for g in g_grid.values:
        if curve is None:
            eta = eta_vs_velocity(base.replace(g=float(g)), v_grid)
        else:
            eta = np.asarray(curve(float(g), v_grid.values), dtype=np.float64)
        feat = fwhm_of_peak(v_grid.values, eta)
        if feat.valid:
            pts.append((float(g), feat.fwhm))
        else:
            rejected.append((float(g), feat.diagnostic))
    if len(pts) < 3:
        raise InsufficientDataError(
            f"only {len(pts)} valid FWHM values; rejected: {rejected}"
        )
    return FwhmScan(np.array(pts), rejected)


def transmittance_vs_omega_c(p: SystemParams, omega_c_grid: Grid1D, d: Direction | str,
                             normalized: bool = False) -> np.ndarray:
    _, t = evaluate(p, d, omega_c=omega_c_grid.values)
    if normalized:
        t = t / (p.kappa1 * p.kappa2 / (p.delta_p**2 + (0.5 * p.kappa) ** 2))
    return t


def dip_line(sweep: SweepResult) -> DipLine:
    """Fit the per-row minima of T- over Omega_c to a line through the origin."""
    k = sweep.template.k
    kv, oc = [], []
    for v, row in zip(sweep.v_axis.values, sweep.t_minus):
        if v <= 0:
            continue
        feat = find_extremum(sweep.omega_c_axis.values, row, "min")
        if feat.valid:
            kv.append(k * v)
            oc.append(feat.location)
    if len(kv) < 3:
        raise InsufficientDataError("fewer than 3 rows with an interior T- minimum")
    x, y = np.array(kv), np.array(oc)
    slope = float(x @ y / (x @ x))
    ss_res = float(((y - slope * x) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DipLine(x, y, slope, r2)


def default_omega_c_grid(n: int = 400) -> Grid1D:
    return Grid1D.log("omega_c", 10 * TWO_PI_MHZ, 5000 * TWO_PI_MHZ, n, "rad/s")


def default_v_grid(n: int = 201, v_max: float = 500.0) -> Grid1D:
    return Grid1D.linear("v", 0.0, v_max, n, "m/s")
