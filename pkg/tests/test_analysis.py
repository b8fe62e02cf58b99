import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonrecip import analysis as A
from nonrecip.errors import InsufficientDataError, ParameterError
from nonrecip.params import TWO_PI_MHZ
from nonrecip.steady_state import contrast

# eta(v) at g = 5 kappa, Omega_c = 2pi x 500 MHz, v in [0, 3000] m/s (30001 points)
FWHM_G5_GOLDEN = 242.18183888167064


@pytest.mark.parametrize(
    "values",
    [[1.0], [1.0, 1.0, 2.0], [3.0, 2.0], [0.0, math.nan]],
)
def test_grid_rejects(values):
    with pytest.raises(ParameterError):
        A.Grid1D("x", np.array(values))


def test_grid_constructors():
    g = A.Grid1D.log("g", 1.0, 100.0, 3)
    assert g.values == pytest.approx([1, 10, 100])
    assert len(A.Grid1D.linear("v", 0, 1, 11)) == 11
    with pytest.raises(ParameterError):
        A.Grid1D.log("g", 0.0, 1.0, 5)
    assert g.describe()["n"] == 3


def test_extremum_exact_parabola():
    x = np.arange(5.0)
    f = A.find_extremum(x, (x - 2) ** 2, "min")
    assert f.valid and f.location == 2.0 and f.extremum_value == 0.0
    assert math.isnan(f.fwhm)
    off = A.find_extremum(x, (x - 2.3) ** 2, "min")
    assert off.location == pytest.approx(2.3)
    top = A.find_extremum(x, -(x - 1.6) ** 2, "max")
    assert top.location == pytest.approx(1.6)


def test_extremum_monotone_invalid():
    f = A.find_extremum(np.arange(6.0), np.arange(6.0), "min")
    assert not f.valid and "boundary" in f.diagnostic
    with pytest.raises(InsufficientDataError):
        A.find_extremum([0, 1, 2, 3], [1, 0, 0, 1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=5, max_size=40))
def test_extremum_near_discrete_min(ys):
    x = np.arange(float(len(ys)))
    y = np.array(ys)
    f = A.find_extremum(x, y, "min")
    i = int(np.argmin(y))
    assert abs(f.location - x[i]) <= 1.0
    assert x[0] <= f.location <= x[-1]


def test_fwhm_triangle():
    x = np.linspace(-2, 2, 401)
    f = A.fwhm_of_peak(x, np.clip(1 - np.abs(x), 0, None))
    assert f.valid and f.fwhm == pytest.approx(1.0, abs=1e-12)
    assert f.extremum_value == 1.0


@pytest.mark.parametrize("w", [0.3, 1.0, 2.5])
def test_fwhm_lorentzian(w):
    x = np.linspace(-20, 20, 8001)
    f = A.fwhm_of_peak(x, 3.0 / (1 + (x / w) ** 2))
    assert f.fwhm == pytest.approx(2 * w, abs=x[1] - x[0])


def test_fwhm_not_bracketed():
    x = np.linspace(0, 1, 50)
    f = A.fwhm_of_peak(x, np.exp(-x))
    assert not f.valid and "left" in f.diagnostic


def test_power_law_exact():
    fit = A.power_law_fit([1, 2, 3, 4], [2, 8, 18, 32])
    assert fit.exponent == pytest.approx(2.0, abs=1e-12)
    assert fit.prefactor == pytest.approx(2.0, rel=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_power_law_flat_and_errors():
    fit = A.power_law_fit([1, 2, 3], [5, 5, 5])
    assert fit.exponent == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ParameterError) as info:
        A.power_law_fit([1, 2, 3], [1, -1, 2])
    assert "-1" in str(info.value)
    with pytest.raises(InsufficientDataError):
        A.power_law_fit([1, 2], [1, 2])


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 10), st.floats(-3, 3), st.floats(1e-3, 1e3))
def test_power_law_scale_equivariant(c, p, a):
    x = np.array([1.0, 2.0, 5.0, 7.0])
    y = a * x**p * np.array([1.0, 1.1, 0.95, 1.02])
    base = A.power_law_fit(x, y)
    scaled = A.power_law_fit(c * x, y)
    assert scaled.exponent == pytest.approx(base.exponent, abs=1e-9)
    assert scaled.prefactor == pytest.approx(base.prefactor * c ** (-base.exponent), rel=1e-9)


def test_synthetic_hook_recovers_square_law(ref_params):
    c = 2.0
    g_grid = A.Grid1D.log("g", ref_params.kappa, 10 * ref_params.kappa, 8)
    v_grid = A.Grid1D.linear("v", 0, 3000, 300001)
    mid = 1500.0

    def curve(g, v):
        return np.exp(-(((v - mid) / (c * (g / ref_params.kappa) ** 2)) ** 2))

    scan = A.fwhm_vs_g_scan(ref_params, g_grid, v_grid, curve=curve)
    fit = A.power_law_fit(scan.points[:, 0], scan.points[:, 1])
    assert fit.exponent == pytest.approx(2.0, abs=1e-4)
    assert not scan.rejected


def test_scan_insufficient_data(ref_params):
    g_grid = A.Grid1D.linear("g", 1.0, 2.0, 4)
    v_grid = A.Grid1D.linear("v", 0, 1, 11)
    with pytest.raises(InsufficientDataError):
        A.fwhm_vs_g_scan(ref_params, g_grid, v_grid, curve=lambda g, v: np.exp(-v))


def test_fwhm_golden_and_half_maximum(ref_params):
    p = ref_params.replace(g=5 * ref_params.kappa)
    v = A.Grid1D.linear("v", 0, 3000, 30001)
    eta = A.eta_vs_velocity(p, v)
    f = A.fwhm_of_peak(v.values, eta)
    assert f.valid
    assert f.fwhm == pytest.approx(FWHM_G5_GOLDEN, rel=1e-9)
    # pointwise cross-check of the coarse grid against the scalar contrast
    coarse = A.Grid1D.linear("v", 0, 3000, 301)
    eta_c = A.eta_vs_velocity(p, coarse)
    scalar = [contrast(p.replace(velocity=float(x))) for x in coarse.values]
    assert eta_c == pytest.approx(scalar, rel=1e-12, abs=1e-15)
    assert A.fwhm_of_peak(coarse.values, eta_c).fwhm == pytest.approx(f.fwhm, rel=5e-3)


def test_fwhm_grows_with_coupling(ref_params):
    g_grid = A.Grid1D.log("g", ref_params.kappa, 10 * ref_params.kappa, 6)
    v_grid = A.Grid1D.linear("v", 0, 3000, 3001)
    scan = A.fwhm_vs_g_scan(ref_params, g_grid, v_grid, omega_c_slice=2000 * TWO_PI_MHZ)
    assert np.all(np.diff(scan.points[:, 1]) > 0)


def test_empty_cavity_spectrum(ref_params):
    p = ref_params.replace(g=0.0)
    grid = A.Grid1D.linear("delta_p", -200 * TWO_PI_MHZ, 200 * TWO_PI_MHZ, 401)
    t = A.spectrum(p, grid, "co")
    lorentz = p.kappa1 * p.kappa2 / (grid.values**2 + (p.kappa / 2) ** 2)
    assert t == pytest.approx(lorentz, rel=1e-13)
    assert np.argmax(t) == 200


def test_eit_window(ref_params):
    p = ref_params.replace(velocity=0.0, omega_c_rabi=100 * TWO_PI_MHZ)
    grid = A.Grid1D.linear("delta_p", -300 * TWO_PI_MHZ, 300 * TWO_PI_MHZ, 1201)
    t = A.spectrum(p, grid, "co")
    centre = 600
    peak = A.find_extremum(grid.values[centre - 20:centre + 21], t[centre - 20:centre + 21], "max")
    assert peak.valid and abs(peak.location) < grid.values[1] - grid.values[0]
    left = t[:centre].min()
    right = t[centre:].min()
    assert left < 0.5 * t[centre] and right < 0.5 * t[centre]


def test_doppler_breaks_mirror_symmetry(ref_params):
    grid = A.Grid1D.linear("delta_p", -300 * TWO_PI_MHZ, 300 * TWO_PI_MHZ, 601)
    still = A.spectrum(ref_params.replace(velocity=0.0), grid, "counter")
    assert still == pytest.approx(still[::-1], rel=1e-10)
    moving = A.spectrum(ref_params, grid, "counter")
    assert np.max(np.abs(moving - moving[::-1]) / moving.max()) > 1e-3


def test_sweep_bounds_and_determinism(ref_params):
    oc = A.Grid1D.log("omega_c", 10 * TWO_PI_MHZ, 5000 * TWO_PI_MHZ, 37)
    v = A.Grid1D.linear("v", 0, 500, 23)
    a = A.sweep2d(ref_params, oc, v)
    assert a.t_plus.shape == a.eta.shape == (23, 37)
    assert np.all(a.t_plus >= 0) and np.all(a.t_minus >= 0)
    assert np.all(np.abs(a.eta) <= 1)
    assert np.all(a.eta[0] == 0)
    for threads in (2, 3, 8):
        b = A.sweep2d(ref_params, oc, v, threads=threads)
        assert np.array_equal(a.t_plus, b.t_plus) and np.array_equal(a.eta, b.eta)
    # reversed evaluation order, one point at a time
    for i in (22, 11, 0):
        for j in (36, 5):
            tp = A.evaluate(ref_params, "co", omega_c=oc.values[j], velocity=v.values[i])[1]
            assert tp[0] == a.t_plus[i, j]


def test_weak_coupling_stays_transparent(ref_params):
    p = ref_params.replace(g=0.1 * ref_params.kappa)
    sw = A.sweep2d(p, A.default_omega_c_grid(200), A.default_v_grid(51))
    plateau = sw.t_minus[:, -1:]
    assert np.all(sw.t_minus >= 0.9 * plateau)


def test_dip_tracks_line_through_origin(ref_params):
    sw = A.sweep2d(ref_params, A.default_omega_c_grid(400), A.Grid1D.linear("v", 0, 500, 26))
    line = A.dip_line(sw)
    assert line.r_squared > 0.999
    assert line.slope == pytest.approx(math.sqrt(2), rel=0.02)
    assert line.closer_to == "sqrt2"
