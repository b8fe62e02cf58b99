"""Command-line interface: ``nonrecip <subcommand> [options]``.

Parameters are resolved in order: built-in reference configuration, the
``--config`` JSON document, ``NONRECIP_<KEY>`` environment variables,
``--set key=value`` flags, then dedicated flags such as ``--g-kappa``.
Frequencies in the document and in ``--set`` use the unit given by
``--units`` (or the document's ``"units"`` key; default 2*pi*MHz).

Exit status: 0 success, 2 usage or configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, dark_state, dynamics, io, steady_state
from .errors import (
    ContractError,
    DegenerateInputError,
    DivergenceError,
    EigenConvergenceError,
    InsufficientDataError,
    NonrecipError,
    ParameterError,
    SingularityError,
    StabilityError,
)
from .params import (
    REQUIRED_KEYS,
    Direction,
    SystemParams,
    Units,
    parse_params,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

ENV_PREFIX = "NONRECIP_"
_DOC_KEYS = tuple(SystemParams.__dataclass_fields__) + ("units", "gamma12_reading")
_NUMERIC_ERRORS = (SingularityError, EigenConvergenceError, DivergenceError,
                   InsufficientDataError, DegenerateInputError)


class UsageError(NonrecipError):
    pass


# --------------------------------------------------------------------------
# parameter resolution
# --------------------------------------------------------------------------


def _coerce(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def resolve_params(args: argparse.Namespace, environ=None) -> tuple[SystemParams, dict]:
    """Merge config, environment and flags; return params and convention flags."""
    environ = os.environ if environ is None else environ
    doc: dict = {}
    flag_units = None
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ParameterError("--config", str(exc)) from None
        except json.JSONDecodeError as exc:
            raise ParameterError("--config", f"invalid JSON: {exc}") from None
        if isinstance(loaded, dict) and "command" in loaded and "params" in loaded:
            # a run manifest: replay its parameters; grid flags keep the
            # units the original run read them in
            flag_units = loaded.get("convention_flags", {}).get("units")
            loaded = loaded["params"]
        if not isinstance(loaded, dict):
            raise ParameterError("--config", "expected a JSON object")
        doc.update(loaded)
    for key in _DOC_KEYS:
        value = environ.get(ENV_PREFIX + key.upper())
        if value is not None:
            doc[key] = _coerce(value)
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        doc[key.strip()] = _coerce(value.strip())
    if args.units:
        doc["units"] = args.units
        flag_units = None
    if args.sign_convention:
        doc["sign_convention"] = args.sign_convention

    try:
        scale = Units(doc.get("units", Units.TWO_PI_MHZ.value)).scale
    except ValueError:
        raise ParameterError("units", f"unknown unit tag {doc.get('units')!r}") from None
    reference = SystemParams()
    for key in REQUIRED_KEYS:
        doc.setdefault(key, getattr(reference, key) / scale)
    p = parse_params(doc)
    if getattr(args, "g_kappa", None) is not None:
        p = p.replace(g=args.g_kappa * p.kappa)
    if flag_units is None:
        flag_units = doc.get("units", Units.TWO_PI_MHZ.value)
    try:
        flag_units = Units(flag_units).value
    except ValueError:
        raise ParameterError("units", f"unknown unit tag {flag_units!r}") from None
    flags = {"units": flag_units,
             "sign_convention": p.sign_convention.value,
             "gamma12_reading": doc.get("gamma12_reading", "literal")}
    return p, flags


def parse_grid(text: str, name: str, scale: float = 1.0, allow_log: bool = True,
               units: str = "rad/s") -> analysis.Grid1D:
    """``min:max:n[:log]`` -> :class:`Grid1D` with values multiplied by ``scale``."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and (parts[3] != "log" or not allow_log)):
        suffix = "[:log]" if allow_log else ""
        raise UsageError(f"--{name} expects min:max:n{suffix}, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"--{name}: cannot parse {text!r}") from None
    if n < 2:
        raise UsageError(f"--{name}: need at least 2 points")
    if len(parts) == 4:
        return analysis.Grid1D.log(name, lo * scale, hi * scale, n, units)
    return analysis.Grid1D.linear(name, lo * scale, hi * scale, n, units)


def _directions(choice: str) -> list[Direction]:
    return [Direction.CO, Direction.COUNTER] if choice == "both" else [Direction(choice)]


def _unit_scale(flags: dict) -> float:
    return Units(flags["units"]).scale


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_transmit(args, p, flags, out: Path):
    report: dict = {}
    for d in _directions(args.direction):
        r = steady_state.response(p, d)
        report[d.value] = {
            "chi": [r.chi.real, r.chi.imag],
            "transmittance": r.transmittance,
            "normalized_transmittance": r.transmittance / steady_state.empty_cavity_transmittance(p),
        }
    if args.direction == "both":
        report["eta"] = steady_state.contrast_from(
            report["co"]["transmittance"], report["counter"]["transmittance"]
        )
    text = io.dumps(report)
    sys.stdout.write(text)
    return [io.atomic_write(out / "transmit.json", text)], {}


def cmd_spectrum(args, p, flags, out: Path):
    grid = parse_grid(args.delta_p, "delta-p", _unit_scale(flags), allow_log=False)
    dirs = _directions(args.direction)
    cols = [analysis.spectrum(p, grid, d) for d in dirs]
    header = ["delta_p"] + [f"t_{'plus' if d is Direction.CO else 'minus'}" for d in dirs]
    rows = zip(grid.values, *cols)
    return [io.write_csv(out / "spectrum.csv", header, rows)], {"delta_p": grid.describe()}


def cmd_sweep(args, p, flags, out: Path):
    oc = parse_grid(args.omega_c, "omega-c", _unit_scale(flags))
    v = parse_grid(args.v, "v", allow_log=False, units="m/s")
    sweep = analysis.sweep2d(p, oc, v, threads=args.threads)
    paths = io.write_sweep(out, sweep, flags)
    return paths, {"omega_c": oc.describe(), "v": v.describe()}


def _synthetic_curve(width: float, kappa: float, v_center: float):
    def curve(g, v):
        return np.exp(-(((v - v_center) / (width * (g / kappa) ** 2)) ** 2))
    return curve


def cmd_fwhm(args, p, flags, out: Path):
    if args.g and args.g_grid_kappa:
        raise UsageError("give either --g or --g-grid-kappa, not both")
    if args.g:
        g_grid = parse_grid(args.g, "g", _unit_scale(flags))
    elif args.g_grid_kappa:
        g_grid = parse_grid(args.g_grid_kappa, "g-grid-kappa", p.kappa)
    else:
        raise UsageError("fwhm needs a g grid (--g or --g-grid-kappa)")
    v = parse_grid(args.v, "v", allow_log=False, units="m/s")
    slice_ = None if args.omega_c_slice is None else args.omega_c_slice * _unit_scale(flags)
    curve = None
    if args.synthetic_width is not None:
        curve = _synthetic_curve(args.synthetic_width, p.kappa, 0.5 * (v.values[0] + v.values[-1]))
    scan = analysis.fwhm_vs_g_scan(p, g_grid, v, omega_c_slice=slice_, curve=curve)
    fit = analysis.power_law_fit(scan.points[:, 0], scan.points[:, 1])
    csv_path = io.write_csv(out / "fwhm.csv", ("g", "v_fwhm"), scan.points)
    summary = {
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "r_squared": fit.r_squared,
        "omega_c_slice": p.omega_c_rabi if slice_ is None else slice_,
        "rejected": [{"g": g, "diagnostic": msg} for g, msg in scan.rejected],
        "synthetic": args.synthetic_width is not None,
    }
    json_path = io.write_json(out / "fwhm_fit.json", summary)
    return [csv_path, json_path], {"g": g_grid.describe(), "v": v.describe()}


def _eigen_block(es: dark_state.EigenSet) -> dict:
    block = {
        "labels": list(es.labels),
        "values": es.values,
        "vectors": {lab: es.vectors[:, j] for j, lab in enumerate(es.labels)},
    }
    if es.normalizers is not None:
        block["normalizers"] = list(es.normalizers)
    return block


def cmd_eigen(args, p, flags, out: Path):
    h = dark_state.build_effective_hamiltonian(p, args.direction)
    exact = dark_state.exact_eigendecompose(h)
    doc = {
        "basis": ["|1>", "|3>", "|2>"],
        "direction": args.direction,
        "omega1": h.omega1,
        "omega2": h.omega2,
        "big_omega": h.big_omega,
        "exact": _eigen_block(exact),
    }
    try:
        approx = dark_state.approximate_eigenstates(h)
    except DegenerateInputError as exc:
        doc["approximate"] = {"error": str(exc)}
    else:
        doc["approximate"] = _eigen_block(approx)
        doc["overlaps"] = {
            lab: dark_state.overlap(approx.vectors[:, j], exact.vectors[:, j])
            for j, lab in enumerate(exact.labels)
        }
        doc["evolution"] = [
            {"t": t, "state": dark_state.evolve_state(h, t)} for t in args.t
        ]
    if h.big_omega > 0:
        rates = dark_state.decay_rates(h, p.kappa)
        doc["decay_rates"] = {"dark": rates.dark_rate, "bright": rates.bright_rate}
    return [io.write_json(out / "eigen.json", doc)], {}


def cmd_dynamics(args, p, flags, out: Path):
    sys_ = dynamics.build_linear_system(p, args.direction, args.probe_amplitude)
    if args.t_end is not None and args.t_end_kappa is not None:
        raise UsageError("give either --t-end or --t-end-kappa, not both")
    t_end = args.t_end if args.t_end is not None else (args.t_end_kappa or 50.0) / p.kappa
    traj = dynamics.integrate(sys_, t_end, args.dt, output_stride=args.stride)
    steady = dynamics.solve_steady(sys_)
    final = traj.final()
    ref = steady.as_array()
    scale = max(float(np.abs(ref).max()), 1e-300)
    doc = {
        "direction": args.direction,
        "t_end": t_end,
        "steady_state": {"a": steady.a, "sigma13": steady.sigma13, "sigma12": steady.sigma12},
        "final": {"a": final.a, "sigma13": final.sigma13, "sigma12": final.sigma12},
        "residual_vs_linear_solve": float(np.abs(final.as_array() - ref).max()) / scale
        if np.any(ref) else float(np.abs(final.as_array()).max()),
    }
    if p.delta_a == 0 and p.delta_c == 0:
        closed = steady_state.cavity_amplitude(p, args.direction) * args.probe_amplitude
        denom = abs(closed) if closed != 0 else 1.0
        doc["closed_form_a"] = closed
        doc["residual_vs_closed_form"] = abs(final.a - closed) / denom
        doc["linear_solve_vs_closed_form"] = abs(steady.a - closed) / denom
    paths = [io.write_trajectory(out / "trajectory.csv", traj),
             io.write_json(out / "dynamics.json", doc)]
    return paths, {"t": {"t_end": t_end, "samples": int(traj.t.size)}}


COMMANDS = {
    "transmit": cmd_transmit,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "fwhm": cmd_fwhm,
    "eigen": cmd_eigen,
    "dynamics": cmd_dynamics,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON parameter document (or a run manifest)")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--units", choices=[u.value for u in Units])
    common.add_argument("--sign-convention", choices=["as_printed", "physical_text"])
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one parameter (repeatable)")
    common.add_argument("--g-kappa", type=float, help="set g as a multiple of kappa")

    parser = argparse.ArgumentParser(prog="nonrecip", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmit", parents=[common], help="single-point chi, T and contrast")
    p.add_argument("--direction", choices=["co", "counter", "both"], default="both")

    p = sub.add_parser("spectrum", parents=[common], help="T versus probe detuning")
    p.add_argument("--delta-p", default="-100:100:401", help="min:max:n in frequency units")
    p.add_argument("--direction", choices=["co", "counter", "both"], default="both")

    p = sub.add_parser("sweep", parents=[common], help="(Omega_c, v) maps of T+, T-, eta")
    p.add_argument("--omega-c", default="10:5000:200:log", help="min:max:n[:log]")
    p.add_argument("--v", default="0:500:51", help="min:max:n in m/s")

    p = sub.add_parser("fwhm", parents=[common], help="contrast FWHM in v versus g, power-law fit")
    p.add_argument("--g", help="min:max:n[:log] in frequency units")
    p.add_argument("--g-grid-kappa", help="min:max:n[:log] in units of kappa")
    p.add_argument("--v", default="0:3000:30001", help="min:max:n in m/s")
    p.add_argument("--omega-c-slice", type=float, help="fixed Omega_c (frequency units)")
    p.add_argument("--synthetic-width", type=float, help=argparse.SUPPRESS)

    p = sub.add_parser("eigen", parents=[common], help="exact and approximate dark/bright states")
    p.add_argument("--direction", choices=["co", "counter"], default="co")
    p.add_argument("--t", type=float, action="append", default=[], help="evolution time (s)")

    p = sub.add_parser("dynamics", parents=[common], help="mean-field RK4 trajectory")
    p.add_argument("--direction", choices=["co", "counter"], default="co")
    p.add_argument("--t-end", type=float, help="end time in s")
    p.add_argument("--t-end-kappa", type=float, help="end time in units of 1/kappa (default 50)")
    p.add_argument("--dt", type=float, help="step in s (default 0.05/||drift||)")
    p.add_argument("--stride", type=int, default=100, help="keep every n-th step")
    p.add_argument("--probe-amplitude", type=float, default=1.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    try:
        p, flags = resolve_params(args)
        paths, grids = COMMANDS[args.command](args, p, flags, out)
        manifest = io.RunManifest(
            command=args.command,
            params=p.to_document(),
            grids=grids,
            convention_flags=flags,
            outputs=paths,
        )
        manifest.write(out)
    except (UsageError, ParameterError, ContractError, StabilityError) as exc:
        print(f"nonrecip {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        print(f"nonrecip {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in paths:
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
