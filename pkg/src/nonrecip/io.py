"""Byte-stable serialisation of results.

Floats are written with ``repr`` (shortest string that round-trips to the
same double), CSV files use ',' and LF, JSON keys are sorted. Every file is
written to a temporary sibling and renamed into place.
"""
from __future__ import annotations

import datetime as _dt
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__


def fmt(x: float) -> str:
    return repr(float(x))


def jsonable(obj: Any) -> Any:
    """Convert numpy/complex containers to plain JSON types (complex -> [re, im])."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path: str | Path, obj: Any) -> Path:
    return atomic_write(path, dumps(obj))


def csv_text(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    return atomic_write(path, csv_text(header, rows))


def write_sweep(out_dir: str | Path, sweep, flags: dict) -> list[Path]:
    """Long-format CSV plus a JSON sidecar describing axes and conventions."""
    out_dir = Path(out_dir)
    rows = (
        (oc, v, sweep.t_plus[i, j], sweep.t_minus[i, j], sweep.eta[i, j])
        for i, v in enumerate(sweep.v_axis.values)
        for j, oc in enumerate(sweep.omega_c_axis.values)
    )
    csv_path = write_csv(out_dir / "sweep.csv", ("omega_c", "v", "t_plus", "t_minus", "eta"), rows)
    sidecar = {
        "axes": {
            "omega_c": sweep.omega_c_axis.describe(),
            "v": sweep.v_axis.describe(),
        },
        "params_fingerprint": sweep.params_fingerprint,
        "convention_flags": flags,
        "layout": "long; rows ordered by v then omega_c",
    }
    json_path = write_json(out_dir / "sweep.json", sidecar)
    return [csv_path, json_path]


def write_trajectory(path: str | Path, traj) -> Path:
    s = traj.states
    rows = (
        (t, s[i, 0].real, s[i, 0].imag, s[i, 1].real, s[i, 1].imag, s[i, 2].real, s[i, 2].imag)
        for i, t in enumerate(traj.t)
    )
    header = ("t", "re_a", "im_a", "re_s13", "im_s13", "re_s12", "im_s12")
    return write_csv(path, header, rows)


@dataclass
class RunManifest:
    command: str
    params: dict
    grids: dict = field(default_factory=dict)
    convention_flags: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    tool_version: str = __version__
    created_utc: str = ""

    def write(self, out_dir: str | Path) -> Path:
        if not self.created_utc:
            self.created_utc = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        missing = [p for p in self.outputs if not Path(p).exists()]
        if missing:
            raise FileNotFoundError(f"manifest lists outputs that do not exist: {missing}")
        doc = asdict(self)
        out_dir = Path(out_dir)
        doc["outputs"] = [os.path.relpath(p, out_dir) for p in self.outputs]
        return write_json(out_dir / "manifest.json", doc)
