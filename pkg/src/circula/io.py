"""Dataset CSV, model JSON and summary JSON formats.

Dataset CSV: a header row, an optional leading ``time`` column (kept as
text, unused by the model), then one column of radians per series.

Model JSON::

    {"m": 3, "p": 2,
     "marginals": [{"mu": ..., "rho": ...}, ...],
     "cross":  [{"l1": 2, "l2": 1, "rho": ..., "q": 1}, ...],
     "serial": [{"l1": 1, "l2": 1, "k": 1, "rho": ..., "q": 1}, ...]}

Summary JSON: ``{"parameters": [{"name", "mean", "sd", "median", "rhat"}],
"metadata": {...}}``.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from pathlib import Path

import numpy as np

from .circular import WrappedCauchy, wrap_angle
from .estimation import ChainSummary, McmcConfig, param_names
from .vine import CircularSeries, ModelSpec, n_pair_circulas


class LoadError(ValueError):
    """A dataset or model file could not be parsed."""


def load_csv(path) -> CircularSeries:
    """Read a dataset CSV; angles are wrapped into ``[0, 2*pi)``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise LoadError(f"{path}: cannot read file ({exc.strerror})") from exc
    rows = [r for r in csv.reader(_io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise LoadError(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    has_time = header[0].lower() == "time"
    names = header[1:] if has_time else header
    if not names:
        raise LoadError(f"{path}: no series columns")
    if len(rows) < 2:
        raise LoadError(f"{path}: no data rows")
    times = []
    values = np.empty((len(rows) - 1, len(names)))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise LoadError(f"{path}: row {r} has {len(row)} fields, expected {len(header)}")
        if has_time:
            times.append(row[0].strip())
            row = row[1:]
        for c, (name, cell) in enumerate(zip(names, row)):
            try:
                val = float(cell)
            except ValueError:
                raise LoadError(
                    f"{path}: row {r}, column {name!r}: cannot parse {cell.strip()!r} as a number"
                ) from None
            if not math.isfinite(val):
                raise LoadError(f"{path}: row {r}, column {name!r}: value is not finite")
            values[r - 2, c] = val
    return CircularSeries(wrap_angle(values), names=tuple(names),
                          times=tuple(times) if has_time else None)


def format_csv(series: CircularSeries) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    has_time = series.times is not None
    writer.writerow((["time"] if has_time else []) + list(series.names))
    for t, row in enumerate(series.data):
        cells = [f"{v:.6f}" for v in row]
        writer.writerow(([series.times[t]] if has_time else []) + cells)
    return buf.getvalue()


def write_csv(series: CircularSeries, path) -> None:
    Path(path).write_text(format_csv(series))


def model_to_dict(model: ModelSpec) -> dict:
    cross, serial = [], []
    for (l1, l2, k), pc in zip(model.keys(), model.pairs):
        entry = {"l1": l1, "l2": l2, "rho": pc.binding_rho, "q": pc.q}
        if k == 0:
            cross.append(entry)
        else:
            serial.append({"l1": l1, "l2": l2, "k": k, "rho": pc.binding_rho, "q": pc.q})
    return {
        "m": model.m,
        "p": model.p,
        "marginals": [{"mu": f.mu, "rho": f.rho} for f in model.marginals],
        "cross": cross,
        "serial": serial,
    }


def _field(obj, key, where, kind=float):
    if not isinstance(obj, dict) or key not in obj:
        raise LoadError(f"{where}.{key}: missing")
    val = obj[key]
    if kind is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise LoadError(f"{where}.{key}: expected an integer, got {val!r}")
        return val
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise LoadError(f"{where}.{key}: expected a finite number, got {val!r}")
    return float(val)


def model_from_dict(d: dict) -> ModelSpec:
    """Validate a model JSON object and build the ModelSpec."""
    if not isinstance(d, dict):
        raise LoadError("model: expected a JSON object")
    m = _field(d, "m", "model", int)
    p = _field(d, "p", "model", int)
    if m < 1:
        raise LoadError("model.m: must be positive")
    if p < 0:
        raise LoadError("model.p: must be nonnegative")
    for key in ("marginals", "cross", "serial"):
        if not isinstance(d.get(key), list):
            raise LoadError(f"model.{key}: expected a list")
    if len(d["marginals"]) != m:
        raise LoadError(f"model.marginals: expected {m} entries, got {len(d['marginals'])}")
    n_cross = m * (m - 1) // 2
    if len(d["cross"]) != n_cross:
        raise LoadError(f"model.cross: expected {n_cross} entries, got {len(d['cross'])}")
    if len(d["serial"]) != m * m * p:
        raise LoadError(f"model.serial: expected {m * m * p} entries, got {len(d['serial'])}")
    assert len(d["cross"]) + len(d["serial"]) == n_pair_circulas(m, p)

    marginals = []
    for a, e in enumerate(d["marginals"]):
        where = f"model.marginals[{a}]"
        try:
            marginals.append(WrappedCauchy(_field(e, "mu", where), _field(e, "rho", where)))
        except LoadError:
            raise
        except ValueError as exc:
            raise LoadError(f"{where}.rho: {exc}") from None
    cross, serial, q = {}, {}, {}
    for key, target, fields in (("cross", cross, ("l1", "l2")), ("serial", serial, ("l1", "l2", "k"))):
        for a, e in enumerate(d[key]):
            where = f"model.{key}[{a}]"
            idx = tuple(_field(e, f, where, int) for f in fields)
            if idx in target:
                raise LoadError(f"{where}: duplicate entry {idx}")
            rho = _field(e, "rho", where)
            if not 0.0 <= rho < 1.0 - 1e-9:
                raise LoadError(f"{where}.rho: must lie in [0, 1 - 1e-9), got {rho!r}")
            sign = _field(e, "q", where, int) if "q" in e else 1
            if sign not in (1, -1):
                raise LoadError(f"{where}.q: must be +1 or -1, got {sign!r}")
            target[idx] = rho
            q[idx] = sign
    try:
        return ModelSpec(m, p, marginals, cross=cross, serial=serial, q=q)
    except ValueError as exc:
        raise LoadError(f"model: {exc}") from None


def load_model(path) -> ModelSpec:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except OSError as exc:
        raise LoadError(f"{path}: cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(d)


def save_model(model: ModelSpec, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def summary_to_dict(summary: ChainSummary, config: McmcConfig, data_path=None) -> dict:
    return {
        "parameters": [
            {"name": n, "mean": float(a), "sd": float(b), "median": float(c), "rhat": float(r)}
            for n, a, b, c, r in summary.rows()
        ],
        "metadata": {
            "m": summary.m,
            "p": summary.p,
            "chains": config.chains,
            "iterations": config.iterations,
            "warmup": config.warmup,
            "thinning": config.thinning,
            "seed": config.seed,
            "data_path": None if data_path is None else str(data_path),
            "acceptance": [float(a) for a in summary.acceptance],
        },
    }


_NAME = re.compile(r"^(mu|rho)_(\d+)(?:_?(\d+)?,(\d+))?$")


def model_from_summary(d: dict, stat: str = "mean") -> ModelSpec:
    """Point-estimate ModelSpec from a summary JSON object, keyed by parameter name."""
    meta = d["metadata"]
    m, p = meta["m"], meta["p"]
    values = {e["name"]: e[stat] for e in d["parameters"]}
    expected = param_names(m, p)
    missing = [n for n in expected if n not in values]
    if missing:
        raise LoadError(f"summary: missing parameters {missing}")
    cap = 1.0 - 1e-9 - 1e-12
    vec = np.array([values[n] for n in expected])
    rho = np.minimum(vec[m:], cap)
    return ModelSpec.from_arrays(m, p, vec[:m], rho[:m], rho[m:])
