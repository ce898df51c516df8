"""JSON and CSV serialization.

Complex entries are ``[re, im]`` pairs and matrices are row-major nested
lists; plain real numbers are accepted on input. CSV floats use 17
significant digits with ``.`` as decimal separator.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .channels import Channel, ChoiMatrix, KrausChannel, StinespringChannel
from .errors import ChdlError
from .info import DiscreteEnsemble

CSV_COLUMNS = ("n", "probe_id", "metric", "value")


class InputError(ChdlError, ValueError):
    """Malformed input file."""


def encode_matrix(m) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj) -> np.ndarray:
    """Nested list of numbers or ``[re, im]`` pairs to a complex 2-D array."""
    if isinstance(obj, dict) and "matrix" in obj:
        obj = obj["matrix"]
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"cannot parse matrix: {exc}") from None
    if arr.ndim == 3 and arr.shape[2] == 2:
        out = arr[..., 0] + 1j * arr[..., 1]
    elif arr.ndim == 2:
        out = arr.astype(np.complex128)
    else:
        raise InputError(f"matrix must be 2-D (optionally with [re, im] pairs), got shape {arr.shape}")
    if not np.all(np.isfinite(out)):
        raise InputError("matrix has non-finite entries")
    return out


def encode_channel(ch: Channel) -> dict:
    """``{"dim_in", "dim_out", "repr", "data"}`` plus ``"dim_env"`` for Stinespring isometries."""
    out = {"dim_in": ch.dim_in, "dim_out": ch.dim_out}
    if isinstance(ch, StinespringChannel):
        return {**out, "repr": "stinespring", "data": encode_matrix(ch.V), "dim_env": ch.dim_env}
    if isinstance(ch, ChoiMatrix):
        return {**out, "repr": "choi", "data": encode_matrix(ch.mat)}
    return {**out, "repr": "kraus", "data": [encode_matrix(k) for k in ch.to_kraus().kraus]}


def decode_channel(obj) -> Channel:
    """Inverse of :func:`encode_channel`.

    The shorthand ``{"kraus": [...]}`` (dimensions inferred) is accepted too.
    """
    if not isinstance(obj, dict):
        raise InputError("channel must be a JSON object")
    if "kraus" in obj and "repr" not in obj:
        obj = {"repr": "kraus", "data": obj["kraus"]}
    try:
        kind, data = obj["repr"], obj["data"]
        if kind == "kraus":
            ch = KrausChannel(tuple(decode_matrix(k) for k in data))
        elif kind == "stinespring":
            v = decode_matrix(data)
            ch = StinespringChannel(v, int(obj["dim_out"]), int(obj["dim_env"]))
        elif kind == "choi":
            ch = ChoiMatrix(decode_matrix(data), int(obj["dim_in"]), int(obj["dim_out"]))
        else:
            raise InputError(f"unknown channel representation {kind!r}")
    except KeyError as exc:
        raise InputError(f"channel object lacks field {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    for key in ("dim_in", "dim_out"):
        if key in obj and int(obj[key]) != getattr(ch, key):
            raise InputError(f"declared {key}={obj[key]} does not match the data ({getattr(ch, key)})")
    return ch


def encode_ensemble(mu: DiscreteEnsemble) -> dict:
    return {"weights": [float(p) for p in mu.weights], "states": [encode_matrix(s) for s in mu.states]}


def decode_ensemble(obj) -> DiscreteEnsemble:
    try:
        return DiscreteEnsemble(obj["weights"], [decode_matrix(s) for s in obj["states"]])
    except (KeyError, TypeError) as exc:
        raise InputError(f"ensemble object must have 'weights' and 'states': {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def load_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def to_jsonable(obj):
    """Convert numpy scalars/arrays (complex matrices as ``[re, im]`` pairs) for :func:`json.dumps`."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return encode_matrix(obj)
        if np.iscomplexobj(obj):
            return [[float(z.real), float(z.imag)] for z in obj.ravel()]
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"


def format_float(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, rows) -> None:
    """Rows ``(n, probe_id, metric, value)`` with a header line."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for n, pid, metric, value in rows:
            w.writerow((int(n), pid, metric, format_float(value)))
