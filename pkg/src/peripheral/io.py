"""JSON formats for channels and stochastic matrices.

Channel files::

    {"dim": d, "repr": "kraus" | "superop" | "lindblad",
     "kraus": [M, ...], "superop": M, "hamiltonian": M, "jumps": [M, ...]}

where every matrix ``M`` is a row-major nested list of ``[re, im]`` pairs
(plain real numbers are accepted too). Superoperators use row-major ``vec``.
Stochastic matrices are either a dense nested list (column stochastic) or
``{"n": n, "triplets": [[row, col, value], ...]}``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .channel import ChannelSuperOp, KrausChannel, LindbladGenerator
from .errors import ValidationError
from .markov import StochasticMatrix
from .tolerances import Tolerances

REPRS = ("kraus", "superop", "lindblad")


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ValidationError(f"{where}: expected a nested list of rows")
    width = len(obj[0])
    out = np.empty((len(obj), width), dtype=complex)
    for i, row in enumerate(obj):
        if len(row) != width:
            raise ValidationError(f"{where}[{i}]: row has {len(row)} entries, expected {width}")
        for j, z in enumerate(row):
            out[i, j] = _scalar(z, f"{where}[{i}][{j}]")
    return out


def _scalar(z, where: str) -> complex:
    if isinstance(z, bool):
        raise ValidationError(f"{where}: booleans are not numbers")
    if isinstance(z, (int, float)):
        return complex(z)
    if isinstance(z, list) and len(z) == 2 and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in z):
        return complex(z[0], z[1])
    raise ValidationError(f"{where}: expected [re, im] or a real number, got {z!r}")


def channel_to_json(channel) -> dict:
    if isinstance(channel, KrausChannel):
        return {"dim": channel.dim, "repr": "kraus", "kraus": [matrix_to_json(k) for k in channel.kraus]}
    if isinstance(channel, LindbladGenerator):
        return {
            "dim": channel.dim,
            "repr": "lindblad",
            "hamiltonian": matrix_to_json(channel.hamiltonian),
            "jumps": [matrix_to_json(j) for j in channel.jumps],
        }
    if isinstance(channel, ChannelSuperOp):
        return {"dim": channel.dim, "repr": "superop", "superop": matrix_to_json(channel.matrix)}
    raise TypeError(f"cannot serialize {type(channel).__name__}")


def parse_json_text(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def read_json(path) -> tuple[object, str]:
    """Parsed content and the sha256 of the raw bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValidationError(f"{path}: not UTF-8 text") from exc
    return parse_json_text(text, str(path)), hashlib.sha256(raw).hexdigest()


def channel_from_json(obj, tol: Tolerances | None = None):
    """``KrausChannel``, ``ChannelSuperOp`` or ``LindbladGenerator`` from a parsed channel file."""
    if not isinstance(obj, dict):
        raise ValidationError("channel file: top level must be an object")
    rep = obj.get("repr")
    if rep not in REPRS:
        raise ValidationError(f"field 'repr': expected one of {list(REPRS)}, got {rep!r}")
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValidationError(f"field 'dim': expected a positive integer, got {dim!r}")
    if rep == "kraus":
        ops = obj.get("kraus")
        if not isinstance(ops, list) or not ops:
            raise ValidationError("field 'kraus': expected a nonempty list of matrices")
        mats = [matrix_from_json(k, f"kraus[{i}]") for i, k in enumerate(ops)]
        for i, m in enumerate(mats):
            if m.shape != (dim, dim):
                raise ValidationError(f"kraus[{i}]: shape {m.shape} does not match dim {dim}")
        return KrausChannel(tuple(mats), tol=tol)
    if rep == "superop":
        if "superop" not in obj:
            raise ValidationError("field 'superop' is missing")
        m = matrix_from_json(obj["superop"], "superop")
        if m.shape != (dim * dim, dim * dim):
            raise ValidationError(f"superop: shape {m.shape} does not match dim {dim} (expected {dim * dim} square)")
        return ChannelSuperOp(m)
    if "hamiltonian" in obj:
        h = matrix_from_json(obj["hamiltonian"], "hamiltonian")
    else:
        h = np.zeros((dim, dim))
    jumps = obj.get("jumps", [])
    if not isinstance(jumps, list):
        raise ValidationError("field 'jumps': expected a list of matrices")
    js = [matrix_from_json(j, f"jumps[{i}]") for i, j in enumerate(jumps)]
    for name, m in [("hamiltonian", h)] + [(f"jumps[{i}]", j) for i, j in enumerate(js)]:
        if m.shape != (dim, dim):
            raise ValidationError(f"{name}: shape {m.shape} does not match dim {dim}")
    return LindbladGenerator(h, tuple(js), tol=tol)


def load_channel(path, tol: Tolerances | None = None):
    obj, digest = read_json(path)
    return channel_from_json(obj, tol), digest


def stochastic_from_json(obj) -> StochasticMatrix:
    if isinstance(obj, dict):
        n = obj.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValidationError(f"field 'n': expected a positive integer, got {n!r}")
        trip = obj.get("triplets")
        if not isinstance(trip, list):
            raise ValidationError("field 'triplets': expected a list of [row, col, value]")
        for i, t in enumerate(trip):
            if not (isinstance(t, list) and len(t) == 3):
                raise ValidationError(f"triplets[{i}]: expected [row, col, value]")
        return StochasticMatrix.from_triplets(n, trip) if trip else StochasticMatrix(n, [], [], [])
    if isinstance(obj, list):
        m = matrix_from_json(obj, "matrix")
        if np.any(m.imag):
            raise ValidationError("matrix: stochastic entries must be real")
        return StochasticMatrix.from_dense(m.real)
    raise ValidationError("stochastic matrix: expected a nested list or an object with 'n' and 'triplets'")


def load_stochastic(path) -> tuple[StochasticMatrix, str]:
    obj, digest = read_json(path)
    return stochastic_from_json(obj), digest
