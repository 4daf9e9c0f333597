"""Versioned, deterministic report documents."""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from .algebra import PeripheralStructure
from .capacity import capacity_report, parse_delta
from .tolerances import Tolerances

SCHEMA = "peripheral-report/1"


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0:
        return "0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2) -> str:
    """JSON with floats at 17 significant digits and keys in insertion order."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return format_float(o)
        if isinstance(o, Fraction):
            return json.dumps(str(o))
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        raise TypeError(f"cannot encode {type(o).__name__}")

    return enc(obj, 0) + "\n"


def _delta_key(delta) -> str:
    return str(delta) if isinstance(delta, Fraction) else format_float(delta)


def eigenvalue_list(values) -> list:
    vals = sorted((complex(v) for v in values), key=lambda z: (round(math.atan2(z.imag, z.real) % (2 * math.pi), 9), -abs(z)))
    return [[z.real, z.imag] for z in vals]


def structure_report(
    structure: PeripheralStructure,
    *,
    digest: str | None,
    tol: Tolerances,
    deltas=(0,),
    source: dict | None = None,
    timings: bool = False,
) -> dict:
    blocks = []
    for b in structure.blocks:
        entry = {"d_k": b.d, "d_k_prime": b.d_prime}
        if b.omega is not None:
            entry["omega_spectrum"] = sorted(np.linalg.eigvalsh(b.omega).tolist(), reverse=True)
        blocks.append(entry)
    doc = {"schema": SCHEMA, "input": {"sha256": digest, **(source or {})}, "tolerances": tol.as_dict()}
    doc["dim"] = structure.dim
    doc["h0_dim"] = structure.h0_dim
    doc["blocks"] = blocks
    if structure.peripheral is not None:
        doc["peripheral_eigenvalues"] = eigenvalue_list(structure.peripheral.peripheral_eigenvalues)
    caps = {}
    for delta in deltas:
        delta = parse_delta(delta)
        caps[_delta_key(delta)] = capacity_report(structure, delta).as_dict()
    doc["capacities"] = caps
    if timings:
        doc["timings_ms"] = dict(structure.timings)
    return doc


def block_notation(dims, h0_dim: int = 0) -> str:
    """Table-style notation such as ``C I_4 + (M_2 x I_2)``."""
    parts = ["0"] if h0_dim else []
    for d, dp in dims:
        if d == 1:
            parts.append(f"C I_{dp}" if dp > 1 else "C")
        elif dp == 1:
            parts.append(f"M_{d}")
        else:
            parts.append(f"(M_{d} x I_{dp})")
    return " + ".join(parts)


def render_text(doc: dict) -> str:
    lines = [f"dimension        {doc['dim']}", f"H_0 dimension    {doc['h0_dim']}"]
    dims = [(b["d_k"], b["d_k_prime"]) for b in doc["blocks"]]
    lines.append(f"structure        {block_notation(dims, doc['h0_dim'])}")
    lines.append("blocks")
    for b in doc["blocks"]:
        om = ", ".join(f"{x:.6g}" for x in b.get("omega_spectrum", []))
        lines.append(f"  d_k={b['d_k']:<3} d'_k={b['d_k_prime']:<3} omega spectrum [{om}]")
    if "peripheral_eigenvalues" in doc:
        lines.append(f"peripheral eigenvalues  {len(doc['peripheral_eigenvalues'])}")
    lines.append("capacities (bits)")
    for key, c in doc["capacities"].items():
        lines.append(
            f"  delta={key:<8} D_max={c['classical_D_max']:<5} C={c['classical_bits']:.6f} "
            f"Q in [{c['quantum_lower_bits']:.6f}, {c['quantum_upper_bits']:.6f}]"
        )
    if "timings_ms" in doc:
        lines.append("timings (ms)")
        for k, v in doc["timings_ms"].items():
            lines.append(f"  {k:<24} {v:10.1f}")
    return "\n".join(lines) + "\n"
