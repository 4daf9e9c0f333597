"""Command-line interface: ``peripheral <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import io, models
from .algebra import extract_structure, structure_from_dims
from .capacity import additivity_compose, capacity_report, optimal_fidelity_bounds, parse_delta
from .channel import (
    ChannelSuperOp,
    KrausChannel,
    LindbladGenerator,
    identity_superop,
    kraus_to_superop,
    lindblad_to_superop,
    require_cptp,
    superop_exp,
    tensor,
)
from .codes import (
    avg_classical_fidelity,
    build_classical_code,
    build_quantum_code,
    code_entanglement_fidelity,
    evolve,
    extract_peripheral_action,
)
from .errors import NumericalError, ValidationError
from .markov import bottom_scc_periods, classical_chain_capacity
from .report import SCHEMA, dumps, render_text, structure_report
from .tolerances import Tolerances

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
# dense verification of additivity diagonalizes a (dA dB)^2 matrix
VERIFY_MAX_DIM = 36


def _tolerances(args) -> Tolerances:
    overrides = {}
    for item in args.tol or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"--tol expects name=value, got {item!r}")
        name = name.strip().lower()
        if name not in Tolerances.__dataclass_fields__:
            raise ValidationError(f"unknown tolerance {name!r}; choose from {sorted(Tolerances.__dataclass_fields__)}")
        try:
            overrides[name] = float(value)
        except ValueError as exc:
            raise ValidationError(f"tolerance {name} must be a number, got {value!r}") from exc
    try:
        return Tolerances.from_env(**overrides)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _deltas(args):
    return [parse_delta(d) for d in (args.delta or ["0"])]


def _parse_time(text: str):
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        t = int(text)
    except ValueError as exc:
        raise ValidationError(f"--t expects a nonnegative integer or 'inf', got {text!r}") from exc
    if t < 0:
        raise ValidationError("--t must be nonnegative")
    return t


def _channel_superop(channel, tol: Tolerances, step: float) -> tuple[ChannelSuperOp, dict]:
    """Superoperator to analyze and a description of where it came from."""
    if isinstance(channel, LindbladGenerator):
        if step <= 0:
            raise ValidationError("--time must be positive for Lindblad input")
        t = superop_exp(lindblad_to_superop(channel), step)
        return require_cptp(t, tol), {"repr": "lindblad", "dim": channel.dim, "time": step}
    if isinstance(channel, KrausChannel):
        return kraus_to_superop(channel), {"repr": "kraus", "dim": channel.dim}
    return require_cptp(channel, tol), {"repr": "superop", "dim": channel.dim}


def _load_superop(path, tol, step):
    channel, digest = io.load_channel(path, tol)
    t, source = _channel_superop(channel, tol, step)
    return t, source, digest


def _emit(args, text: str):
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    tol = _tolerances(args)
    deltas = _deltas(args)
    t, source, digest = _load_superop(args.channel, tol, args.time)
    structure = extract_structure(t, tol, check=False)
    doc = structure_report(structure, digest=digest, tol=tol, deltas=deltas, source=source, timings=args.timings or args.text)
    _emit(args, render_text(doc) if args.text else dumps(doc))
    return EXIT_OK


def _structure_from_report(path):
    obj, _ = io.read_json(path)
    if not isinstance(obj, dict) or obj.get("schema") != SCHEMA:
        raise ValidationError(f"{path}: not a {SCHEMA} document")
    try:
        dims = [(int(b["d_k"]), int(b["d_k_prime"])) for b in obj["blocks"]]
        return structure_from_dims(dims, int(obj["dim"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed blocks field") from exc


def cmd_capacity(args) -> int:
    tol = _tolerances(args)
    if (args.channel is None) == (args.structure is None):
        raise ValidationError("give exactly one of a channel file or --structure")
    if args.structure is not None:
        structure = _structure_from_report(args.structure)
    else:
        t, _, _ = _load_superop(args.channel, tol, args.time)
        structure = extract_structure(t, tol, check=False)
    doc = {
        "schema": SCHEMA,
        "blocks": [{"d_k": a, "d_k_prime": b} for a, b in structure.dims],
        "capacities": [capacity_report(structure, d).as_dict() for d in _deltas(args)],
    }
    if args.D:
        g = optimal_fidelity_bounds(structure, args.D)
        doc["fidelity_bounds"] = {
            "D": g.D,
            "gammas": list(g.gammas),
            "lower": float(g.fidelity_lower),
            "upper": float(g.fidelity_upper),
        }
    _emit(args, dumps(doc))
    return EXIT_OK


def cmd_additivity(args) -> int:
    tol = _tolerances(args)
    ta, _, _ = _load_superop(args.first, tol, args.time)
    tb, _, _ = _load_superop(args.second, tol, args.time)
    sa = extract_structure(ta, tol, check=False)
    sb = extract_structure(tb, tol, check=False)
    composed = additivity_compose(sa, sb)
    doc = {
        "schema": SCHEMA,
        "first": [list(p) for p in sa.dims],
        "second": [list(p) for p in sb.dims],
        "composed": [list(p) for p in composed.dims],
        "C0_bits": {
            "first": math.log2(sa.sum_dk),
            "second": math.log2(sb.sum_dk),
            "composed": math.log2(composed.sum_dk),
        },
        "Q0_bits": {
            "first": math.log2(sa.max_dk),
            "second": math.log2(sb.max_dk),
            "composed": math.log2(composed.max_dk),
        },
    }
    if args.verify:
        dim = sa.dim * sb.dim
        if dim > VERIFY_MAX_DIM and not args.force:
            raise ValidationError(f"dense verification at dimension {dim} is expensive; pass --force to run it")
        dense = extract_structure(tensor(ta, tb), tol, check=False)
        doc["verified"] = sorted(dense.dims) == sorted(composed.dims)
        doc["dense"] = [list(p) for p in dense.dims]
    _emit(args, dumps(doc))
    return EXIT_OK if doc.get("verified", True) else EXIT_NUMERICAL


def cmd_markov(args) -> int:
    m, digest = io.load_stochastic(args.matrix)
    chain = bottom_scc_periods(m)
    doc = {
        "schema": SCHEMA,
        "input": {"sha256": digest, "n": m.n},
        "bottom_sccs": [list(c) for c in chain.bottom_sccs],
        "periods": list(chain.periods),
        "sum_dk": chain.sum_dk,
        "capacities": [],
    }
    for delta in _deltas(args):
        c = classical_chain_capacity(m, delta)
        doc["capacities"].append({"delta": str(delta) if not isinstance(delta, float) else delta, "D_max": c["D_max"], "bits": c["bits"]})
    _emit(args, dumps(doc))
    return EXIT_OK


def cmd_codes(args) -> int:
    tol = _tolerances(args)
    t, _, _ = _load_superop(args.channel, tol, args.time)
    steps = _parse_time(args.t)
    structure = extract_structure(t, tol, check=False)
    action = extract_peripheral_action(t, structure)
    evolved = evolve(t, steps, structure)
    doc = {"schema": SCHEMA, "D": args.D, "t": "inf" if steps == math.inf else steps}
    doc["blocks"] = [{"d_k": a, "d_k_prime": b} for a, b in structure.dims]
    doc["permutation"] = list(action.permutation)
    if args.kind in ("classical", "both"):
        code = build_classical_code(structure, action, args.D, steps)
        doc["classical"] = {
            "avg_fidelity": avg_classical_fidelity(evolved, code),
            "predicted": min(1.0, structure.sum_dk / args.D),
        }
    if args.kind in ("quantum", "both"):
        code = build_quantum_code(structure, action, args.D, steps)
        g = optimal_fidelity_bounds(structure, args.D)
        doc["quantum"] = {
            "entanglement_fidelity": code_entanglement_fidelity(evolved, code),
            "gammas": list(g.gammas),
            "lower_bound": float(g.fidelity_lower),
            "upper_bound": float(g.fidelity_upper),
        }
    _emit(args, dumps(doc))
    return EXIT_OK


def cmd_examples(args) -> int:
    name = args.name
    if name == "collective-noise":
        obj = models.collective_noise(args.n if args.n is not None else 3)
    elif name == "cat-code":
        trunc = models.FockTruncation(args.n_max, args.alpha)
        obj = models.cat_code_generator(trunc, args.n if args.n is not None else 2)
    elif name == "photon-loss":
        trunc = models.FockTruncation(args.n_max, args.alpha)
        obj = models.photon_loss_recovery_channel(args.p, trunc, args.n if args.n is not None else 4, args.t_tilde)
    elif name == "amplitude-damping":
        obj = models.amplitude_damping(args.gamma)
    elif name == "identity":
        obj = identity_superop(args.d)
    elif name == "cycle":
        obj = models.cycle_channel(args.n if args.n is not None else 3)
    elif name == "depolarizing":
        obj = models.depolarizing(args.d)
    else:  # argparse restricts choices
        raise ValidationError(f"unknown example {name!r}")
    _emit(args, dumps(io.channel_to_json(obj)))
    return EXIT_OK


EXAMPLES = ("collective-noise", "cat-code", "photon-loss", "amplitude-damping", "identity", "cycle", "depolarizing")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="peripheral", description="Peripheral-space structure and infinite-time capacities.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_delta=True):
        sp.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance (cptp, periph, rank, herm, fid)")
        sp.add_argument("--out", help="write to this file instead of stdout")
        sp.add_argument("--time", type=float, default=1.0, help="evolution time for Lindblad input (default 1)")
        if with_delta:
            sp.add_argument("--delta", action="append", help="error level; fractions like 1/2 are exact (repeatable)")

    a = sub.add_parser("analyze", help="peripheral structure and capacities of a channel")
    a.add_argument("channel")
    fmt = a.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--text", action="store_true", help="human-readable summary with timings")
    a.add_argument("--timings", action="store_true", help="include per-stage timings in the JSON report")
    common(a)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("capacity", help="capacities from a channel or a saved report")
    c.add_argument("channel", nargs="?")
    c.add_argument("--structure", help="a report written by 'analyze'")
    c.add_argument("--D", type=int, help="also report fidelity bounds for this code dimension")
    common(c)
    c.set_defaults(func=cmd_capacity)

    ad = sub.add_parser("additivity", help="block dimensions of a tensor product")
    ad.add_argument("first")
    ad.add_argument("second")
    ad.add_argument("--verify", action="store_true", help="also run the dense pipeline on the tensor product")
    ad.add_argument("--force", action="store_true", help="allow --verify on large products")
    common(ad, with_delta=False)
    ad.set_defaults(func=cmd_additivity)

    m = sub.add_parser("markov", help="classical fast path for a stochastic matrix")
    m.add_argument("matrix")
    m.add_argument("--delta", action="append")
    m.add_argument("--out")
    m.set_defaults(func=cmd_markov)

    co = sub.add_parser("codes", help="fidelities of the explicit encoder/recovery pairs")
    co.add_argument("channel")
    co.add_argument("--D", type=int, required=True)
    co.add_argument("--t", default="inf", help="number of channel uses, or 'inf' (default)")
    co.add_argument("--kind", choices=("classical", "quantum", "both"), default="both")
    common(co, with_delta=False)
    co.set_defaults(func=cmd_codes)

    e = sub.add_parser("examples", help="write an example channel as JSON")
    e.add_argument("name", choices=EXAMPLES)
    e.add_argument("--n", type=int, help="qubits, cat components or cycle length")
    e.add_argument("--alpha", type=float, default=2.0)
    e.add_argument("--n-max", type=int, default=40, dest="n_max")
    e.add_argument("--p", type=float, default=0.9, help="probability of no photon loss")
    e.add_argument("--t-tilde", type=float, default=1.0, dest="t_tilde")
    e.add_argument("--gamma", type=float, default=0.5)
    e.add_argument("--d", type=int, default=2)
    e.add_argument("--out")
    e.set_defaults(func=cmd_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
