"""Infinite-time capacities from the block dimensions of the peripheral space.

Capacities are in bits. ``delta`` may be a float, an ``int``, a
``fractions.Fraction`` or a string such as ``"1/2"``; the last three use exact
integer arithmetic for the floors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import PeripheralStructure, extract_structure, structure_from_dims
from .channel import LindbladGenerator, lindblad_to_superop, require_cptp, superop_exp
from .errors import NumericalError, ValidationError
from .spectral import qms_peripheral_generators
from .tolerances import Tolerances, resolve

ULP_NUDGE = 8 * np.finfo(float).eps


def parse_delta(delta) -> Fraction | float:
    if isinstance(delta, str):
        try:
            delta = Fraction(delta.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse delta {delta!r}") from exc
    elif isinstance(delta, (bool, np.bool_)):
        raise ValidationError("delta must be a number")
    elif isinstance(delta, (int, np.integer)):
        delta = Fraction(int(delta))
    elif isinstance(delta, Fraction):
        pass
    else:
        delta = float(delta)
        if not math.isfinite(delta):
            raise ValidationError(f"delta must be finite, got {delta}")
    if not 0 <= delta < 1:
        raise ValidationError(f"delta must satisfy 0 <= delta < 1, got {delta}")
    return delta


def _floor_div_one_minus(num: int, delta) -> int:
    """``floor(num / (1 - delta))``."""
    if isinstance(delta, Fraction):
        one_minus = 1 - delta
        return (num * one_minus.denominator) // one_minus.numerator
    return math.floor(num / (1.0 - delta) * (1 + ULP_NUDGE))


def _dims_of(structure) -> list[tuple[int, int]]:
    if isinstance(structure, PeripheralStructure):
        return structure.dims
    return [(int(a), int(b)) for a, b in structure]


def classical_d_max(sum_dk: int, delta) -> int:
    return _floor_div_one_minus(int(sum_dk), parse_delta(delta))


def classical_capacity_inf(structure, delta=0) -> dict:
    """``D_max = floor(sum_k d_k / (1 - delta))`` and ``log2 D_max``."""
    s = sum(a for a, _ in _dims_of(structure))
    d_max = classical_d_max(s, delta)
    return {"D_max": d_max, "bits": math.log2(d_max)}


def quantum_lower_dimension(max_dk: int, delta) -> int:
    """``floor(max_dk / sqrt(1 - delta))``."""
    delta = parse_delta(delta)
    if isinstance(delta, Fraction):
        # floor(sqrt(y)) = isqrt(floor(y))
        return math.isqrt(_floor_div_one_minus(max_dk * max_dk, delta))
    return math.floor(max_dk / math.sqrt(1.0 - delta) * (1 + ULP_NUDGE))


def quantum_capacity_bounds(structure, delta=0) -> dict:
    """``log2 floor(m / sqrt(1-delta)) <= Q <= log2(m / (1-delta))`` with ``m = max_k d_k``."""
    delta = parse_delta(delta)
    m = max(a for a, _ in _dims_of(structure))
    lower = math.log2(quantum_lower_dimension(m, delta))
    if delta == 0:
        return {"lower_bits": lower, "upper_bits": lower}
    upper = math.log2(m) - math.log2(1 - float(delta))
    return {"lower_bits": lower, "upper_bits": max(lower, upper)}


@dataclass(frozen=True)
class CapacityReport:
    delta: Fraction | float
    classical_D_max: int
    classical_bits: float
    quantum_lower_bits: float
    quantum_upper_bits: float
    per_block_dims: tuple

    def as_dict(self) -> dict:
        return {
            "delta": str(self.delta) if isinstance(self.delta, Fraction) else self.delta,
            "classical_D_max": self.classical_D_max,
            "classical_bits": self.classical_bits,
            "quantum_lower_bits": self.quantum_lower_bits,
            "quantum_upper_bits": self.quantum_upper_bits,
            "per_block_dims": [list(p) for p in self.per_block_dims],
        }


def capacity_report(structure, delta=0) -> CapacityReport:
    delta = parse_delta(delta)
    dims = _dims_of(structure)
    c = classical_capacity_inf(dims, delta)
    q = quantum_capacity_bounds(dims, delta)
    return CapacityReport(delta, c["D_max"], c["bits"], q["lower_bits"], q["upper_bits"], tuple(dims))


@dataclass(frozen=True)
class GammaAllocation:
    """Greedy ``gamma_k`` (aligned with ``dims`` sorted by ``d_k`` descending) and fidelity bounds."""

    D: int
    dims: tuple
    gammas: tuple
    fidelity_lower: Fraction
    fidelity_upper: Fraction


def optimal_fidelity_bounds(structure, D: int) -> GammaAllocation:
    """Fill the largest blocks first: ``gamma_1 = d_1, ..., gamma_s = min(d_s, rest)``.

    Both objectives, ``sum gamma_k^2`` and ``sum d_k gamma_k``, are maximized
    by this rule under ``sum gamma_k <= D`` and ``gamma_k <= d_k``.
    """
    D = int(D)
    if D < 1:
        raise ValidationError("D must be at least 1")
    dks = sorted((a for a, _ in _dims_of(structure)), reverse=True)
    gammas = []
    left = D
    for dk in dks:
        g = min(dk, left)
        gammas.append(g)
        left -= g
    lower = Fraction(sum(g * g for g in gammas), D * D)
    upper = min(Fraction(1), Fraction(sum(dk * g for dk, g in zip(dks, gammas)), D * D))
    return GammaAllocation(D, tuple(dks), tuple(gammas), lower, upper)


def additivity_compose(sa, sb) -> PeripheralStructure:
    """Dimensions of the peripheral structure of ``T kron S``: all pairwise block products."""
    da, db = _dims_of(sa), _dims_of(sb)
    dims = [(a * c, b * e) for a, b in da for c, e in db]
    dim = None
    if isinstance(sa, PeripheralStructure) and isinstance(sb, PeripheralStructure):
        dim = sa.dim * sb.dim
    return structure_from_dims(dims, dim)


def iid_rate_bounds(structure, delta, m: int) -> dict:
    """Per-copy bounds on the capacities of ``T^{kron m}``.

    ``m C_0 + log(1/(1-delta)) - 1 <= C(T^m) <= m C_0 + log(1/(1-delta))`` and
    the quantum analogue with ``log(1/(1-delta)) / 2`` in the lower bound,
    divided by ``m``. With an exact ``delta`` the classical per-copy value
    itself is also returned.
    """
    delta = parse_delta(delta)
    m = int(m)
    if m < 1:
        raise ValidationError("m must be at least 1")
    dims = _dims_of(structure)
    s = sum(a for a, _ in dims)
    c0 = math.log2(s)
    q0 = math.log2(max(a for a, _ in dims))
    gain = -math.log2(1 - float(delta))
    out = {
        "classical_lower_bits_per_copy": c0 + (gain - 1) / m,
        "classical_upper_bits_per_copy": c0 + gain / m,
        "quantum_lower_bits_per_copy": q0 + (0.5 * gain - 1) / m,
        "quantum_upper_bits_per_copy": q0 + gain / m,
    }
    if isinstance(delta, Fraction):
        exact = _floor_div_one_minus(s ** m, delta)
        out["classical_bits_per_copy"] = _log2_int(exact) / m
    return out


def _log2_int(n: int) -> float:
    # exact enough for huge integers where float(n) would overflow
    shift = max(0, n.bit_length() - 60)
    return shift + math.log2(n >> shift)


def qms_capacity(
    gen: LindbladGenerator,
    delta=0,
    t: float = 1.0,
    tol: Tolerances | None = None,
    *,
    verify_time: float | None = None,
) -> CapacityReport:
    """Capacities of the semigroup ``exp(t L)``.

    The peripheral structure does not depend on ``t > 0``. It is recomputed
    at ``verify_time`` (default ``2 t``) and the dimension count of the
    peripheral space is compared with the imaginary-axis eigenspace of ``L``.
    """
    tol = resolve(tol)
    if t <= 0:
        raise ValidationError("t must be positive")
    lhat = lindblad_to_superop(gen)
    s = extract_structure(require_cptp(superop_exp(lhat, t), tol), tol, check=False)
    direct = len(qms_peripheral_generators(lhat, tol))
    if direct != s.chi_dim:
        raise NumericalError(f"peripheral dimension {s.chi_dim} disagrees with generator spectrum ({direct})")
    second = 2 * t if verify_time is None else verify_time
    if second:
        s2 = extract_structure(require_cptp(superop_exp(lhat, second), tol), tol, check=False)
        if sorted(s2.dims) != sorted(s.dims):
            raise NumericalError(f"structure changed with time: {s.dims} at t={t}, {s2.dims} at t={second}")
    return capacity_report(s, delta)
