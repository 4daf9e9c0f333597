"""Numerical thresholds shared by every stage of the pipeline."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

ENV_PREFIX = "PERIPHERAL_TOL_"


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used across the library.

    Attributes:
        cptp: allowed violation of trace preservation / Choi positivity.
        periph: an eigenvalue counts as peripheral when ``|lam| >= 1 - periph``.
        rank: relative singular-value cutoff (times the largest one) for kernels.
        herm: allowed anti-Hermitian part of matrices that should be Hermitian.
        fid: slack allowed when comparing fidelities to closed forms.
    """

    cptp: float = 1e-8
    periph: float = 1e-9
    rank: float = 1e-10
    herm: float = 1e-10
    fid: float = 1e-9

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ValueError(f"tolerance {field.name!r} must be strictly positive, got {value!r}")

    def replace(self, **overrides) -> "Tolerances":
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "Tolerances":
        """Defaults, then ``PERIPHERAL_TOL_<NAME>`` variables, then explicit overrides."""
        environ = os.environ if environ is None else environ
        values = {}
        for field in dataclasses.fields(cls):
            raw = environ.get(ENV_PREFIX + field.name.upper())
            if raw is not None:
                values[field.name] = float(raw)
        values.update({k: float(v) for k, v in overrides.items() if v is not None})
        return cls(**values)


DEFAULT = Tolerances()


def resolve(tol: Tolerances | None) -> Tolerances:
    return DEFAULT if tol is None else tol
