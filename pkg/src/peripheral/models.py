"""Channels used as worked examples: collective qubit noise and bosonic cat codes."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .channel import (
    ChannelSuperOp,
    KrausChannel,
    LindbladGenerator,
    compose,
    kraus_to_superop,
    lindblad_to_superop,
    superop_exp,
    trace_preservation_error,
)
from .errors import ValidationError
from .tolerances import Tolerances, resolve

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
MAX_QUBITS = 8


def collective_pauli(n: int, axis: str) -> np.ndarray:
    """``sum_k I x ... x sigma_axis (k-th) x ... x I`` on ``n`` qubits."""
    eye = np.eye(2)
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for k in range(n):
        factors = [eye] * n
        factors[k] = PAULI[axis]
        out += reduce(np.kron, factors)
    return out


def _expi_hermitian(h: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh(h)
    return (v * np.exp(1j * lam)) @ v.conj().T


def collective_noise(n: int) -> KrausChannel:
    """Kraus operators ``exp(i sigma_j^(n)) / sqrt(3)`` for ``j = x, y, z``."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValidationError(f"collective noise supports 1 <= n <= {MAX_QUBITS} qubits, got {n}")
    return KrausChannel(tuple(_expi_hermitian(collective_pauli(n, ax)) / np.sqrt(3) for ax in "xyz"))


@dataclass(frozen=True)
class FockTruncation:
    """Photon-number cutoff ``n_max`` (dimension ``n_max + 1``) and cat amplitude ``alpha``."""

    n_max: int
    alpha: complex = 2.0

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValidationError(f"n_max must be a positive integer, got {self.n_max}")
        if self.n_max < 4 * abs(self.alpha) ** 2:
            warnings.warn(
                f"n_max={self.n_max} is below 4|alpha|^2={4 * abs(self.alpha) ** 2:.3g}; truncation error may be large",
                RuntimeWarning,
                stacklevel=3,
            )

    @property
    def dim(self) -> int:
        return int(self.n_max) + 1


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def coherent_state(trunc: FockTruncation, beta: complex) -> np.ndarray:
    """Coherent state on the truncated space, renormalized after truncation."""
    n = np.arange(trunc.dim)
    logfact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, trunc.dim)))])
    if beta == 0:
        v = (n == 0).astype(complex)
    else:
        v = np.exp(n * np.log(complex(beta)) - 0.5 * logfact)
    return v / np.linalg.norm(v)


def cat_basis(trunc: FockTruncation, n: int) -> np.ndarray:
    """Columns ``psi_i = sum_j w^{ij} |w^j |alpha|>`` with ``w = exp(2 pi i / n)``, normalized."""
    w = np.exp(2j * np.pi / n)
    coh = [coherent_state(trunc, w ** j * abs(trunc.alpha)) for j in range(n)]
    cols = []
    for i in range(n):
        psi = sum(w ** (i * j) * coh[j] for j in range(n))
        cols.append(psi / np.linalg.norm(psi))
    return np.stack(cols, axis=1)


def cat_code_generator(trunc: FockTruncation, n: int) -> LindbladGenerator:
    """Single jump ``a^n - alpha^n I``, no Hamiltonian."""
    if n < 1:
        raise ValidationError("the number of cat components must be positive")
    d = trunc.dim
    jump = np.linalg.matrix_power(annihilation(d), n) - complex(trunc.alpha) ** n * np.eye(d)
    return LindbladGenerator(np.zeros((d, d)), (jump,))


def photon_loss_kraus(p: float, dim: int) -> list[np.ndarray]:
    """Lose at most one photon: ``sqrt(p) I``, ``sqrt(1-p) a_shift`` and ``sqrt(1-p)|0><0|``."""
    if not 0 <= p <= 1:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    shift = np.diag(np.ones(dim - 1), 1).astype(complex)
    vac = np.zeros((dim, dim), dtype=complex)
    vac[0, 0] = 1
    return [np.sqrt(p) * np.eye(dim), np.sqrt(1 - p) * shift, np.sqrt(1 - p) * vac]


def parity_recovery_kraus(dim: int) -> list[np.ndarray]:
    """``sum |2m+1><2m|`` and ``sum |2m+1><2m+1|``, completed on an odd dimension.

    When the top Fock level ``dim - 1`` is even it has no odd partner inside
    the cutoff; a third operator sends it to ``|dim - 2>``, which keeps the
    map trace preserving and still lands in the odd-parity sector.
    """
    r1 = np.zeros((dim, dim), dtype=complex)
    r2 = np.zeros((dim, dim), dtype=complex)
    for m in range(0, dim - 1, 2):
        r1[m + 1, m] = 1
        r2[m + 1, m + 1] = 1
    ops = [r1, r2]
    if dim % 2 == 1:
        r3 = np.zeros((dim, dim), dtype=complex)
        r3[dim - 2, dim - 1] = 1
        ops.append(r3)
    return ops


def photon_loss_recovery_channel(
    p: float,
    trunc: FockTruncation,
    n: int = 4,
    t_tilde: float = 1.0,
    tol: Tolerances | None = None,
) -> ChannelSuperOp:
    """``R o N o exp(t L)`` for cat-code dissipation ``L``, loss ``N`` and recovery ``R``."""
    tol = resolve(tol)
    d = trunc.dim
    lhat = lindblad_to_superop(cat_code_generator(trunc, n))
    evo = superop_exp(lhat, t_tilde)
    noise = kraus_to_superop(KrausChannel(tuple(photon_loss_kraus(p, d)), tol=tol))
    rec = kraus_to_superop(KrausChannel(tuple(parity_recovery_kraus(d)), tol=tol))
    out = compose(rec, compose(noise, evo))
    err = trace_preservation_error(out)
    if err > tol.cptp:
        raise ValidationError(
            f"truncated channel violates trace preservation by {err:.3g}; try n_max={2 * trunc.n_max}"
        )
    return ChannelSuperOp(out.matrix)


def amplitude_damping(gamma: float) -> KrausChannel:
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel((k0, k1))


def cycle_channel(n: int) -> KrausChannel:
    """Classical cyclic shift ``|i> -> |i+1 mod n>`` embedded as a channel."""
    ops = []
    for i in range(n):
        k = np.zeros((n, n), dtype=complex)
        k[(i + 1) % n, i] = 1
        ops.append(k)
    return KrausChannel(tuple(ops))


def depolarizing(d: int) -> ChannelSuperOp:
    """Complete depolarization ``X -> tr(X) I/d``."""
    eye = np.eye(d).reshape(-1)
    return ChannelSuperOp(np.outer(eye, eye) / d, validated=True)
