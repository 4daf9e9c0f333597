"""Channel representations and conversions.

Superoperators use row-major vectorization throughout: ``vec(X) = X.reshape(-1)``,
so that ``vec(A X B) = (A kron B^T) vec(X)``. A channel with Kraus operators
``K_i`` therefore has superoperator ``sum_i K_i kron conj(K_i)`` and
``T[(a, b), (i, j)] = <a| T(|i><j|) |b>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError
from .tolerances import Tolerances, resolve


def as_matrix(x, *, name="matrix") -> np.ndarray:
    """Convert to a finite 2-D complex128 array."""
    arr = np.asarray(x, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


def _sqrt_dim(n: int, what: str) -> int:
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise ValidationError(f"{what} size {n} is not a perfect square")
    return d


def vec(x: np.ndarray) -> np.ndarray:
    """Row-major vectorization."""
    return np.asarray(x).reshape(-1)


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if d is None:
        d = _sqrt_dim(v.size, "vector")
    return v.reshape(d, d)


@dataclass(frozen=True)
class KrausChannel:
    """A channel ``X -> sum_i K_i X K_i^dagger`` on ``M_d``."""

    kraus: tuple
    validate: bool = field(default=True, repr=False, compare=False)
    tol: Tolerances | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        ops = tuple(_frozen(as_matrix(k, name="Kraus operator")) for k in self.kraus)
        if not ops:
            raise ValidationError("a Kraus channel needs at least one operator")
        shape = ops[0].shape
        if shape[0] != shape[1]:
            raise ValidationError(f"Kraus operators must be square, got {shape}")
        for k in ops:
            if k.shape != shape:
                raise ValidationError(f"Kraus operator shapes differ: {shape} vs {k.shape}")
        object.__setattr__(self, "kraus", ops)
        if self.validate:
            tol = resolve(self.tol)
            err = self.trace_preservation_error()
            if err > tol.cptp:
                raise ValidationError(f"Kraus operators are not trace preserving (error {err:.3g})")

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def trace_preservation_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def apply(self, x: np.ndarray) -> np.ndarray:
        return sum(k @ x @ k.conj().T for k in self.kraus)


@dataclass(frozen=True)
class ChannelSuperOp:
    """Matrix of a linear map ``M_{dim_in} -> M_{dim_out}`` acting on ``vec``.

    Also used for GKLS generators, which share the representation but are not
    channels themselves.
    """

    matrix: np.ndarray
    validated: bool = False

    def __post_init__(self):
        m = _frozen(as_matrix(self.matrix, name="superoperator"))
        _sqrt_dim(m.shape[0], "superoperator row")
        _sqrt_dim(m.shape[1], "superoperator column")
        object.__setattr__(self, "matrix", m)

    @property
    def dim_in(self) -> int:
        return _sqrt_dim(self.matrix.shape[1], "superoperator column")

    @property
    def dim_out(self) -> int:
        return _sqrt_dim(self.matrix.shape[0], "superoperator row")

    @property
    def dim(self) -> int:
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValidationError("superoperator is not square; use dim_in / dim_out")
        return self.dim_in

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.dim_in, self.dim_in):
            raise ValidationError(f"operand has shape {x.shape}, expected {(self.dim_in, self.dim_in)}")
        return (self.matrix @ x.reshape(-1)).reshape(self.dim_out, self.dim_out)

    def __matmul__(self, other: "ChannelSuperOp") -> "ChannelSuperOp":
        return compose(self, other)

    def choi(self) -> np.ndarray:
        return choi_matrix(self)


@dataclass(frozen=True)
class LindbladGenerator:
    """GKLS generator ``X -> -i[H, X] + sum_j (L_j X L_j^+ - {L_j^+ L_j, X}/2)``."""

    hamiltonian: np.ndarray
    jumps: tuple = ()
    tol: Tolerances | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        h = _frozen(as_matrix(self.hamiltonian, name="Hamiltonian"))
        if h.shape[0] != h.shape[1]:
            raise ValidationError(f"Hamiltonian must be square, got {h.shape}")
        jumps = tuple(_frozen(as_matrix(j, name="jump operator")) for j in self.jumps)
        for j in jumps:
            if j.shape != h.shape:
                raise ValidationError(f"jump operator shape {j.shape} does not match Hamiltonian {h.shape}")
        tol = resolve(self.tol)
        herm_err = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
        if herm_err > tol.herm:
            raise ValidationError(f"Hamiltonian is not Hermitian (error {herm_err:.3g})")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


def _as_superop(t) -> ChannelSuperOp:
    if isinstance(t, ChannelSuperOp):
        return t
    if isinstance(t, KrausChannel):
        return kraus_to_superop(t)
    return ChannelSuperOp(t)


def kraus_to_superop(channel: KrausChannel | Sequence[np.ndarray]) -> ChannelSuperOp:
    """Superoperator ``sum_i K_i kron conj(K_i)``.

    A plain sequence of (possibly rectangular) matrices is accepted as well,
    which is how encoders ``M_D -> M_d`` are assembled.
    """
    if isinstance(channel, KrausChannel):
        ops = channel.kraus
        validated = True
    else:
        ops = [as_matrix(k, name="Kraus operator") for k in channel]
        if not ops:
            raise ValidationError("need at least one Kraus operator")
        for k in ops:
            if k.shape != ops[0].shape:
                raise ValidationError(f"Kraus operator shapes differ: {ops[0].shape} vs {k.shape}")
        validated = False
    out = np.zeros((ops[0].shape[0] ** 2, ops[0].shape[1] ** 2), dtype=complex)
    for k in ops:
        out += np.kron(k, k.conj())
    return ChannelSuperOp(out, validated=validated)


def lindblad_to_superop(gen: LindbladGenerator) -> ChannelSuperOp:
    """Matrix of the GKLS generator in the row-major convention."""
    d = gen.dim
    eye = np.eye(d)
    h = gen.hamiltonian
    out = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for lj in gen.jumps:
        ldl = lj.conj().T @ lj
        out += np.kron(lj, lj.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T)
    return ChannelSuperOp(out)


def superop_exp(generator: ChannelSuperOp, t: float = 1.0) -> ChannelSuperOp:
    """``exp(t L)`` by scaling and squaring (``scipy.linalg.expm``)."""
    if t < 0:
        raise ValidationError(f"time must be nonnegative, got {t}")
    m = generator.matrix
    if not m.imag.any():
        res = scipy.linalg.expm(t * m.real).astype(complex)
    else:
        res = scipy.linalg.expm(t * m)
    if not np.all(np.isfinite(res)):
        raise NumericalError("matrix exponential overflowed")
    return ChannelSuperOp(res)


def identity_superop(d: int) -> ChannelSuperOp:
    return ChannelSuperOp(np.eye(d * d), validated=True)


def unitary_superop(u) -> ChannelSuperOp:
    u = as_matrix(u, name="unitary")
    return ChannelSuperOp(np.kron(u, u.conj()), validated=True)


def compose(outer: ChannelSuperOp, inner: ChannelSuperOp) -> ChannelSuperOp:
    """Superoperator of ``outer o inner``; ``inner`` acts first."""
    t, s = _as_superop(outer), _as_superop(inner)
    if t.dim_in != s.dim_out:
        raise ValidationError(f"cannot compose: inner dimensions {t.dim_in} and {s.dim_out} differ")
    return ChannelSuperOp(t.matrix @ s.matrix, validated=t.validated and s.validated)


def power(t: ChannelSuperOp, n: int) -> ChannelSuperOp:
    """``T^n`` by repeated squaring; ``T^0`` is the identity."""
    t = _as_superop(t)
    if n < 0:
        raise ValidationError("power must be nonnegative")
    return ChannelSuperOp(np.linalg.matrix_power(t.matrix, int(n)), validated=t.validated)


def tensor(t: ChannelSuperOp, s: ChannelSuperOp) -> ChannelSuperOp:
    """Superoperator of ``T kron S`` acting on ``vec`` of the composite system."""
    t, s = _as_superop(t), _as_superop(s)
    ti, to, si, so = t.dim_in, t.dim_out, s.dim_in, s.dim_out
    t4 = t.matrix.reshape(to, to, ti, ti)
    s4 = s.matrix.reshape(so, so, si, si)
    out = np.einsum("abij,cfkl->acbfikjl", t4, s4, optimize=True)
    return ChannelSuperOp(out.reshape((to * so) ** 2, (ti * si) ** 2), validated=t.validated and s.validated)


def choi_matrix(t: ChannelSuperOp) -> np.ndarray:
    """Unnormalized Choi matrix ``sum_ij |i><j| kron T(|i><j|)`` (trace ``dim_in`` for channels)."""
    t = _as_superop(t)
    di, do = t.dim_in, t.dim_out
    return t.matrix.reshape(do, do, di, di).transpose(2, 0, 3, 1).reshape(di * do, di * do)


def superop_from_choi(choi: np.ndarray, dim_in: int, dim_out: int) -> ChannelSuperOp:
    c = np.asarray(choi).reshape(dim_in, dim_out, dim_in, dim_out)
    return ChannelSuperOp(c.transpose(1, 3, 0, 2).reshape(dim_out ** 2, dim_in ** 2))


def from_column_major(matrix: np.ndarray) -> ChannelSuperOp:
    """Convert a superoperator written for column-stacking ``vec`` to this convention."""
    m = as_matrix(matrix)
    do, di = _sqrt_dim(m.shape[0], "row"), _sqrt_dim(m.shape[1], "column")
    m4 = m.reshape(do, do, di, di)
    # column-major index (b, a) <-> row-major (a, b)
    return ChannelSuperOp(m4.transpose(1, 0, 3, 2).reshape(do * do, di * di))


@dataclass(frozen=True)
class ValidationReport:
    trace_preserving: bool
    completely_positive: bool
    max_violation: float
    tp_violation: float
    cp_violation: float

    @property
    def ok(self) -> bool:
        return self.trace_preserving and self.completely_positive


def trace_preservation_error(t: ChannelSuperOp) -> float:
    t = _as_superop(t)
    do = t.dim_out
    diag_rows = np.arange(do) * (do + 1)
    traced = t.matrix[diag_rows].sum(axis=0)
    return float(np.max(np.abs(traced - np.eye(t.dim_in).reshape(-1))))


def validate_cptp(t: ChannelSuperOp, tol: Tolerances | None = None) -> ValidationReport:
    """Check trace preservation and positivity of the Choi matrix."""
    tol = resolve(tol)
    t = _as_superop(t)
    tp = trace_preservation_error(t)
    choi = choi_matrix(t)
    herm_part = 0.5 * (choi + choi.conj().T)
    anti = float(np.max(np.abs(choi - choi.conj().T)))
    lam_min = float(np.linalg.eigvalsh(herm_part)[0])
    cp = max(0.0, -lam_min, anti)
    return ValidationReport(
        trace_preserving=tp <= tol.cptp,
        completely_positive=cp <= tol.cptp,
        max_violation=max(tp, cp),
        tp_violation=tp,
        cp_violation=cp,
    )


def require_cptp(t: ChannelSuperOp, tol: Tolerances | None = None) -> ChannelSuperOp:
    """Return ``t`` flagged as validated, or raise ``ValidationError``."""
    t = _as_superop(t)
    if t.validated:
        return t
    report = validate_cptp(t, tol)
    if not report.ok:
        raise ValidationError(
            f"map is not CPTP: trace-preservation error {report.tp_violation:.3g}, "
            f"Choi positivity error {report.cp_violation:.3g}"
        )
    return ChannelSuperOp(t.matrix, validated=True)


def kraus_from_superop(t: ChannelSuperOp, tol: Tolerances | None = None) -> list[np.ndarray]:
    """Kraus operators from the eigendecomposition of the Choi matrix."""
    tol = resolve(tol)
    t = _as_superop(t)
    di, do = t.dim_in, t.dim_out
    choi = choi_matrix(t)
    w, v = np.linalg.eigh(0.5 * (choi + choi.conj().T))
    ops = []
    for lam, vecs in zip(w[::-1], v[:, ::-1].T):
        if lam <= tol.cptp * max(1.0, w[-1]):
            break
        # vecs is indexed (i, a); K[a, i]
        ops.append(np.sqrt(lam) * vecs.reshape(di, do).T)
    return ops


def superop_of(channel: KrausChannel | ChannelSuperOp | Iterable) -> ChannelSuperOp:
    return _as_superop(channel)
