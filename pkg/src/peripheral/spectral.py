"""Spectra of superoperators and the peripheral projection channel."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channel import ChannelSuperOp, _as_superop, require_cptp, superop_exp
from .errors import AmbiguousSpectrumError, ConvergenceError, IllConditionedError
from .linalg import LinearSpan, cluster_values, hermitian_basis, orthonormal_columns
from .tolerances import Tolerances, resolve

# eigenvalues closer than this are one cluster; merging is harmless for
# spectral projectors whereas splitting a true degenerate cluster is not
CLUSTER_TOL = 1e-6
# 1 - |lam| in [periph, AMBIGUITY_FACTOR * periph) cannot be classified
AMBIGUITY_FACTOR = 10.0
MAX_GRAM_CONDITION = 1e12


class PeripheralWarning(UserWarning):
    """Emitted when an eigenvalue is counted as peripheral but lies visibly inside the disk."""


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    labels: np.ndarray

    def clusters(self):
        """Yield ``(mean eigenvalue, indices)`` per cluster label."""
        for lab in np.unique(self.labels):
            idx = np.flatnonzero(self.labels == lab)
            yield complex(self.eigenvalues[idx].mean()), idx


@dataclass(frozen=True)
class PeripheralProjectionChannel:
    """The idempotent channel ``T_P`` onto the peripheral eigenspace of ``T``.

    ``range_basis`` holds orthonormal columns spanning the range of ``T_P``
    (the vectorized peripheral subspace); its width is ``rank``.
    ``phases`` lists the distinct unit-modulus cluster values with their
    multiplicities.
    """

    dim: int
    matrix: np.ndarray
    peripheral_eigenvalues: np.ndarray
    range_basis: np.ndarray
    phases: tuple = ()

    @property
    def rank(self) -> int:
        return int(self.range_basis.shape[1])

    @property
    def superop(self) -> ChannelSuperOp:
        return ChannelSuperOp(self.matrix, validated=True)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (self.matrix @ np.asarray(x).reshape(-1)).reshape(self.dim, self.dim)


def eig_decompose(t: ChannelSuperOp, tol: Tolerances | None = None, cluster_tol: float = CLUSTER_TOL) -> Spectrum:
    """Full nonsymmetric eigendecomposition with left and right vectors.

    Left vectors follow the LAPACK convention ``w^dagger T = lam w^dagger``.
    """
    m = _as_superop(t).matrix
    try:
        if not m.imag.any():
            w, vl, vr = scipy.linalg.eig(m.real, left=True, right=True)
        else:
            w, vl, vr = scipy.linalg.eig(m, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise ConvergenceError("eigensolver returned non-finite eigenvalues")
    labels = cluster_values(w, cluster_tol)
    return Spectrum(w, vr.astype(complex), vl.astype(complex), labels)


def _classify(moduli: np.ndarray, tol: Tolerances) -> np.ndarray:
    gap = 1.0 - moduli
    ambiguous = (gap >= tol.periph) & (gap < AMBIGUITY_FACTOR * tol.periph)
    if ambiguous.any():
        raise AmbiguousSpectrumError(moduli[ambiguous])
    periph = gap < tol.periph
    soft = periph & (gap > 0.1 * tol.periph)
    if soft.any():
        warnings.warn(
            f"{int(soft.sum())} eigenvalue(s) with modulus down to {moduli[soft].min():.15g} "
            "treated as peripheral",
            PeripheralWarning,
            stacklevel=3,
        )
    return np.flatnonzero(periph)


def peripheral_projection(
    t: ChannelSuperOp,
    tol: Tolerances | None = None,
    *,
    refine_passes: int = 2,
    spectrum: Spectrum | None = None,
    check: bool = True,
) -> PeripheralProjectionChannel:
    """Sum of the spectral projectors of all unit-modulus eigenvalue clusters.

    Each cluster's right and left eigenvectors are polished by a few passes of
    ``V <- T V / lam`` (and the adjoint for ``W``) before the projector
    ``V (W^dagger V)^{-1} W^dagger`` is formed. Subdominant components decay by
    ``|mu|`` per pass, which shaves the eigensolver noise noticeably on
    channels with large transient parts.
    """
    tol = resolve(tol)
    t = _as_superop(t)
    if check:
        t = require_cptp(t, tol)
    m = t.matrix
    d = t.dim
    sp = eig_decompose(t, tol) if spectrum is None else spectrum
    idx = _classify(np.abs(sp.eigenvalues), tol)
    lam = sp.eigenvalues[idx]
    labels = cluster_values(lam, CLUSTER_TOL)
    proj = np.zeros_like(m, dtype=complex)
    ranges = []
    phases = []
    mh = m.conj().T
    for lab in np.unique(labels):
        sel = idx[labels == lab]
        lc = complex(sp.eigenvalues[sel].mean())
        lc /= abs(lc)
        v = sp.right_vectors[:, sel]
        w = sp.left_vectors[:, sel]
        v, _ = np.linalg.qr(v)
        w, _ = np.linalg.qr(w)
        for _ in range(refine_passes):
            v, _ = np.linalg.qr(m @ v / lc)
            w, _ = np.linalg.qr(mh @ w / np.conj(lc))
        gram = w.conj().T @ v
        cond = float(np.linalg.cond(gram))
        if not np.isfinite(cond) or cond > MAX_GRAM_CONDITION:
            raise IllConditionedError(f"biorthogonal Gram matrix for eigenvalue {lc:.6g} is singular", cond)
        proj += v @ np.linalg.solve(gram, w.conj().T)
        ranges.append(v)
        phases.append((lc, len(sel)))
    if ranges:
        basis = orthonormal_columns(np.concatenate(ranges, axis=1), rank=len(idx))
    else:
        basis = np.zeros((d * d, 0), dtype=complex)
    if not m.imag.any():
        # a real channel has a real T_P; drop the imaginary round-off
        proj = proj.real.astype(complex)
    proj.setflags(write=False)
    return PeripheralProjectionChannel(d, proj, lam.copy(), basis, tuple(phases))


def averaged_projection(t: ChannelSuperOp, period: int = 1, terms: int = 2000) -> np.ndarray:
    """Debug cross-check: Cesaro mean ``(1/M) sum_m T^(m * period)``.

    Converges to ``T_P`` only when ``period`` is a multiple of every
    peripheral phase order, and only at rate ``1/M``.
    """
    m = _as_superop(t).matrix
    step = np.linalg.matrix_power(m, period)
    acc = np.zeros_like(m, dtype=complex)
    cur = np.eye(m.shape[0], dtype=complex)
    for _ in range(terms):
        acc += cur
        cur = step @ cur
    return acc / terms


def imaginary_axis_spectrum(generator: ChannelSuperOp, tol: Tolerances | None = None):
    """Eigenvalues of a GKLS generator on the imaginary axis and their eigenvectors.

    The axis threshold scales with the spectral radius of the generator, since
    the eigensolver's absolute error does.
    """
    tol = resolve(tol)
    m = _as_superop(generator).matrix
    try:
        w, vr = scipy.linalg.eig(m.real if not m.imag.any() else m, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    sel = np.flatnonzero(np.abs(w.real) <= tol.periph * scale)
    return w[sel], vr[:, sel].astype(complex)


def qms_peripheral_generators(generator: ChannelSuperOp, tol: Tolerances | None = None) -> LinearSpan:
    """Hermitian span of the eigen-operators of ``L`` with purely imaginary eigenvalue."""
    tol = resolve(tol)
    lam, vecs = imaginary_axis_spectrum(generator, tol)
    d = int(round(np.sqrt(generator.matrix.shape[0])))
    mats = [vecs[:, i].reshape(d, d) for i in range(len(lam))]
    # the span is closed under adjoints, so its Hermitian basis has the same size
    gens = hermitian_basis(mats, d, rank=len(lam)) if mats else []
    return LinearSpan(d, tuple(gens), hermitian=True)


def qms_unit_eigenvalues(generator: ChannelSuperOp, t: float = 1.0, tol: Tolerances | None = None) -> np.ndarray:
    """``exp(i theta t)`` for every imaginary-axis eigenvalue ``i theta`` of the generator."""
    lam, _ = imaginary_axis_spectrum(generator, tol)
    return np.exp(1j * lam.imag * t)


def peripheral_of_semigroup(generator: ChannelSuperOp, t: float = 1.0, tol: Tolerances | None = None):
    """``T_P`` of ``exp(t L)``."""
    return peripheral_projection(superop_exp(generator, t), tol, check=False)
