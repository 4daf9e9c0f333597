"""Small dense linear-algebra helpers shared by the spectral and algebra stages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class LinearSpan:
    """Linearly independent ``d x d`` matrices spanning a subspace of ``M_d``."""

    dim: int
    generators: tuple
    hermitian: bool = False

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        for g in gens:
            if g.shape != (self.dim, self.dim):
                raise ValidationError(f"generator shape {g.shape} does not match dim {self.dim}")
            g.setflags(write=False)
        object.__setattr__(self, "generators", gens)

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def matrix(self) -> np.ndarray:
        """Generators as the columns of a ``d^2 x N`` matrix."""
        if not self.generators:
            return np.zeros((self.dim * self.dim, 0), dtype=complex)
        return np.stack([g.reshape(-1) for g in self.generators], axis=1)

    def conjugated(self, w: np.ndarray) -> "LinearSpan":
        """Span of ``w g w^dagger``; with ``w`` an isometry this lifts or restricts."""
        w = np.asarray(w)
        return LinearSpan(w.shape[0], tuple(w @ g @ w.conj().T for g in self.generators), self.hermitian)


def rank_cutoff(singular_values: np.ndarray, rel: float) -> int:
    if singular_values.size == 0 or singular_values[0] == 0:
        return 0
    return int(np.count_nonzero(singular_values > rel * singular_values[0]))


def orthonormal_columns(m: np.ndarray, rel: float = 1e-10, rank: int | None = None) -> np.ndarray:
    """Orthonormal basis of the column space of ``m``."""
    if m.shape[1] == 0:
        return m
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = rank_cutoff(s, rel) if rank is None else rank
    return u[:, :r]


def hermitian_basis(mats, d: int, rel: float = 1e-10, rank: int | None = None) -> list[np.ndarray]:
    """Hermitian matrices whose complex span equals the span of ``mats`` and their adjoints.

    Works over the reals: each Hermitian matrix is flattened to the real vector
    ``(Re, Im)``, so real combinations of the SVD stay Hermitian. When ``rank``
    is given it fixes the number of returned generators instead of the
    relative singular-value cutoff.
    """
    herms = []
    for a in mats:
        a = np.asarray(a)
        herms.append(a + a.conj().T)
        herms.append(1j * (a - a.conj().T))
    if not herms:
        return []
    real = np.stack([np.concatenate([h.real.reshape(-1), h.imag.reshape(-1)]) for h in herms], axis=1)
    u, s, _ = np.linalg.svd(real, full_matrices=False)
    r = rank_cutoff(s, rel) if rank is None else rank
    out = []
    for k in range(r):
        col = u[:, k]
        h = (col[: d * d] + 1j * col[d * d:]).reshape(d, d)
        out.append(0.5 * (h + h.conj().T))
    return out


def psd_kernel(g: np.ndarray, rel: float, scale: float = 0.0) -> np.ndarray:
    """Columns spanning the numerical kernel of a Hermitian PSD matrix.

    The cutoff is ``rel * max(largest eigenvalue, scale)``; pass the natural
    size of ``g`` as ``scale`` when ``g`` may be zero up to round-off.
    """
    w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
    top = max(float(w[-1]), 0.0) if w.size else 0.0
    cut = rel * max(top, scale)
    if cut == 0.0:
        return v
    return v[:, w <= cut]


def commutator_gram(gens) -> np.ndarray:
    """``sum_i (A_i kron I - I kron A_i^T)^dagger (A_i kron I - I kron A_i^T)``.

    Expanded into four Kronecker terms so no ``d^2 x d^2`` products are formed.
    Its kernel is the row-major ``vec`` of the commutant of ``{A_i}``.
    """
    gens = list(gens)
    d = gens[0].shape[0]
    eye = np.eye(d)
    g = np.zeros((d * d, d * d), dtype=complex)
    for a in gens:
        ah = a.conj().T
        g += np.kron(ah @ a, eye)
        g -= np.kron(ah, a.T)
        g -= np.kron(a, a.conj())
        g += np.kron(eye, a.conj() @ a.T)
    return g


def gram_scale(gens) -> float:
    """Natural size of a commutator Gram matrix: ``sum_i ||A_i||_F^2``."""
    return float(sum(np.vdot(a, a).real for a in gens))


def span_residual(x: np.ndarray, basis: np.ndarray) -> float:
    """Distance of ``vec(x)`` from the column span of the orthonormal ``basis``."""
    v = np.asarray(x).reshape(-1)
    if basis.shape[1] == 0:
        return float(np.linalg.norm(v))
    return float(np.linalg.norm(v - basis @ (basis.conj().T @ v)))


def projector_from_vectors(vecs: np.ndarray) -> np.ndarray:
    return vecs @ vecs.conj().T


def cluster_values(values: np.ndarray, tol: float) -> np.ndarray:
    """Greedy clustering: labels such that each cluster lies within ``tol`` of its seed."""
    values = np.asarray(values)
    labels = np.full(values.shape[0], -1, dtype=int)
    nxt = 0
    for i in range(values.shape[0]):
        if labels[i] >= 0:
            continue
        close = (labels < 0) & (np.abs(values - values[i]) <= tol)
        labels[close] = nxt
        nxt += 1
    return labels


def partial_trace_first(y: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """Trace out the first factor of an operator on ``C^d1 kron C^d2``."""
    return np.einsum("ijik->jk", y.reshape(d1, d2, d1, d2))


def partial_trace_second(y: np.ndarray, d1: int, d2: int) -> np.ndarray:
    return np.einsum("ijkj->ik", y.reshape(d1, d2, d1, d2))


def polar_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh
