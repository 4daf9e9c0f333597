"""Decomposition of the peripheral space into matrix blocks.

The peripheral space of a channel has the form ``0 + sum_k M_{d_k} kron omega_k``
on ``H = H_0 + sum_k H_{k,1} kron H_{k,2}``. The pipeline below recovers it:

1. ``T_P`` and a Hermitian basis of its range (the peripheral space ``chi``);
2. restrict to the support of ``rho = T_P(I/d)`` and undistort with
   ``rho^{-1/2} . rho^{-1/2}``, which turns ``chi`` into the unital algebra
   ``A = sum_k M_{d_k} kron I``;
3. the center of ``A`` from the kernel of commutator Gram matrices;
4. minimal central projections (blocks), then minimal projections in each
   block, by repeated spectral splitting;
5. an adapted orthonormal basis ``e_{k,i,j}`` and the densities ``omega_k``.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSuperOp, _as_superop, require_cptp
from .errors import ConvergenceError, NumericalError, ValidationError
from .linalg import (
    LinearSpan,
    commutator_gram,
    gram_scale,
    hermitian_basis,
    partial_trace_first,
    polar_unitary,
    psd_kernel,
)
from .spectral import PeripheralProjectionChannel, peripheral_projection
from .tolerances import Tolerances, resolve

__all__ = [
    "LinearSpan",
    "OrthogonalProjection",
    "Block",
    "PeripheralStructure",
    "fixed_point_span",
    "undistort",
    "commutant_span",
    "center_span",
    "reduce_projection",
    "find_one_minimal",
    "decompose_minimal",
    "construct_basis",
    "fixed_densities",
    "extract_structure",
    "structure_from_dims",
]

# eigenvalues of a compressed generator closer than this (relative) are one cluster
SPLIT_TOL = 1e-6
ROUNDING_LIMIT = 0.1
# support threshold for rho = T_P(I/d), relative to its largest eigenvalue
SUPPORT_TOL = 1e-8


@dataclass(frozen=True)
class OrthogonalProjection:
    dim: int
    matrix: np.ndarray
    rank: int

    @classmethod
    def from_vectors(cls, v: np.ndarray) -> "OrthogonalProjection":
        return cls(v.shape[0], v @ v.conj().T, v.shape[1])

    @classmethod
    def identity(cls, d: int) -> "OrthogonalProjection":
        return cls(d, np.eye(d, dtype=complex), d)

    def range_vectors(self) -> np.ndarray:
        w, v = np.linalg.eigh(0.5 * (self.matrix + self.matrix.conj().T))
        return v[:, w > 0.5]


@dataclass(frozen=True)
class Block:
    """One summand ``M_{d_k} kron omega_k``.

    ``basis`` has the vectors ``e_{k,i,j}`` as columns, ordered with ``j``
    fastest, so ``basis @ (x kron y) @ basis^dagger`` embeds ``x kron y``.
    """

    d: int
    d_prime: int
    basis: np.ndarray | None = field(default=None, repr=False, compare=False)
    omega: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.d * self.d_prime

    def vector(self, i: int, j: int) -> np.ndarray:
        return self.basis[:, i * self.d_prime + j]

    def embed(self, x: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
        y = self.omega if y is None else y
        return self.basis @ np.kron(x, y) @ self.basis.conj().T

    def compress(self, x: np.ndarray) -> np.ndarray:
        """``x`` restricted to the block, as a ``d d' x d d'`` matrix."""
        return self.basis.conj().T @ x @ self.basis


@dataclass(frozen=True)
class PeripheralStructure:
    dim: int
    h0_dim: int
    blocks: tuple
    peripheral: PeripheralProjectionChannel | None = field(default=None, repr=False, compare=False)
    algebra: LinearSpan | None = field(default=None, repr=False, compare=False)
    timings: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dims(self) -> list[tuple[int, int]]:
        return [(b.d, b.d_prime) for b in self.blocks]

    @property
    def sum_dk(self) -> int:
        return sum(b.d for b in self.blocks)

    @property
    def max_dk(self) -> int:
        return max((b.d for b in self.blocks), default=0)

    @property
    def chi_dim(self) -> int:
        return sum(b.d * b.d for b in self.blocks)

    def basis_matrix(self) -> np.ndarray:
        return np.concatenate([b.basis for b in self.blocks], axis=1)


def structure_from_dims(dims, dim: int | None = None) -> PeripheralStructure:
    """Dimension-only structure, e.g. for capacity arithmetic."""
    blocks = tuple(sorted((Block(int(a), int(b)) for a, b in dims), key=lambda b: (-b.d, -b.d_prime)))
    for b in blocks:
        if b.d < 1 or b.d_prime < 1:
            raise ValidationError(f"block dimensions must be positive, got {(b.d, b.d_prime)}")
    total = sum(b.size for b in blocks)
    dim = total if dim is None else int(dim)
    if dim < total:
        raise ValidationError(f"blocks need {total} dimensions but dim is {dim}")
    return PeripheralStructure(dim, dim - total, blocks)


def fixed_point_span(tp: PeripheralProjectionChannel, tol: Tolerances | None = None) -> LinearSpan:
    """Hermitian basis of the range of ``T_P``."""
    d = tp.dim
    mats = [tp.range_basis[:, i].reshape(d, d) for i in range(tp.rank)]
    gens = hermitian_basis(mats, d, rank=tp.rank) if mats else []
    return LinearSpan(d, tuple(gens), hermitian=True)


def undistort(span: LinearSpan, tp: PeripheralProjectionChannel):
    """Map ``chi`` to a unital algebra on the support of ``T_P(I/d)``.

    Returns ``(w, gens)`` with ``w`` a ``d x r`` isometry onto the support
    and ``gens`` Hermitian ``r x r`` matrices spanning the algebra.
    """
    d = tp.dim
    rho = tp.apply(np.eye(d) / d)
    rho = 0.5 * (rho + rho.conj().T)
    lam, vecs = np.linalg.eigh(rho)
    if lam[-1] <= 0:
        raise NumericalError("T_P(I/d) is not positive; the channel is not trace preserving")
    keep = lam > SUPPORT_TOL * lam[-1]
    if np.any(lam < -SUPPORT_TOL * lam[-1]):
        raise NumericalError(f"T_P(I/d) has a negative eigenvalue {lam[0]:.3g}")
    w = vecs[:, keep]
    s = 1.0 / np.sqrt(lam[keep])
    gens = []
    for x in span.generators:
        a = s[:, None] * (w.conj().T @ x @ w) * s[None, :]
        gens.append(0.5 * (a + a.conj().T))
    return w, LinearSpan(w.shape[1], tuple(gens), hermitian=True)


def commutant_span(gens: LinearSpan, tol: Tolerances | None = None) -> LinearSpan:
    """Commutant of the generators, from the kernel of the commutator Gram matrix."""
    tol = resolve(tol)
    if len(gens) == 0:
        raise ValidationError("need at least one generator")
    d = gens.dim
    ker = psd_kernel(commutator_gram(gens.generators), tol.rank, gram_scale(gens.generators))
    return LinearSpan(d, tuple(ker[:, i].reshape(d, d) for i in range(ker.shape[1])))


def center_span(gens: LinearSpan, tol: Tolerances | None = None) -> LinearSpan:
    """Center ``A cap A'``: kernel of ``Gamma_A + Gamma_B`` with ``B`` spanning ``A'``.

    Valid when ``gens`` span a unital *-algebra, so that ``A'' = A``.
    """
    tol = resolve(tol)
    comm = commutant_span(gens, tol)
    d = gens.dim
    g = commutator_gram(gens.generators) + commutator_gram(comm.generators)
    ker = psd_kernel(g, tol.rank, gram_scale(gens.generators) + gram_scale(comm.generators))
    mats = [ker[:, i].reshape(d, d) for i in range(ker.shape[1])]
    return LinearSpan(d, tuple(hermitian_basis(mats, d, rank=len(mats))), hermitian=True)


def _split(c: np.ndarray):
    """Eigen-clusters of a Hermitian matrix as lists of eigenvector columns."""
    lam, vecs = np.linalg.eigh(0.5 * (c + c.conj().T))
    scale = max(1.0, float(np.max(np.abs(lam))))
    cut = SPLIT_TOL * scale
    groups = [[0]]
    for i in range(1, len(lam)):
        if lam[i] - lam[groups[-1][-1]] <= cut:
            groups[-1].append(i)
        else:
            groups.append([i])
    for g in groups:
        spread = lam[g[-1]] - lam[g[0]]
        if spread > 1e-3 * cut:
            warnings.warn(
                f"merging eigenvalues spread by {spread:.3g} into one spectral projection",
                RuntimeWarning,
                stacklevel=3,
            )
    return [vecs[:, g] for g in groups]


def reduce_projection(p: OrthogonalProjection, gens: LinearSpan) -> OrthogonalProjection:
    """Return a strictly smaller projection in the algebra below ``p``, or ``p`` if minimal.

    The first generator (in order) whose compression to ``p`` is not a
    multiple of ``p`` is diagonalized; its spectral projection of smallest
    rank is returned, which has at most half the rank of ``p``.
    """
    if p.rank <= 1:
        return p
    v = p.range_vectors()
    for a in gens.generators:
        c = v.conj().T @ a @ v
        groups = _split(c)
        if len(groups) > 1:
            best = min(groups, key=lambda g: g.shape[1])
            return OrthogonalProjection.from_vectors(v @ best)
    return p


def _is_minimal(p: OrthogonalProjection, gens: LinearSpan, tol: float = 1e-7) -> bool:
    v = p.range_vectors()
    for a in gens.generators:
        c = v.conj().T @ a @ v
        scalar = np.trace(c) / c.shape[0]
        if np.linalg.norm(c - scalar * np.eye(c.shape[0])) > tol * max(1.0, np.linalg.norm(a)):
            return False
    return True


def find_one_minimal(p: OrthogonalProjection, gens: LinearSpan) -> OrthogonalProjection:
    """Iterate ``reduce_projection`` until the rank stops dropping."""
    for _ in range(2 * max(1, p.dim).bit_length() + 4):
        q = reduce_projection(p, gens)
        if q.rank == p.rank:
            return p
        p = q
    raise ConvergenceError("projection reduction did not reach a minimal projection")


def _round_projection(m: np.ndarray) -> OrthogonalProjection:
    lam, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    bad = (lam > ROUNDING_LIMIT) & (lam < 1 - ROUNDING_LIMIT)
    if bad.any():
        raise ConvergenceError(f"P - Q is not a projection: eigenvalue {lam[bad][0]:.3g}")
    return OrthogonalProjection.from_vectors(vecs[:, lam > 0.5])


def decompose_minimal(p: OrthogonalProjection, gens: LinearSpan) -> list[OrthogonalProjection]:
    """Split ``p`` into mutually orthogonal minimal projections of the algebra."""
    out = []
    while p.rank > 0:
        q = find_one_minimal(p, gens)
        out.append(q)
        p = _round_projection(p.matrix - q.matrix)
    return out


def construct_basis(gens: LinearSpan, minimals_per_block, tol: Tolerances | None = None) -> list[np.ndarray]:
    """Adapted bases, one ``r x (d_k d'_k)`` matrix per block.

    For the ``n``-th minimal projection of a block, ``Q_n A Q_1`` for a
    generator ``A`` is a multiple of a partial isometry from ``Q_1`` to
    ``Q_n``; its unitary polar factor fixes how the ``j`` index of ``Q_n``
    lines up with that of ``Q_1``. The generator with the largest such
    overlap is used.
    """
    tol = resolve(tol)
    bases = []
    for minimals in minimals_per_block:
        vecs = [q.range_vectors() for q in minimals]
        first = vecs[0]
        cols = [first]
        for vn in vecs[1:]:
            best, best_norm = None, 0.0
            for a in gens.generators:
                m = vn.conj().T @ a @ first
                nrm = float(np.linalg.norm(m))
                if nrm > best_norm:
                    best, best_norm = m, nrm
            scale = max(float(np.linalg.norm(a)) for a in gens.generators)
            if best is None or best_norm <= tol.rank * scale:
                raise NumericalError("no generator links two minimal projections of the same block")
            cols.append(vn @ polar_unitary(best))
        dk, dp = len(vecs), first.shape[1]
        # columns ordered (i, j) with j fastest
        basis = np.stack(cols, axis=1).reshape(first.shape[0], dk * dp)
        bases.append(basis)
    return bases


def fixed_densities(tp: PeripheralProjectionChannel, blocks, tol: Tolerances | None = None) -> list[np.ndarray]:
    """``omega_k`` from ``T_P(|e_{k,1,1}><e_{k,1,1}|) = x kron omega_k``."""
    tol = resolve(tol)
    out = []
    for b in blocks:
        if b.d_prime == 1:
            out.append(np.ones((1, 1), dtype=complex))
            continue
        omegas = []
        for j in (0, 1):
            e = b.vector(0, j)
            y = b.compress(tp.apply(np.outer(e, e.conj())))
            om = partial_trace_first(y, b.d, b.d_prime)
            om = 0.5 * (om + om.conj().T)
            tr = np.trace(om).real
            if tr <= tol.herm:
                raise NumericalError("fixed density has vanishing trace; the block basis is inconsistent")
            om = om / tr
            low = float(np.linalg.eigvalsh(om)[0])
            if low < -max(tol.herm, 1e-9):
                raise NumericalError(f"fixed density is not positive (eigenvalue {low:.3g})")
            omegas.append(om)
        diff = float(np.max(np.abs(omegas[0] - omegas[1])))
        if diff > 1e-7:
            raise NumericalError(f"fixed density depends on the seed state (difference {diff:.3g})")
        out.append(omegas[0])
    return out


def extract_structure(
    t: ChannelSuperOp,
    tol: Tolerances | None = None,
    *,
    peripheral: PeripheralProjectionChannel | None = None,
    check: bool = True,
) -> PeripheralStructure:
    """Full decomposition of the peripheral space of a channel."""
    tol = resolve(tol)
    t = _as_superop(t)
    timings = {}
    clock = time.perf_counter()

    def lap(name):
        nonlocal clock
        now = time.perf_counter()
        timings[name] = 1e3 * (now - clock)
        clock = now

    if check:
        t = require_cptp(t, tol)
        lap("validate")
    tp = peripheral if peripheral is not None else peripheral_projection(t, tol, check=False)
    lap("peripheral_projection")
    d = tp.dim
    if tp.rank == 0:
        raise NumericalError("no peripheral eigenvalue found; a channel always has eigenvalue 1")
    span = fixed_point_span(tp, tol)
    w, alg = undistort(span, tp)
    lap("fixed_point_span")
    center = center_span(alg, tol)
    lap("center")
    r = w.shape[1]
    central = decompose_minimal(OrthogonalProjection.identity(r), center)
    lap("central_projections")
    per_block = [decompose_minimal(p, alg) for p in central]
    for p, mins in zip(central, per_block):
        ranks = {q.rank for q in mins}
        if len(ranks) != 1 or len(mins) * ranks.pop() != p.rank:
            raise NumericalError(f"minimal projections of a block have unequal ranks {[q.rank for q in mins]}")
    lap("minimal_projections")
    bases = construct_basis(alg, per_block, tol)
    lap("basis")
    blocks = [Block(len(mins), mins[0].rank, w @ basis) for mins, basis in zip(per_block, bases)]
    counted = sum(b.d * b.d for b in blocks)
    if counted != tp.rank:
        raise NumericalError(f"blocks account for {counted} peripheral dimensions but T_P has rank {tp.rank}")
    omegas = fixed_densities(tp, blocks, tol)
    lap("fixed_densities")
    blocks = [Block(b.d, b.d_prime, b.basis, om) for b, om in zip(blocks, omegas)]
    blocks.sort(key=lambda b: (-b.d, -b.d_prime))
    h0 = d - sum(b.size for b in blocks)
    return PeripheralStructure(d, h0, tuple(blocks), tp, alg.conjugated(w), timings)
