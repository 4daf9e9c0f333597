"""Classical stochastic matrices: bottom strongly connected components and their periods."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..capacity import classical_d_max
from ..channel import KrausChannel
from ..errors import ValidationError
from .accel import get_kernels

EDGE_TOL = 1e-14
COLUMN_TOL = 1e-12


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic ``n x n`` matrix stored as triplets ``M[row, col] = val``.

    Column ``i`` holds the transition probabilities out of state ``i``.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        vals = np.asarray(self.vals, dtype=float)
        if not (rows.shape == cols.shape == vals.shape) or rows.ndim != 1:
            raise ValidationError("triplet arrays must be one-dimensional and of equal length")
        if self.n < 1:
            raise ValidationError("a stochastic matrix needs at least one state")
        if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= self.n or cols.max() >= self.n):
            raise ValidationError("triplet index out of range")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValidationError("entries must be finite and nonnegative")
        sums = np.bincount(cols, weights=vals, minlength=self.n)
        bad = np.flatnonzero(np.abs(sums - 1) > COLUMN_TOL)
        if bad.size:
            raise ValidationError(f"column {int(bad[0])} sums to {sums[bad[0]]!r}, not 1")
        for name, arr in (("rows", rows), ("cols", cols), ("vals", vals)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_dense(cls, m) -> "StochasticMatrix":
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"stochastic matrix must be square, got shape {m.shape}")
        r, c = np.nonzero(m)
        return cls(m.shape[0], r, c, m[r, c])

    @classmethod
    def from_triplets(cls, n: int, triplets) -> "StochasticMatrix":
        t = np.asarray(triplets, dtype=float).reshape(-1, 3)
        if np.any(t[:, :2] != np.round(t[:, :2])):
            raise ValidationError("triplet indices must be integers")
        # duplicates add up, as in the usual COO convention
        return cls(int(n), t[:, 0].astype(np.int64), t[:, 1].astype(np.int64), t[:, 2])

    def dense(self) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        np.add.at(m, (self.rows, self.cols), self.vals)
        return m

    def csr(self):
        """Adjacency ``i -> j`` for ``M[j, i] > EDGE_TOL``, as ``(indptr, indices)``."""
        keep = self.vals > EDGE_TOL
        src, dst = self.cols[keep], self.rows[keep]
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return indptr, np.ascontiguousarray(dst)


def _as_stochastic(m) -> StochasticMatrix:
    return m if isinstance(m, StochasticMatrix) else StochasticMatrix.from_dense(m)


@dataclass(frozen=True)
class ChainStructure:
    bottom_sccs: tuple
    periods: tuple

    @property
    def sum_dk(self) -> int:
        return sum(self.periods)


def embed_stochastic(m) -> KrausChannel:
    """Channel with Kraus operators ``sqrt(M[j, i]) |j><i|``."""
    sm = _as_stochastic(m)
    ops = []
    dense = sm.dense()
    for j, i in zip(*np.nonzero(dense)):
        k = np.zeros((sm.n, sm.n), dtype=complex)
        k[j, i] = np.sqrt(dense[j, i])
        ops.append(k)
    return KrausChannel(tuple(ops))


def bottom_scc_periods(m, *, use_numba: bool | None = None) -> ChainStructure:
    """Bottom SCCs (Tarjan) and their periods (BFS-level gcd), linear in nodes + edges."""
    sm = _as_stochastic(m)
    tarjan, bottoms, periods_of = get_kernels(use_numba)
    indptr, indices = sm.csr()
    comp, ncomp = tarjan(sm.n, indptr, indices)
    bottom = bottoms(sm.n, indptr, indices, comp, ncomp)
    periods = periods_of(sm.n, indptr, indices, comp, ncomp, bottom)
    members = {}
    for v, c in enumerate(comp.tolist()):
        if bottom[c]:
            members.setdefault(c, []).append(v)
    # canonical order: by smallest member
    groups = sorted(members.items(), key=lambda kv: kv[1][0])
    out_p = []
    for c, _ in groups:
        p = int(periods[c])
        if p < 1:
            # a stochastic column always has an edge, so a bottom SCC has internal edges
            raise ValidationError("bottom component without internal edges; matrix is not stochastic")
        out_p.append(p)
    return ChainStructure(tuple(tuple(vs) for _, vs in groups), tuple(out_p))


def classical_chain_capacity(m, delta=0, *, use_numba: bool | None = None) -> dict:
    s = bottom_scc_periods(m, use_numba=use_numba).sum_dk
    d_max = classical_d_max(s, delta)
    return {"D_max": d_max, "bits": math.log2(d_max), "sum_dk": s}
