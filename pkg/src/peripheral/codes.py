"""Encoders and recoveries that store information in the peripheral space.

A channel acts on its peripheral space by permuting blocks and rotating their
first tensor factor: block ``k`` content ``x kron omega_k`` is sent to
``U x U^dagger kron omega_pi(k)`` in block ``pi(k)``. The codes below prepare
states inside the peripheral space, so ``T^t`` acts on them exactly through
this permutation and unitary string, and the recovery undoes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import PeripheralStructure
from .capacity import optimal_fidelity_bounds
from .channel import ChannelSuperOp, _as_superop, choi_matrix, compose, kraus_to_superop, power
from .errors import NumericalError, ValidationError
from .linalg import partial_trace_second, polar_unitary
from .tolerances import Tolerances, resolve

AMBIGUITY = 1e-6
ACTION_TOL = 1e-6


@dataclass(frozen=True)
class PeripheralAction:
    """``permutation[k]`` is the block that block ``k`` is sent to; ``unitaries[k]`` acts on arrival at ``k``."""

    permutation: tuple
    unitaries: tuple

    def cycle_of(self, k: int) -> list[int]:
        cyc = [k]
        nxt = self.permutation[k]
        while nxt != k:
            cyc.append(nxt)
            nxt = self.permutation[nxt]
        return cyc

    def string(self, k: int, t: int) -> tuple[int, np.ndarray]:
        """Target block and accumulated unitary ``U_{pi^t(k)} ... U_{pi(k)}`` after ``t`` steps."""
        d = self.unitaries[k].shape[0]
        cyc = self.cycle_of(k)
        q, r = divmod(int(t), len(cyc))
        full = np.eye(d, dtype=complex)
        for step in range(1, len(cyc) + 1):
            full = self.unitaries[cyc[step % len(cyc)]] @ full
        w = np.linalg.matrix_power(full, q) if q else np.eye(d, dtype=complex)
        for step in range(1, r + 1):
            w = self.unitaries[cyc[step % len(cyc)]] @ w
        return cyc[r % len(cyc)], w

    def is_trivial(self, tol: float = 1e-9) -> bool:
        ident = all(p == k for k, p in enumerate(self.permutation))
        return ident and all(
            np.linalg.norm(u - u[0, 0] * np.eye(u.shape[0])) <= tol for u in self.unitaries
        )


def _block_weights(structure: PeripheralStructure, y: np.ndarray) -> np.ndarray:
    return np.array([np.trace(b.compress(y)).real for b in structure.blocks])


def extract_peripheral_action(t: ChannelSuperOp, structure: PeripheralStructure) -> PeripheralAction:
    """Recover the block permutation and block unitaries of ``T`` on its peripheral space."""
    t = _as_superop(t)
    blocks = structure.blocks
    perm = [0] * len(blocks)
    unitaries = [None] * len(blocks)
    for k, b in enumerate(blocks):
        e00 = np.zeros((b.d, b.d), dtype=complex)
        e00[0, 0] = 1
        y = t.apply(b.embed(e00))
        w = _block_weights(structure, y)
        order = np.argsort(-w)
        target = int(order[0])
        if len(w) > 1 and w[order[1]] > AMBIGUITY:
            raise NumericalError(f"block {k} maps into several blocks (weights {np.round(w, 9).tolist()})")
        tb = blocks[target]
        if (tb.d, tb.d_prime) != (b.d, b.d_prime):
            raise NumericalError(f"block {k} {(b.d, b.d_prime)} maps onto block {target} {(tb.d, tb.d_prime)}")
        perm[k] = target

        def phi(x):
            return partial_trace_second(tb.compress(t.apply(b.embed(x))), tb.d, tb.d_prime)

        lam, vecs = np.linalg.eigh(0.5 * (phi(e00) + phi(e00).conj().T))
        u0 = vecs[:, -1] * np.sqrt(max(lam[-1], 0.0))
        cols = [u0]
        for i in range(1, b.d):
            ei0 = np.zeros((b.d, b.d), dtype=complex)
            ei0[i, 0] = 1
            cols.append(phi(ei0) @ u0 / np.vdot(u0, u0).real)
        unitaries[target] = polar_unitary(np.stack(cols, axis=1))
    if sorted(perm) != list(range(len(blocks))):
        raise NumericalError(f"recovered block map {perm} is not a permutation")
    action = PeripheralAction(tuple(perm), tuple(unitaries))
    err = action_residual(t, structure, action)
    if err > ACTION_TOL:
        raise NumericalError(f"recovered peripheral action reproduces T only to {err:.3g}")
    return action


def action_residual(t: ChannelSuperOp, structure: PeripheralStructure, action: PeripheralAction, seed: int = 7) -> float:
    """Max deviation of ``T`` from the claimed action on random block operators."""
    t = _as_superop(t)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k, b in enumerate(structure.blocks):
        x = rng.normal(size=(b.d, b.d)) + 1j * rng.normal(size=(b.d, b.d))
        target = structure.blocks[action.permutation[k]]
        u = action.unitaries[action.permutation[k]]
        want = target.embed(u @ x @ u.conj().T)
        worst = max(worst, float(np.max(np.abs(t.apply(b.embed(x)) - want))))
    return worst


def complete_trace_preserving(kraus: list[np.ndarray], fill: int = 0, tol: float = 1e-9) -> list[np.ndarray]:
    """Append operators ``sqrt(mu) |fill><v|`` so that ``sum K^dagger K = I``."""
    d_in = kraus[0].shape[1]
    s = sum(k.conj().T @ k for k in kraus)
    lam, vecs = np.linalg.eigh(np.eye(d_in) - 0.5 * (s + s.conj().T))
    if lam[0] < -tol:
        raise NumericalError(f"partial Kraus set exceeds the identity by {-lam[0]:.3g}")
    out = list(kraus)
    d_out = kraus[0].shape[0]
    for mu, v in zip(lam, vecs.T):
        if mu > tol:
            k = np.zeros((d_out, d_in), dtype=complex)
            k[fill] = np.sqrt(mu) * v.conj()
            out.append(k)
    return out


@dataclass(frozen=True)
class CodePair:
    """Encoder ``M_D -> M_d`` and recovery ``t -> (M_d -> M_D)``; ``t`` may be ``math.inf``."""

    D: int
    encoder: ChannelSuperOp
    recovery: Callable = field(repr=False)
    kind: str
    t: float = math.inf


def _check_t(t):
    if t == math.inf:
        return t
    if t < 0 or int(t) != t:
        raise ValidationError(f"t must be a nonnegative integer or inf, got {t}")
    return int(t)


def _require_data(structure: PeripheralStructure):
    if not structure.blocks or structure.blocks[0].basis is None:
        raise ValidationError("codes need a structure with bases and fixed densities (from extract_structure)")


def _string(action: PeripheralAction, k: int, t):
    if t == math.inf:
        # T_P acts as the identity on the peripheral space
        return k, np.eye(action.unitaries[k].shape[0], dtype=complex)
    return action.string(k, t)


def build_classical_code(structure: PeripheralStructure, action: PeripheralAction, D: int, t=math.inf) -> CodePair:
    """Measure-and-prepare code sending ``|i>`` to ``|e_{k,a}><e_{k,a}| kron omega_k``.

    Inputs ``i`` beyond ``sum_k d_k`` all go to the first block state.
    """
    _require_data(structure)
    t = _check_t(t)
    D = int(D)
    d = structure.dim
    if D < 1 or D > d * d:
        raise ValidationError(f"D must lie in [1, {d * d}], got {D}")
    labels = [(k, a) for k, b in enumerate(structure.blocks) for a in range(b.d)]
    enc = np.zeros((d * d, D * D), dtype=complex)
    for i in range(D):
        k, a = labels[i] if i < len(labels) else (0, 0)
        b = structure.blocks[k]
        ea = np.zeros((b.d, b.d), dtype=complex)
        ea[a, a] = 1
        enc[:, i * D + i] = b.embed(ea).reshape(-1)
    encoder = ChannelSuperOp(enc)
    label_of = {lab: i for i, lab in enumerate(labels) if i < D}

    def recovery(tt=t):
        tt = _check_t(tt)
        ops = []
        for k, b in enumerate(structure.blocks):
            target, w = _string(action, k, tt)
            tb = structure.blocks[target]
            for j in range(tb.d_prime):
                op = np.zeros((D, d), dtype=complex)
                for a in range(b.d):
                    if (k, a) not in label_of:
                        continue
                    v = tb.basis @ np.kron(w[:, a], np.eye(tb.d_prime)[j])
                    op[label_of[(k, a)]] = v.conj()
                if op.any():
                    ops.append(op)
        ops = ops or [np.zeros((D, d), dtype=complex)]
        return kraus_to_superop(complete_trace_preserving(ops))

    return CodePair(D, encoder, recovery, "classical", t)


def build_quantum_code(structure: PeripheralStructure, action: PeripheralAction, D: int, t=math.inf) -> CodePair:
    """Encode ``gamma_k`` input levels coherently into block ``k`` (greedy ``gamma``)."""
    _require_data(structure)
    t = _check_t(t)
    D = int(D)
    d = structure.dim
    if D < 1 or D > d * d:
        raise ValidationError(f"D must lie in [1, {d * d}], got {D}")
    gammas = optimal_fidelity_bounds(structure, D).gammas
    offsets = np.concatenate([[0], np.cumsum(gammas)]).astype(int)
    kraus = []
    for k, b in enumerate(structure.blocks):
        root = _sqrt_psd(b.omega)
        for m in range(b.d_prime):
            op = np.zeros((d, D), dtype=complex)
            for j in range(gammas[k]):
                op[:, offsets[k] + j] = b.basis @ np.kron(np.eye(b.d)[j], root[:, m])
            if gammas[k]:
                kraus.append(op)
    b0 = structure.blocks[0]
    root0 = _sqrt_psd(b0.omega)
    for i in range(int(offsets[-1]), D):
        for m in range(b0.d_prime):
            op = np.zeros((d, D), dtype=complex)
            op[:, i] = b0.basis @ np.kron(np.eye(b0.d)[0], root0[:, m])
            kraus.append(op)
    encoder = kraus_to_superop(kraus)

    def recovery(tt=t):
        tt = _check_t(tt)
        ops = []
        for k, b in enumerate(structure.blocks):
            if not gammas[k]:
                continue
            target, w = _string(action, k, tt)
            tb = structure.blocks[target]
            for m in range(tb.d_prime):
                op = np.zeros((D, d), dtype=complex)
                for j in range(gammas[k]):
                    v = tb.basis @ np.kron(w[:, j], np.eye(tb.d_prime)[m])
                    op[offsets[k] + j] = v.conj()
                ops.append(op)
        return kraus_to_superop(complete_trace_preserving(ops))

    return CodePair(D, encoder, recovery, "quantum", t)


def _sqrt_psd(x: np.ndarray) -> np.ndarray:
    lam, v = np.linalg.eigh(0.5 * (x + x.conj().T))
    return (v * np.sqrt(np.clip(lam, 0, None))) @ v.conj().T


def evolve(t: ChannelSuperOp, steps, structure: PeripheralStructure | None = None) -> ChannelSuperOp:
    """``T^steps``, or ``T_P`` (taken from ``structure``) when ``steps`` is infinite."""
    if steps == math.inf:
        if structure is None or structure.peripheral is None:
            raise ValidationError("t = inf needs a structure carrying T_P")
        return structure.peripheral.superop
    return power(t, int(steps))


def composed(channel: ChannelSuperOp, code: CodePair, t=None) -> ChannelSuperOp:
    """``R_t o channel o E`` as a map on ``M_D``."""
    rec = code.recovery(code.t if t is None else t)
    return compose(rec, compose(_as_superop(channel), code.encoder))


def avg_classical_fidelity(channel: ChannelSuperOp, code: CodePair, t=None) -> float:
    """``(1/D) sum_i <i| R o channel o E(|i><i|) |i>``; ``channel`` should already be ``T^t``."""
    s = composed(channel, code, t).matrix
    D = code.D
    diag = np.arange(D) * (D + 1)
    return float(np.sum(s[diag, diag]).real / D)


def entanglement_fidelity(channel: ChannelSuperOp) -> float:
    """``<Phi+| (id kron channel)(|Phi+><Phi+|) |Phi+>`` from the Choi matrix."""
    s = _as_superop(channel)
    D = s.dim
    j = choi_matrix(s)
    idx = np.arange(D) * (D + 1)
    return float(np.sum(j[np.ix_(idx, idx)]).real / (D * D))


def code_entanglement_fidelity(channel: ChannelSuperOp, code: CodePair, t=None) -> float:
    return entanglement_fidelity(composed(channel, code, t))


def eta(t: ChannelSuperOp, steps: int, structure: PeripheralStructure) -> float:
    """Trace norm of the Choi matrix of ``T^steps - T_P`` (a diamond-norm surrogate)."""
    diff = ChannelSuperOp(power(t, steps).matrix - structure.peripheral.matrix)
    return float(np.linalg.svd(choi_matrix(diff), compute_uv=False).sum())
