import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import planted_channel
from peripheral.algebra import extract_structure, structure_from_dims
from peripheral.capacity import optimal_fidelity_bounds
from peripheral.channel import identity_superop, kraus_to_superop, validate_cptp
from peripheral.codes import (
    action_residual,
    avg_classical_fidelity,
    build_classical_code,
    build_quantum_code,
    code_entanglement_fidelity,
    complete_trace_preserving,
    entanglement_fidelity,
    eta,
    evolve,
    extract_peripheral_action,
)
from peripheral.errors import ValidationError
from peripheral.models import cycle_channel


def test_entanglement_fidelity_identity():
    assert abs(entanglement_fidelity(identity_superop(3)) - 1) < 1e-14


def test_complete_trace_preserving():
    k = [np.array([[1, 0], [0, 0]], dtype=complex)]
    done = complete_trace_preserving(k)
    total = sum(x.conj().T @ x for x in done)
    assert np.allclose(total, np.eye(2))


def test_identity_action_is_trivial(collective):
    t, s = collective[3]
    act = extract_peripheral_action(t, s)
    assert act.is_trivial()
    assert action_residual(t, s, act) < 1e-8


def test_cycle_action_permutes():
    t = kraus_to_superop(cycle_channel(3))
    s = extract_structure(t)
    act = extract_peripheral_action(t, s)
    assert sorted(act.permutation) == [0, 1, 2]
    assert len(act.cycle_of(0)) == 3


@pytest.mark.parametrize("seed", range(6))
def test_planted_action_cycle_type(seed):
    p = planted_channel(np.random.default_rng(40 + seed), d_max=7)
    s = extract_structure(p.superop)
    act = extract_peripheral_action(p.superop, s)
    assert action_residual(p.superop, s, act) < 1e-6

    def cycle_type(perm):
        seen, out = set(), []
        for k in range(len(perm)):
            if k not in seen:
                c, n = k, 0
                while c not in seen:
                    seen.add(c)
                    c, n = perm[c], n + 1
                out.append(n)
        return sorted(out)

    assert cycle_type(act.permutation) == cycle_type(p.perm)


def test_string_closes_cycle():
    p = planted_channel(np.random.default_rng(2), dims=[(2, 1), (2, 1)], h0=0)
    s = extract_structure(p.superop)
    act = extract_peripheral_action(p.superop, s)
    k, w = act.string(0, 0)
    assert k == 0 and np.allclose(w, np.eye(2))
    n = len(act.cycle_of(0))
    k2, w2 = act.string(0, 2 * n)
    k1, w1 = act.string(0, n)
    assert k1 == k2 == 0
    assert np.allclose(w2, w1 @ w1)


@pytest.mark.parametrize("n", [3, 4])
def test_classical_fidelity_matches_formula(collective, n):
    t, s = collective[n]
    act = extract_peripheral_action(t, s)
    S = s.sum_dk
    for D in range(1, 2 * S + 1):
        code = build_classical_code(s, act, D)
        f = avg_classical_fidelity(t, code)
        assert abs(f - min(1.0, S / D)) <= 1e-8


@pytest.mark.parametrize("n", [3, 4])
def test_quantum_fidelity_between_bounds(collective, n):
    t, s = collective[n]
    act = extract_peripheral_action(t, s)
    for D in range(1, 2 * s.sum_dk + 1):
        code = build_quantum_code(s, act, D)
        f = code_entanglement_fidelity(t, code)
        g = optimal_fidelity_bounds(s, D)
        assert abs(f - float(g.fidelity_lower)) <= 1e-8
        assert f <= float(g.fidelity_upper) + 1e-8


@pytest.mark.parametrize("n", [3, 4])
def test_finite_time_consistency(collective, n):
    t, s = collective[n]
    act = extract_peripheral_action(t, s)
    prev = math.inf
    for steps in (1, 5, 10, 20, 40, 80):
        ts = evolve(t, steps)
        e = eta(t, steps, s)
        assert e <= prev + 1e-6
        prev = e
        for D in (s.sum_dk, s.sum_dk + 1):
            c = build_classical_code(s, act, D, t=steps)
            assert avg_classical_fidelity(ts, c) >= min(1.0, s.sum_dk / D) - e - 1e-9
        q = build_quantum_code(s, act, s.max_dk, t=steps)
        assert code_entanglement_fidelity(ts, q) >= 1 - e - 1e-9
    assert prev < 1e-6


def test_planted_permutation_codes_at_finite_time():
    p = planted_channel(np.random.default_rng(9), dims=[(2, 1), (2, 1), (1, 2)], h0=1)
    s = extract_structure(p.superop)
    act = extract_peripheral_action(p.superop, s)
    # recovery tracks the block permutation, so the code is perfect once the rest has decayed
    for steps in (60, 61, 62):
        c = build_classical_code(s, act, s.sum_dk, t=steps)
        assert abs(avg_classical_fidelity(evolve(p.superop, steps), c) - 1) < 1e-6
        q = build_quantum_code(s, act, 2, t=steps)
        assert abs(code_entanglement_fidelity(evolve(p.superop, steps), q) - 1) < 1e-6


def test_codes_are_channels(collective):
    t, s = collective[3]
    act = extract_peripheral_action(t, s)
    for build in (build_classical_code, build_quantum_code):
        code = build(s, act, 4)
        assert validate_cptp(code.encoder).ok
        assert validate_cptp(code.recovery()).ok


def test_eta_is_zero_for_projection(collective):
    t, s = collective[3]
    assert eta(s.peripheral.superop, 1, s) < 1e-8


def test_codes_need_bases():
    s = structure_from_dims([(2, 1)])
    with pytest.raises(ValidationError):
        build_classical_code(s, None, 2)


def test_evolve_rejects_bad_steps(collective):
    t, s = collective[3]
    with pytest.raises(ValidationError):
        build_classical_code(s, extract_peripheral_action(t, s), 2, t=1.5)
    assert np.allclose(evolve(t, math.inf, s).matrix, s.peripheral.matrix)
