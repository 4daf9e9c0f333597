import warnings

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from oracles import random_gkls, random_kraus_channel, random_unitary
from peripheral.channel import (
    ChannelSuperOp,
    identity_superop,
    kraus_to_superop,
    lindblad_to_superop,
    superop_exp,
    unitary_superop,
)
from peripheral.errors import AmbiguousSpectrumError, ValidationError
from peripheral.models import amplitude_damping, cycle_channel, depolarizing
from peripheral.spectral import (
    PeripheralWarning,
    averaged_projection,
    eig_decompose,
    peripheral_projection,
    qms_peripheral_generators,
    qms_unit_eigenvalues,
)


def match_cost(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if len(a) != len(b):
        return np.inf
    if len(a) == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def test_identity_spectrum():
    s = eig_decompose(identity_superop(2))
    assert np.allclose(s.eigenvalues, 1)
    assert len(set(s.labels.tolist())) == 1


def test_three_cycle_spectrum_contains_cube_roots():
    s = eig_decompose(kraus_to_superop(cycle_channel(3)))
    roots = np.exp(2j * np.pi * np.arange(3) / 3)
    periph = s.eigenvalues[np.abs(s.eigenvalues) > 1 - 1e-9]
    assert match_cost(periph, roots) < 1e-10


def test_depolarizing_spectrum():
    s = eig_decompose(depolarizing(2))
    assert match_cost(s.eigenvalues, [1, 0, 0, 0]) < 1e-12


def test_eig_residuals(rng):
    t = kraus_to_superop(random_kraus_channel(rng, 3, 2))
    s = eig_decompose(t)
    m = t.matrix
    bound = 1e-8 * np.linalg.norm(m, 2)
    for i, lam in enumerate(s.eigenvalues):
        v, w = s.right_vectors[:, i], s.left_vectors[:, i]
        assert np.linalg.norm(m @ v - lam * v) <= bound
        assert np.linalg.norm(w.conj() @ m - lam * w.conj()) <= bound


def test_unitary_channel_projection_is_identity(rng):
    tp = peripheral_projection(unitary_superop(random_unitary(rng, 3)))
    assert np.allclose(tp.matrix, np.eye(9), atol=1e-10)


def test_depolarizing_projection():
    tp = peripheral_projection(depolarizing(2))
    x = np.array([[1, 2], [3, 4]], dtype=complex)
    assert np.allclose(tp.apply(x), np.trace(x) * np.eye(2) / 2)


def test_amplitude_damping_projection():
    tp = peripheral_projection(kraus_to_superop(amplitude_damping(0.5)))
    x = np.array([[0.3, 0.2], [0.1, 0.7]], dtype=complex)
    assert np.allclose(tp.apply(x), np.trace(x) * np.diag([1, 0]), atol=1e-12)
    assert tp.rank == 1


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_projection_invariants_random_channels(rng, d):
    t = kraus_to_superop(random_kraus_channel(rng, d, 2))
    tp = peripheral_projection(t)
    p = tp.matrix
    assert np.max(np.abs(p @ p - p)) <= 1e-8
    assert np.max(np.abs(t.matrix @ p - p @ t.matrix)) <= 1e-8


def test_projection_fixes_peripheral_eigenoperators():
    t = kraus_to_superop(cycle_channel(3))
    tp = peripheral_projection(t)
    s = eig_decompose(t)
    for i in np.flatnonzero(np.abs(np.abs(s.eigenvalues) - 1) < 1e-9):
        v = s.right_vectors[:, i]
        assert np.allclose(tp.matrix @ v, v, atol=1e-10)


def test_projection_agrees_with_cesaro_mean():
    t = kraus_to_superop(amplitude_damping(0.4))
    tp = peripheral_projection(t)
    assert np.max(np.abs(averaged_projection(t, 1, 2000) - tp.matrix)) < 5e-3


def test_projection_requires_cptp():
    with pytest.raises(ValidationError):
        peripheral_projection(ChannelSuperOp(2 * np.eye(4)))


def _near_unit(gap):
    u = np.diag([1.0, 1.0 - gap, 0.5, 0.2])
    return u


def test_ambiguous_modulus_raises():
    from peripheral.spectral import _classify
    from peripheral.tolerances import Tolerances

    with pytest.raises(AmbiguousSpectrumError):
        _classify(np.array([1.0, 1 - 3e-9, 0.5]), Tolerances())


def test_soft_peripheral_warning():
    from peripheral.spectral import _classify
    from peripheral.tolerances import Tolerances

    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        idx = _classify(np.array([1.0, 1 - 5e-10, 0.5]), Tolerances())
    assert list(idx) == [0, 1]
    assert any(issubclass(w.category, PeripheralWarning) for w in rec)


def test_qms_zero_generator_spans_everything():
    span = qms_peripheral_generators(ChannelSuperOp(np.zeros((4, 4))))
    assert len(span) == 4


def test_qms_amplitude_damping():
    from peripheral.channel import LindbladGenerator

    lhat = lindblad_to_superop(LindbladGenerator(np.zeros((2, 2)), (np.array([[0, 1], [0, 0]]),)))
    span = qms_peripheral_generators(lhat)
    assert len(span) == 1
    g = span.generators[0]
    assert np.allclose(g / g[0, 0], np.diag([1, 0]))


def test_qms_sigma_z():
    from peripheral.channel import LindbladGenerator

    lhat = lindblad_to_superop(LindbladGenerator(np.diag([1.0, -1.0])))
    assert match_cost(np.linalg.eigvals(lhat.matrix), [0, 0, 2j, -2j]) < 1e-12
    assert len(qms_peripheral_generators(lhat)) == 4


@pytest.mark.parametrize("d", [2, 3, 4])
def test_qms_peripheral_eigenvalues_match_exponential(rng, d):
    lhat = lindblad_to_superop(random_gkls(rng, d, dfs_dim=int(rng.integers(1, d))))
    tp = peripheral_projection(superop_exp(lhat, 1.0), check=False)
    assert match_cost(tp.peripheral_eigenvalues, qms_unit_eigenvalues(lhat, 1.0)) < 1e-7
