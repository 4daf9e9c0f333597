import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from oracles import brute_commutant_dim, planted_channel, random_unitary
from peripheral.algebra import (
    OrthogonalProjection,
    center_span,
    commutant_span,
    extract_structure,
    fixed_point_span,
    reduce_projection,
    structure_from_dims,
    undistort,
)
from peripheral.channel import identity_superop, kraus_to_superop, unitary_superop
from peripheral.errors import ValidationError
from peripheral.linalg import LinearSpan
from peripheral.models import amplitude_damping, cycle_channel, depolarizing
from peripheral.spectral import peripheral_projection


def span_of(*mats):
    return LinearSpan(mats[0].shape[0], tuple(np.asarray(m, dtype=complex) for m in mats), hermitian=True)


def full_matrix_algebra(d):
    mats = [np.eye(d)]
    for i in range(d):
        for j in range(i, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1
            mats.append(e)
            if i != j:
                f = np.zeros((d, d), dtype=complex)
                f[i, j], f[j, i] = -1j, 1j
                mats.append(f)
    return span_of(*mats)


def test_commutant_of_scalars_is_everything():
    assert len(commutant_span(span_of(np.eye(3)))) == 9


def test_commutant_of_full_algebra_is_scalars():
    assert len(commutant_span(full_matrix_algebra(3))) == 1


def test_commutant_of_diagonals():
    gens = span_of(np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0]), np.diag([0, 0, 1.0]))
    com = commutant_span(gens)
    assert len(com) == 3
    for m in com.generators:
        assert np.allclose(m, np.diag(np.diag(m)), atol=1e-10)


def test_commutant_of_m2_tensor_i2():
    gens = span_of(*[np.kron(p, np.eye(2)) for p in full_matrix_algebra(2).generators])
    assert len(commutant_span(gens)) == 4


def test_commutant_against_brute_force(rng):
    for _ in range(5):
        u = random_unitary(rng, 4)
        gens = [u @ np.diag(rng.integers(0, 2, size=4).astype(float)) @ u.conj().T for _ in range(2)]
        gens.append(np.eye(4))
        assert len(commutant_span(span_of(*gens))) == brute_commutant_dim(gens, 4)


def test_center_of_two_blocks():
    a = span_of(
        *[np.pad(m, ((0, 1), (0, 1))) for m in full_matrix_algebra(2).generators],
        np.diag([0, 0, 1.0]),
    )
    z = center_span(a)
    assert len(z) == 2
    for m in z.generators:
        assert np.allclose(m, np.diag(np.diag(m)), atol=1e-10)


def test_center_of_full_algebra():
    assert len(center_span(full_matrix_algebra(4))) == 1


def test_undistort_depolarizing_gives_identity():
    tp = peripheral_projection(depolarizing(3))
    w, a = undistort(fixed_point_span(tp), tp)
    assert len(a) == 1
    g = a.generators[0]
    assert np.allclose(g / g[0, 0], np.eye(w.shape[1]), atol=1e-10)


def test_undistort_amplitude_damping_restricts_support():
    tp = peripheral_projection(kraus_to_superop(amplitude_damping(0.3)))
    w, a = undistort(fixed_point_span(tp), tp)
    assert w.shape == (2, 1)
    assert abs(abs(w[0, 0]) - 1) < 1e-12


def test_undistorted_span_is_a_star_algebra():
    p = planted_channel(np.random.default_rng(3), dims=[(2, 2), (1, 3)], h0=1)
    tp = peripheral_projection(p.superop)
    _, a = undistort(fixed_point_span(tp), tp)
    mat = a.matrix()
    q, _ = np.linalg.qr(mat)
    for x in a.generators:
        for y in a.generators:
            prod = (x @ y).reshape(-1)
            assert np.linalg.norm(prod - q @ (q.conj().T @ prod)) < 1e-8


def test_reduce_projection_on_scalars():
    p = OrthogonalProjection.identity(3)
    q = reduce_projection(p, span_of(np.eye(3)))
    assert np.allclose(q.matrix, np.eye(3))


def test_reduce_projection_picks_smaller_piece():
    gens = span_of(np.eye(3), np.diag([1.0, 1.0, 0]))
    q = reduce_projection(OrthogonalProjection.identity(3), gens)
    assert np.linalg.matrix_rank(q.matrix) == 1


@pytest.mark.parametrize(
    "channel,dims,h0",
    [
        (identity_superop(3), [(3, 1)], 0),
        (depolarizing(3), [(1, 3)], 0),
        (kraus_to_superop(amplitude_damping(0.5)), [(1, 1)], 1),
        (kraus_to_superop(cycle_channel(3)), [(1, 1), (1, 1), (1, 1)], 0),
    ],
)
def test_reference_structures(channel, dims, h0):
    s = extract_structure(channel)
    assert s.dims == dims and s.h0_dim == h0


def test_unitary_channel_is_full_algebra(rng):
    s = extract_structure(unitary_superop(random_unitary(rng, 4)))
    assert s.dims == [(4, 1)]


def test_basis_is_orthonormal_and_complements_h0():
    p = planted_channel(np.random.default_rng(5), dims=[(2, 1), (1, 2)], h0=2)
    s = extract_structure(p.superop)
    b = s.basis_matrix()
    assert b.shape == (6, 4)
    assert np.allclose(b.conj().T @ b, np.eye(4), atol=1e-8)
    # the planted frame columns span the same subspace
    sv = np.linalg.svd(b.conj().T @ p.frame, compute_uv=False)
    assert np.allclose(sv, 1, atol=1e-8)


def test_fixed_densities_are_states():
    p = planted_channel(np.random.default_rng(8), dims=[(1, 3), (2, 2)], h0=0)
    s = extract_structure(p.superop)
    for b in s.blocks:
        assert abs(np.trace(b.omega) - 1) < 1e-10
        assert np.linalg.eigvalsh(b.omega)[0] > -1e-9


def test_peripheral_space_reconstructs_from_blocks():
    p = planted_channel(np.random.default_rng(11), dims=[(2, 2), (1, 1)], h0=1)
    s = extract_structure(p.superop)
    tp = s.peripheral
    rng = np.random.default_rng(0)
    for b in s.blocks:
        x = rng.normal(size=(b.d, b.d)) + 1j * rng.normal(size=(b.d, b.d))
        y = b.embed(x)
        assert np.allclose(tp.apply(y), y, atol=1e-8)


@pytest.mark.parametrize("seed", range(12))
def test_planted_structures(seed):
    rng = np.random.default_rng(1000 + seed)
    p = planted_channel(rng, d_max=7)
    s = extract_structure(p.superop)
    assert sorted(s.dims) == sorted(p.dims)
    assert s.h0_dim == p.h0
    assert sum(a * a for a, _ in s.dims) == s.peripheral.rank
    # omega spectra agree per shape
    for shape in set(p.dims):
        got = [np.linalg.eigvalsh(b.omega) for b in s.blocks if (b.d, b.d_prime) == shape]
        want = [np.linalg.eigvalsh(p.omegas[k]) for k, sh in enumerate(p.dims) if sh == shape]
        cost = np.array([[np.max(np.abs(g - w)) for w in want] for g in got])
        r, c = linear_sum_assignment(cost)
        assert cost[r, c].max() < 1e-6


def test_structure_from_dims_sorting_and_validation():
    s = structure_from_dims([(1, 2), (3, 1), (2, 1)], dim=10)
    assert s.dims == [(3, 1), (2, 1), (1, 2)]
    assert s.h0_dim == 3 and s.sum_dk == 6 and s.max_dk == 3 and s.chi_dim == 14
    with pytest.raises(ValidationError):
        structure_from_dims([(2, 2)], dim=3)
    with pytest.raises(ValidationError):
        structure_from_dims([(0, 1)])


def test_collective_noise_small(collective):
    _, s3 = collective[3]
    assert s3.dims == [(2, 2), (1, 4)] and s3.h0_dim == 0
    _, s4 = collective[4]
    assert s4.dims == [(3, 3), (2, 1), (1, 5)] and s4.h0_dim == 0


def test_timings_recorded(collective):
    _, s = collective[3]
    assert s.timings and all(v >= 0 for v in s.timings.values())
