"""Tests for the truncated Fock-space primitives."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photon_filter import (
    DensityMatrix,
    DimensionMismatch,
    FockVector,
    InvariantViolation,
    coherent_fock_vector,
    coherent_overlap,
    fidelity_with_pure,
    fock_basis_vector,
    partial_trace,
    photon_number_distribution,
    purity,
    suggested_truncation,
    tensor_product,
)


def poisson_weight(mean: float, k: int) -> float:
    """Independent Poisson pmf via log accumulation (oracle for coherent states)."""
    return math.exp(-mean + k * math.log(mean) - math.lgamma(k + 1)) if mean > 0 else float(k == 0)


# ---------------------------------------------------------------------------
# coherent_fock_vector


def test_vacuum_is_basis_state():
    vec = coherent_fock_vector(0.0, 4)
    assert np.array_equal(np.asarray(vec), [1, 0, 0, 0])


def test_coherent_norm_matches_direct_poisson_sum():
    vec = coherent_fock_vector(3.0, 64)
    direct = sum(poisson_weight(9.0, k) for k in range(64))
    assert vec.norm_squared >= 1 - 1e-12
    assert math.isclose(vec.norm_squared, direct, rel_tol=1e-12)


def test_coherent_coefficients_match_poisson_oracle():
    vec = np.asarray(coherent_fock_vector(1.5 - 0.5j, 30))
    mean = abs(1.5 - 0.5j) ** 2
    for k in [0, 1, 5, 12, 29]:
        assert math.isclose(abs(vec[k]) ** 2, poisson_weight(mean, k), rel_tol=1e-12)
    # phase of coefficient k is k * arg(alpha)
    assert np.allclose(np.angle(vec[1:4]) - np.arange(1, 4) * np.angle(1.5 - 0.5j), 0, atol=1e-12)


def test_equal_peak_amplitudes_for_designed_modulus():
    # |beta|^2 = (8!/3!)^(1/5) makes the k=3 and k=8 amplitudes equal.
    beta = (math.factorial(8) / math.factorial(3)) ** 0.1
    vec = np.asarray(coherent_fock_vector(beta, 16))
    assert abs(abs(vec[3]) - abs(vec[8])) < 1e-10


def test_large_amplitude_stays_finite():
    vec = coherent_fock_vector(12.0, suggested_truncation(12.0))
    assert np.all(np.isfinite(np.asarray(vec)))
    assert vec.norm_squared >= 1 - 1e-10


def test_coherent_rejects_bad_arguments():
    with pytest.raises(InvariantViolation):
        coherent_fock_vector(1.0, 0)
    with pytest.raises(InvariantViolation):
        coherent_fock_vector(complex("inf"), 8)


def test_norm_monotone_in_truncation():
    norms = [coherent_fock_vector(2.0, n).norm_squared for n in range(1, 40)]
    assert all(b >= a for a, b in zip(norms, norms[1:]))


def test_suggested_truncation_tail_below_1e10():
    for alpha in [0.5, 1.0, 3.0, 8.0]:
        n = suggested_truncation(alpha)
        tail = 1.0 - sum(poisson_weight(alpha * alpha, k) for k in range(n))
        assert tail < 1e-10


def test_fock_vector_rejects_norm_gain():
    with pytest.raises(InvariantViolation):
        FockVector(np.array([1.0, 0.1]))


# ---------------------------------------------------------------------------
# coherent_overlap


def test_overlap_of_identical_states_is_one():
    for gamma in [0.0, 1.0, 2.0 - 1.0j]:
        assert coherent_overlap(gamma, gamma) == pytest.approx(1.0)


def test_overlap_with_vacuum():
    assert coherent_overlap(1.0, 0.0) == pytest.approx(math.exp(-0.5))


def test_overlap_matches_truncated_sum_oracle():
    gamma, gamma_prime = 1 + 1j, 2.0
    c = np.asarray(coherent_fock_vector(gamma, 80))
    cp = np.asarray(coherent_fock_vector(gamma_prime, 80))
    truncated = np.vdot(cp, c)  # sum_k conj(c'_k) c_k
    assert abs(coherent_overlap(gamma, gamma_prime) - truncated) < 1e-10


@settings(max_examples=50, deadline=None)
@given(
    st.tuples(*[st.floats(-3, 3) for _ in range(4)]).map(
        lambda t: (complex(t[0], t[1]), complex(t[2], t[3]))
    )
)
def test_overlap_conjugate_symmetry(pair):
    gamma, gamma_prime = pair
    forward = coherent_overlap(gamma, gamma_prime)
    backward = coherent_overlap(gamma_prime, gamma)
    assert forward == backward.conjugate()


# ---------------------------------------------------------------------------
# DensityMatrix invariants


def test_density_matrix_rejects_non_hermitian():
    m = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
    with pytest.raises(InvariantViolation):
        DensityMatrix(m, (2,))


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(InvariantViolation):
        DensityMatrix(np.eye(2, dtype=complex), (2,))


def test_density_matrix_rejects_negative_eigenvalue():
    m = np.diag([1.5, -0.5]).astype(complex)
    with pytest.raises(InvariantViolation):
        DensityMatrix(m, (2,))


def test_density_matrix_rejects_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        DensityMatrix(np.eye(4, dtype=complex) / 4, (2, 3))


def test_density_matrix_is_immutable():
    rho = DensityMatrix.fock_state(0, 3)
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 0.5


def test_coherent_state_diagonal_is_poisson():
    rho = DensityMatrix.coherent_state(2.0, 40)
    diag = np.asarray(rho).diagonal().real
    expected = [poisson_weight(4.0, k) for k in range(40)]
    assert np.allclose(diag, expected, atol=1e-12)


# ---------------------------------------------------------------------------
# photon_number_distribution


def test_distribution_of_vacuum():
    dist = photon_number_distribution(DensityMatrix.fock_state(0, 5))
    assert np.array_equal(dist, [1, 0, 0, 0, 0])


def test_distribution_of_fock_mixture():
    mix = 0.5 * np.asarray(DensityMatrix.fock_state(3, 10)) + 0.5 * np.asarray(
        DensityMatrix.fock_state(8, 10)
    )
    dist = photon_number_distribution(DensityMatrix(mix, (10,)))
    assert dist[3] == pytest.approx(0.5)
    assert dist[8] == pytest.approx(0.5)
    assert dist.sum() == pytest.approx(1.0)


def test_distribution_rejects_two_mode_input():
    rho = tensor_product(DensityMatrix.fock_state(0, 2), DensityMatrix.fock_state(1, 2))
    with pytest.raises(DimensionMismatch):
        photon_number_distribution(rho)


def test_distribution_clamps_tiny_negativity():
    m = np.diag([1.0 + 5e-11, -5e-11]).astype(complex)
    dist = photon_number_distribution(DensityMatrix(m, (2,)))
    assert dist[1] == 0.0


# ---------------------------------------------------------------------------
# fidelity and purity


def test_fidelity_trivial_cases():
    rho = DensityMatrix.fock_state(4, 8)
    assert fidelity_with_pure(rho, fock_basis_vector(4, 8)) == pytest.approx(1.0)
    assert fidelity_with_pure(rho, fock_basis_vector(2, 8)) == pytest.approx(0.0)


def test_fidelity_of_maximally_mixed():
    d = 6
    rho = DensityMatrix(np.eye(d, dtype=complex) / d, (d,))
    assert fidelity_with_pure(rho, fock_basis_vector(3, d)) == pytest.approx(1 / d)


def test_fidelity_rejects_zero_vector():
    rho = DensityMatrix.fock_state(0, 3)
    with pytest.raises(InvariantViolation):
        fidelity_with_pure(rho, np.zeros(3))


def test_purity_of_pure_and_mixed():
    assert purity(DensityMatrix.coherent_state(1.3, 30)) == pytest.approx(1.0)
    d = 5
    assert purity(DensityMatrix(np.eye(d, dtype=complex) / d, (d,))) == pytest.approx(1 / d)


# ---------------------------------------------------------------------------
# partial_trace


def random_density(rng, dim) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / m.trace().real


def test_partial_trace_of_product_state():
    rng = np.random.default_rng(7)
    sigma_state = DensityMatrix(random_density(rng, 4), (4,))
    mixed = DensityMatrix(np.eye(3, dtype=complex) / 3, (3,))
    joint = tensor_product(sigma_state, mixed)
    reduced = partial_trace(joint, keep_mode=0)
    assert np.allclose(np.asarray(reduced), np.asarray(sigma_state), atol=1e-12)
    reduced1 = partial_trace(joint, keep_mode=1)
    assert np.allclose(np.asarray(reduced1), np.asarray(mixed), atol=1e-12)


def test_partial_trace_of_bell_like_state():
    vec = np.zeros(4, dtype=complex)
    vec[0 * 2 + 1] = 1 / math.sqrt(2)  # |0,1>
    vec[1 * 2 + 0] = 1 / math.sqrt(2)  # |1,0>
    rho = DensityMatrix.from_pure(vec, (2, 2))
    for mode in (0, 1):
        reduced = partial_trace(rho, mode)
        assert np.allclose(np.asarray(reduced), np.eye(2) / 2, atol=1e-12)


def test_partial_trace_matches_loop_contraction_oracle():
    rng = np.random.default_rng(11)
    d1, d2 = 3, 4
    rho = DensityMatrix(random_density(rng, d1 * d2), (d1, d2))

    # Independent oracle: explicit index loops, no reshape/einsum.
    expected0 = np.zeros((d1, d1), dtype=complex)
    expected1 = np.zeros((d2, d2), dtype=complex)
    m = np.asarray(rho)
    for i in range(d1):
        for k in range(d1):
            for j in range(d2):
                expected0[i, k] += m[i * d2 + j, k * d2 + j]
    for j in range(d2):
        for l in range(d2):
            for i in range(d1):
                expected1[j, l] += m[i * d2 + j, i * d2 + l]

    for mode, expected in [(0, expected0), (1, expected1)]:
        reduced = partial_trace(rho, mode)
        assert np.allclose(np.asarray(reduced), expected, atol=1e-12)
        assert np.asarray(reduced).trace().real == pytest.approx(1.0, abs=1e-10)


def test_partial_trace_rejects_bad_mode_and_single_mode_input():
    rho = DensityMatrix.fock_state(0, 4)
    with pytest.raises(DimensionMismatch):
        partial_trace(rho, 0)
    joint = tensor_product(rho, rho)
    with pytest.raises(DimensionMismatch):
        partial_trace(joint, 2)
