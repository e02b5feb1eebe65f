"""Truncated Fock-space linear algebra for one and two bosonic modes.

States are plain ``numpy`` arrays wrapped in small immutable value types that
enforce the physical invariants (norm, Hermiticity, positivity) once at
construction time. Everything downstream can then assume a valid state.

Conventions: photon-number index runs 0..n_trunc-1; a two-mode matrix uses
row-major ordering, i.e. joint index (s1, s2) -> s1 * dim2 + s2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .exceptions import DimensionMismatch, InvariantViolation

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-8
EIGENVALUE_ATOL = 1e-8
NORM_SLACK = 1e-12
DIAGONAL_CLAMP = 1e-10


def suggested_truncation(alpha: complex) -> int:
    """Fock cutoff keeping the Poisson tail of ``|alpha>`` below 1e-10.

    ceil(|a|^2 + 8|a| + 10) over-covers the tail for every amplitude; it is a
    convenience for callers, not enforced anywhere.
    """
    a = abs(alpha)
    if not math.isfinite(a):
        raise InvariantViolation("coherent amplitude must be finite")
    return math.ceil(a * a + 8.0 * a + 10.0)


@dataclass(frozen=True)
class FockVector:
    """Pure-state coefficients on a truncated Fock basis (single mode)."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.complex128)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise InvariantViolation("coefficients must be a non-empty 1-d array")
        if not np.all(np.isfinite(coeffs)):
            raise InvariantViolation("coefficients must be finite")
        norm_sq = float(np.vdot(coeffs, coeffs).real)
        # Truncation may lose norm, never gain it.
        if norm_sq > 1.0 + NORM_SLACK:
            raise InvariantViolation(f"squared norm {norm_sq} exceeds 1 + {NORM_SLACK}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n_trunc(self) -> int:
        return self.coefficients.size

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.coefficients, self.coefficients).real)

    def __array__(self, dtype=None, copy=None):
        arr = np.asarray(self.coefficients, dtype=dtype)
        return arr.copy() if copy else arr


def fock_basis_vector(n: int, n_trunc: int) -> FockVector:
    """The number state ``|n>`` on an ``n_trunc``-dimensional basis."""
    if not 0 <= n < n_trunc:
        raise DimensionMismatch(f"basis index {n} outside [0, {n_trunc})")
    coeffs = np.zeros(n_trunc, dtype=np.complex128)
    coeffs[n] = 1.0
    return FockVector(coeffs)


def coherent_fock_vector(alpha: complex, n_trunc: int) -> FockVector:
    """Truncated expansion of the coherent state ``|alpha>``.

    Coefficient k is exp(-|a|^2/2) a^k / sqrt(k!), evaluated through
    log-magnitudes (gammaln) so large k and large |a| stay finite.
    """
    if n_trunc < 1:
        raise InvariantViolation("n_trunc must be >= 1")
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise InvariantViolation("alpha must be finite")
    if alpha == 0:
        return fock_basis_vector(0, n_trunc)
    k = np.arange(n_trunc)
    a = abs(alpha)
    log_mag = -0.5 * a * a + k * math.log(a) - 0.5 * gammaln(k + 1.0)
    phase = k * np.angle(alpha)
    return FockVector(np.exp(log_mag + 1j * phase))


def coherent_overlap(gamma: complex, gamma_prime: complex) -> complex:
    """Exact inner product <gamma'|gamma> of two coherent states."""
    gamma = complex(gamma)
    gamma_prime = complex(gamma_prime)
    for value in (gamma, gamma_prime):
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise InvariantViolation("coherent amplitudes must be finite")
    exponent = (
        -0.5 * (gamma.real**2 + gamma.imag**2)
        - 0.5 * (gamma_prime.real**2 + gamma_prime.imag**2)
        + gamma_prime.conjugate() * gamma
    )
    return complex(np.exp(exponent))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix on truncated modes.

    ``mode_dims`` lists the per-mode truncations; the matrix dimension is
    their product (row-major joint indexing for two modes).
    """

    entries: np.ndarray
    mode_dims: tuple[int, ...]

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        mode_dims = tuple(int(d) for d in self.mode_dims)
        if not mode_dims or any(d < 1 for d in mode_dims):
            raise InvariantViolation("mode_dims must be positive")
        dim = math.prod(mode_dims)
        if entries.shape != (dim, dim):
            raise DimensionMismatch(
                f"entries shape {entries.shape} does not match mode_dims {mode_dims}"
            )
        if not np.all(np.isfinite(entries)):
            raise InvariantViolation("entries must be finite")
        herm_defect = float(np.max(np.abs(entries - entries.conj().T))) if dim else 0.0
        if herm_defect > HERMITICITY_ATOL:
            raise InvariantViolation(f"not Hermitian: max |M - M^H| = {herm_defect}")
        trace = float(entries.trace().real)
        if abs(trace - 1.0) > TRACE_ATOL:
            raise InvariantViolation(f"trace {trace} not within {TRACE_ATOL} of 1")
        min_eig = float(np.linalg.eigvalsh(entries)[0])
        if min_eig < -EIGENVALUE_ATOL:
            raise InvariantViolation(f"negative eigenvalue {min_eig}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "mode_dims", mode_dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_modes(self) -> int:
        return len(self.mode_dims)

    def __array__(self, dtype=None, copy=None):
        arr = np.asarray(self.entries, dtype=dtype)
        return arr.copy() if copy else arr

    @classmethod
    def from_unnormalized(cls, entries: np.ndarray,
                          mode_dims: tuple[int, ...]) -> "DensityMatrix":
        entries = np.asarray(entries, dtype=np.complex128)
        trace = entries.trace().real
        if trace <= 0:
            raise InvariantViolation(f"trace {trace} must be positive")
        return cls(entries / trace, mode_dims)

    @classmethod
    def from_pure(cls, vector, mode_dims: tuple[int, ...] | None = None) -> "DensityMatrix":
        """Outer product of a (re-normalized) pure state vector."""
        vec = np.asarray(vector, dtype=np.complex128).ravel()
        norm_sq = float(np.vdot(vec, vec).real)
        if norm_sq <= 0:
            raise InvariantViolation("cannot normalize a zero vector")
        if mode_dims is None:
            mode_dims = (vec.size,)
        return cls(np.outer(vec, vec.conj()) / norm_sq, mode_dims)

    @classmethod
    def fock_state(cls, n: int, n_trunc: int) -> "DensityMatrix":
        return cls.from_pure(fock_basis_vector(n, n_trunc))

    @classmethod
    def coherent_state(cls, beta: complex, n_trunc: int) -> "DensityMatrix":
        """Truncated coherent state, re-normalized to unit trace."""
        return cls.from_pure(coherent_fock_vector(beta, n_trunc))


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Joint state a (x) b; first factor owns the slow (row-major) index."""
    return DensityMatrix(np.kron(a.entries, b.entries), a.mode_dims + b.mode_dims)


def photon_number_distribution(rho: DensityMatrix) -> np.ndarray:
    """Diagonal of a single-mode density matrix as a probability vector.

    Round-off negativity down to -1e-10 is clamped to zero; anything worse is
    treated as a bug in the caller, not noise.
    """
    if rho.n_modes != 1:
        raise DimensionMismatch("photon_number_distribution expects a single mode")
    diag = rho.entries.diagonal().real.copy()
    worst = diag.min() if diag.size else 0.0
    if worst < -DIAGONAL_CLAMP:
        raise InvariantViolation(f"diagonal entry {worst} below -{DIAGONAL_CLAMP}")
    diag[diag < 0] = 0.0
    return diag


def fidelity_with_pure(rho: DensityMatrix, psi) -> float:
    """Overlap <psi|rho|psi>, normalized by |psi|^2 and tr(rho)."""
    vec = np.asarray(psi, dtype=np.complex128).ravel()
    if vec.size != rho.dim:
        raise DimensionMismatch(f"vector dim {vec.size} != matrix dim {rho.dim}")
    norm_sq = float(np.vdot(vec, vec).real)
    if norm_sq <= 0:
        raise InvariantViolation("target state has zero norm")
    value = float(np.vdot(vec, rho.entries @ vec).real)
    return value / (norm_sq * float(rho.entries.trace().real))


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2); equals 1 exactly for pure states."""
    return float(np.sum(np.abs(rho.entries) ** 2))


def partial_trace(rho: DensityMatrix, keep_mode: int) -> DensityMatrix:
    """Marginal state of one mode of a two-mode density matrix."""
    if rho.n_modes != 2:
        raise DimensionMismatch("partial_trace expects a two-mode matrix")
    if keep_mode not in (0, 1):
        raise DimensionMismatch(f"keep_mode must be 0 or 1, got {keep_mode}")
    d1, d2 = rho.mode_dims
    blocks = rho.entries.reshape(d1, d2, d1, d2)
    if keep_mode == 0:
        reduced = np.einsum("ijkj->ik", blocks)
    else:
        reduced = np.einsum("ijil->jl", blocks)
    # Contraction preserves trace and Hermiticity exactly up to round-off.
    return DensityMatrix(reduced, (rho.mode_dims[keep_mode],))
