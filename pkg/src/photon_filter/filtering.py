"""Conditional state preparation by cavity filtering.

A signal state ``nu`` (mode d1) rides through the Kerr medium while the cavity
is pumped with a coherent state ``|alpha>``; registering an ON click at the
cavity output projects the signal onto the transmission comb. The matrix
elements of the unnormalized conditional state factorize as

    W[s, s'] = nu[s, s'] * T(s, s') * M(s, s')

where T is the overlap of the ignored-output coherent components
``|alpha kappa(phi_s)>`` and M is the ON-detection trace over the monitored
components ``gamma_s = alpha e^{i phi_s} sigma(phi_s)``:

    T(s, s') = <alpha kappa_{s'} | alpha kappa_s>
    M(s, s') = <gamma_{s'}|gamma_s> - e^{-(|gamma_s|^2+|gamma_{s'}|^2)/2}
               * e^{(1-eta) conj(gamma_{s'}) gamma_s}.

Both factors are evaluated through a single combined exponent so that no
intermediate ever exceeds unit modulus, which keeps pump amplitudes like
|alpha|^2 = 64 exactly representable. ``paper_literal=True`` drops the
e^{i(phi_s - phi_s')} phase inside the ON factor, reproducing the commonly
quoted approximate expression for comparison purposes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .cavity import CavityParams, comb, comb_warnings, kappa, phase_shift, sigma
from .exceptions import (
    ClickProbabilityUnderflow,
    DimensionMismatch,
    InvariantViolation,
)
from .fock import DensityMatrix

#: Conditional states with smaller ON probability are declared undefined
#: rather than renormalized noise.
P_ON_FLOOR = 1e-300

#: Tolerance for deciding that a comb peak n* + k l* hits an integer.
ON_COMB_ROUNDING = 1e-9


@dataclass(frozen=True)
class FilterInput:
    """Signal state, cavity pump and device settings for one filtering run."""

    nu: DensityMatrix
    alpha: complex
    params: CavityParams
    n_trunc: int | None = None

    def __post_init__(self):
        if self.nu.n_modes != 1:
            raise DimensionMismatch("signal state must live on a single mode")
        if self.params.n_kerr != 1:
            raise InvariantViolation(
                "single-mode filtering uses one Kerr crystal; "
                "see two_mode_conditional_output for n_kerr = 2"
            )
        alpha = complex(self.alpha)
        if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
            raise InvariantViolation("alpha must be finite")
        object.__setattr__(self, "alpha", alpha)
        if self.n_trunc is None:
            object.__setattr__(self, "n_trunc", self.nu.dim)
        elif self.n_trunc != self.nu.dim:
            raise DimensionMismatch(
                f"n_trunc {self.n_trunc} does not match signal dimension {self.nu.dim}"
            )


@dataclass(frozen=True)
class ConditionalResult:
    """Output of a filtering run: conditional state plus its click probability.

    ``normalizer`` is the trace of the unnormalized conditional operator; it
    coincides with ``p_on`` up to round-off and is kept separate so the
    internal consistency is testable.
    """

    rho_out: DensityMatrix
    p_on: float
    normalizer: float
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.p_on <= 1.0 + 1e-12:
            raise InvariantViolation(f"p_on {self.p_on} outside [0, 1]")
        if not self.normalizer > 0.0:
            raise InvariantViolation("normalizer must be positive")


@dataclass(frozen=True)
class SuperpositionSpec:
    """Target two-component superposition (|n*> + e^{i Phi} |n* + l*>)/sqrt(2)."""

    n_star: int
    l_star: int
    phase_Phi: float = 0.0

    def __post_init__(self):
        if self.n_star < 0 or self.l_star < 1:
            raise InvariantViolation("need n_star >= 0 and l_star >= 1")


def _click_factors(phis: np.ndarray, alpha: complex, params: CavityParams,
                   paper_literal: bool) -> np.ndarray:
    """Hermitian matrix of T(s,s') * M(s,s') factors for the given phases."""
    a_sq = abs(alpha) ** 2
    kap = kappa(phis, params.tau)
    sig = sigma(phis, params.tau)
    sig_rot = sig * np.exp(1j * phis)

    kk = np.outer(kap, kap.conj())
    ss = np.outer(sig_rot, sig_rot.conj())  # sigma_s sigma_s'* e^{i(phi_s - phi_s')}
    base = a_sq * (kk + ss - 1.0)  # Re <= 0 by |kappa|^2 + |sigma|^2 = 1
    on_term = ss if not paper_literal else np.outer(sig, sig.conj())
    return np.exp(base) - np.exp(base - params.eta * a_sq * on_term)


def _reduce(weighted: np.ndarray, mode_dims: tuple[int, ...],
            params: CavityParams) -> ConditionalResult:
    trace = weighted.trace()
    p_on = float(trace.real)
    if p_on < P_ON_FLOOR:
        if params.eta == 0.0:
            message = "detector efficiency is zero: the detector never clicks"
        else:
            message = (
                f"ON probability {p_on:.3e} underflows: the signal has no "
                "support on the transmission comb"
            )
        raise ClickProbabilityUnderflow(message, p_on=max(p_on, 0.0))
    rho_out = DensityMatrix(weighted / p_on, mode_dims)
    return ConditionalResult(
        rho_out=rho_out,
        p_on=min(p_on, 1.0),
        normalizer=p_on,
        warnings=comb_warnings(params),
    )


def conditional_output(inp: FilterInput, paper_literal: bool = False) -> ConditionalResult:
    """Conditional signal state and success probability after an ON click."""
    phis = phase_shift(np.arange(inp.nu.dim), inp.params)
    factors = _click_factors(phis, inp.alpha, inp.params, paper_literal)
    return _reduce(inp.nu.entries * factors, (inp.nu.dim,), inp.params)


def success_probability(inp: FilterInput) -> float:
    """Probability of an ON click: sum_k nu_kk (1 - exp(-eta |alpha sigma_k|^2))."""
    phis = phase_shift(np.arange(inp.nu.dim), inp.params)
    sig_sq = np.abs(sigma(phis, inp.params.tau)) ** 2
    weights = inp.nu.entries.diagonal().real
    clicks = -np.expm1(-inp.params.eta * abs(inp.alpha) ** 2 * sig_sq)
    return float(np.dot(weights, clicks))


def design_superposition(spec: SuperpositionSpec) -> complex:
    """Coherent signal amplitude that balances the n* and n* + l* comb peaks.

    Equal Poisson amplitudes |c_{n*}| = |c_{n*+l*}| require
    |beta|^2 = ((n* + l*)! / n*!)^(1/l*); the relative phase Phi of the target
    superposition fixes arg(beta) = Phi / l*.
    """
    log_ratio = gammaln(spec.n_star + spec.l_star + 1.0) - gammaln(spec.n_star + 1.0)
    modulus = math.exp(0.5 * log_ratio / spec.l_star)
    return modulus * complex(np.exp(1j * spec.phase_Phi / spec.l_star))


def two_mode_conditional_output(nu1: DensityMatrix, nu2: DensityMatrix,
                                alpha: complex, params: CavityParams,
                                paper_literal: bool = False) -> ConditionalResult:
    """Filtering with two Kerr crystals: both signal modes share the cavity.

    The round-trip phase depends on the joint photon number s1 + s2 only, so
    an ON click projects onto joint numbers on the comb; for small chi_t this
    entangles the two output modes.
    """
    if params.n_kerr != 2:
        raise InvariantViolation("two-mode filtering requires n_kerr = 2")
    if nu1.n_modes != 1 or nu2.n_modes != 1:
        raise DimensionMismatch("both signal states must be single-mode")
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise InvariantViolation("alpha must be finite")
    d1, d2 = nu1.dim, nu2.dim
    totals = np.add.outer(np.arange(d1), np.arange(d2)).ravel()
    phis = phase_shift(totals, params)
    factors = _click_factors(phis, alpha, params, paper_literal)
    joint = np.kron(nu1.entries, nu2.entries)
    return _reduce(joint * factors, (d1, d2), params)


def fock_comb_target(spec: SuperpositionSpec, n_trunc: int) -> np.ndarray:
    """State vector of the balanced two-peak superposition, for fidelity checks."""
    if spec.n_star + spec.l_star >= n_trunc:
        raise DimensionMismatch("truncation does not contain both comb peaks")
    vec = np.zeros(n_trunc, dtype=np.complex128)
    vec[spec.n_star] = 1.0 / math.sqrt(2.0)
    vec[spec.n_star + spec.l_star] = np.exp(1j * spec.phase_Phi) / math.sqrt(2.0)
    return vec


def entangled_target(nu1_vec: np.ndarray, nu2_vec: np.ndarray, n_star: int) -> np.ndarray:
    """Ideal-comb two-mode output sum_k c1_k c2_{n*-k} |k, n*-k>, normalized.

    Valid for pure input signals; the vector is returned on the joint
    (row-major) basis of the two truncated modes.
    """
    c1 = np.asarray(nu1_vec, dtype=np.complex128).ravel()
    c2 = np.asarray(nu2_vec, dtype=np.complex128).ravel()
    d1, d2 = c1.size, c2.size
    vec = np.zeros(d1 * d2, dtype=np.complex128)
    for k in range(max(0, n_star - d2 + 1), min(n_star, d1 - 1) + 1):
        vec[k * d2 + (n_star - k)] = c1[k] * c2[n_star - k]
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise InvariantViolation(f"inputs have no joint support with {n_star} photons")
    return vec / norm


def comb_population(rho: DensityMatrix, params: CavityParams) -> float:
    """Total population on photon numbers n* + k l* (single mode)."""
    peaks = comb_photon_numbers(params, rho.dim)
    diag = rho.entries.diagonal().real
    return float(diag[peaks].sum())


def comb_photon_numbers(params: CavityParams, n_trunc: int) -> np.ndarray:
    """Integer photon numbers below ``n_trunc`` that sit on transmission peaks."""
    params_comb = comb(params)
    peaks = []
    k = 0
    while True:
        value = params_comb.n_star + k * params_comb.l_star
        if value > n_trunc - 1 + ON_COMB_ROUNDING:
            break
        nearest = round(value)
        if abs(value - nearest) <= ON_COMB_ROUNDING and 0 <= nearest < n_trunc:
            peaks.append(nearest)
        k += 1
    return np.asarray(peaks, dtype=int)
