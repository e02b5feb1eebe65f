"""Brute-force cross-checks of the filtering engine.

Two independent evaluation routes for the same conditional state:

``tensor_oracle``
    Expands every coherent component of the joint output state into truncated
    Fock vectors and performs the ignored-mode trace and the ON-POM reduction
    by explicit index contraction. No closed-form overlap identity enters the
    traces, so a bug in the engine's exponent algebra cannot self-validate.

``overlap_oracle``
    Same trace targets written through the OFF-outcome identity
    Tr[Pi_OFF |g><g'|] = e^{-(|g|^2+|g'|^2)/2} e^{(1-eta) conj(g') g},
    assembled independently of the engine's combined-exponent code path.

``compare`` reduces two results to entrywise and probability deviations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cavity import CavityParams, kappa, phase_shift, sigma
from .exceptions import (
    ClickProbabilityUnderflow,
    DimensionMismatch,
    TruncationError,
)
from .filtering import ConditionalResult, FilterInput, conditional_output, success_probability
from .fock import DensityMatrix, coherent_fock_vector, coherent_overlap, suggested_truncation

#: Largest coherent-tail mass tolerated in a truncated expansion.
TAIL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class OracleReport:
    """Deviations between two conditional results on the same space."""

    max_abs_deviation: float
    p_on_deviation: float
    dims_used: tuple[int, ...]


def _reduce_checked(weighted: np.ndarray, mode_dims: tuple[int, ...],
                    params: CavityParams) -> ConditionalResult:
    trace = float(weighted.trace().real)
    if trace < 1e-300:
        raise ClickProbabilityUnderflow(
            f"ON probability {trace:.3e} underflows", p_on=max(trace, 0.0)
        )
    rho = DensityMatrix(weighted / trace, mode_dims)
    return ConditionalResult(rho_out=rho, p_on=min(trace, 1.0), normalizer=trace)


def tensor_oracle(inp: FilterInput, b_trunc: int | None = None) -> ConditionalResult:
    """Conditional state via truncated tensor expansion of the output modes.

    ``b_trunc`` is the Fock cutoff for both cavity output modes; by default it
    is sized so every coherent component keeps its tail below 1e-10, and a
    norm-loss check turns an insufficient cutoff into an error instead of a
    silently wrong answer.
    """
    if b_trunc is None:
        b_trunc = suggested_truncation(inp.alpha)
    phis = phase_shift(np.arange(inp.nu.dim), inp.params)
    kap = kappa(phis, inp.params.tau)
    sig = sigma(phis, inp.params.tau)

    ignored = np.array(
        [np.asarray(coherent_fock_vector(inp.alpha * k, b_trunc)) for k in kap]
    )
    monitored = np.array(
        [
            np.asarray(coherent_fock_vector(inp.alpha * np.exp(1j * p) * s, b_trunc))
            for p, s in zip(phis, sig)
        ]
    )
    for label, vectors in (("ignored", ignored), ("monitored", monitored)):
        tail = 1.0 - np.sum(np.abs(vectors) ** 2, axis=1)
        if np.any(tail > TAIL_TOLERANCE):
            raise TruncationError(
                f"b_trunc = {b_trunc} loses {tail.max():.3e} of the {label} "
                f"mode norm (tolerance {TAIL_TOLERANCE})"
            )

    # Trace over the ignored mode: T[s, s'] = sum_k u_s[k] conj(u_s'[k]).
    ignored_trace = ignored @ ignored.conj().T
    # ON-POM reduction of the monitored mode by explicit summation over the
    # diagonal POM weights 1 - (1 - eta)^j.
    pom_on = 1.0 - (1.0 - inp.params.eta) ** np.arange(b_trunc)
    on_trace = (monitored * pom_on) @ monitored.conj().T

    weighted = inp.nu.entries * ignored_trace * on_trace
    return _reduce_checked(weighted, (inp.nu.dim,), inp.params)


def off_trace(gamma: complex, gamma_prime: complex, eta: float) -> complex:
    """Closed form of Tr[Pi_OFF |gamma><gamma'|] for detector efficiency eta."""
    gamma = complex(gamma)
    gamma_prime = complex(gamma_prime)
    exponent = (
        -0.5 * (abs(gamma) ** 2 + abs(gamma_prime) ** 2)
        + (1.0 - eta) * gamma_prime.conjugate() * gamma
    )
    return complex(np.exp(exponent))


def overlap_oracle(inp: FilterInput) -> ConditionalResult:
    """Conditional state via per-pair coherent overlaps and the OFF identity."""
    dim = inp.nu.dim
    phis = phase_shift(np.arange(dim), inp.params)
    kap = kappa(phis, inp.params.tau)
    sig = sigma(phis, inp.params.tau)
    gammas = inp.alpha * np.exp(1j * phis) * sig

    ignored_trace = np.empty((dim, dim), dtype=np.complex128)
    on_trace = np.empty((dim, dim), dtype=np.complex128)
    for s in range(dim):
        for sp in range(dim):
            ignored_trace[s, sp] = coherent_overlap(inp.alpha * kap[s], inp.alpha * kap[sp])
            on_trace[s, sp] = coherent_overlap(gammas[s], gammas[sp]) - off_trace(
                gammas[s], gammas[sp], inp.params.eta
            )

    weighted = inp.nu.entries * ignored_trace * on_trace
    return _reduce_checked(weighted, (dim,), inp.params)


def compare(engine: ConditionalResult, reference: ConditionalResult) -> OracleReport:
    """Entrywise and probability deviation between two conditional results."""
    if engine.rho_out.mode_dims != reference.rho_out.mode_dims:
        raise DimensionMismatch(
            f"mode dims differ: {engine.rho_out.mode_dims} vs "
            f"{reference.rho_out.mode_dims}"
        )
    max_abs = float(np.max(np.abs(engine.rho_out.entries - reference.rho_out.entries)))
    return OracleReport(
        max_abs_deviation=max_abs,
        p_on_deviation=abs(engine.p_on - reference.p_on),
        dims_used=engine.rho_out.mode_dims,
    )


@dataclass(frozen=True)
class CampaignCase:
    """One randomized equivalence check: drawn parameters plus both reports."""

    index: int
    alpha: complex
    tau: float
    chi_t: float
    psi: float
    eta: float
    dim: int
    p_on: float
    vs_tensor: OracleReport
    vs_overlap: OracleReport


def _random_signal(rng: np.random.Generator, dim: int, flavor: int) -> DensityMatrix:
    if flavor == 0:  # full-rank mixed state (Ginibre)
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        return DensityMatrix.from_unnormalized(g @ g.conj().T, (dim,))
    if flavor == 1:  # random pure state
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return DensityMatrix.from_pure(v)
    beta = rng.uniform(0.3, 1.5) * np.exp(2j * np.pi * rng.uniform())
    return DensityMatrix.coherent_state(beta, dim)


def _draw_case_input(seed: int, index: int) -> FilterInput:
    """Deterministic random filter input with a non-degenerate ON probability."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    for _ in range(64):
        dim = int(rng.integers(2, 13))
        params = CavityParams(
            tau=float(10.0 ** rng.uniform(-1.3, 0.0)),
            chi_t=float(rng.uniform(0.1, 2.0)),
            psi=float(rng.uniform(0.0, 2.0 * np.pi)),
            eta=float(rng.uniform(0.1, 1.0)),
        )
        alpha = rng.uniform(0.5, 3.0) * np.exp(2j * np.pi * rng.uniform())
        nu = _random_signal(rng, dim, int(rng.integers(0, 3)))
        inp = FilterInput(nu=nu, alpha=complex(alpha), params=params)
        # Tiny click probabilities amplify round-off in the normalized state
        # beyond what an equivalence check can attribute to real bugs.
        if success_probability(inp) >= 1e-4:
            return inp
    raise RuntimeError("could not draw a usable random case")  # pragma: no cover


def run_case(seed: int, index: int) -> CampaignCase:
    inp = _draw_case_input(seed, index)
    engine = conditional_output(inp)
    report_tensor = compare(engine, tensor_oracle(inp))
    report_overlap = compare(engine, overlap_oracle(inp))
    p = inp.params
    return CampaignCase(
        index=index, alpha=inp.alpha, tau=p.tau, chi_t=p.chi_t, psi=p.psi,
        eta=p.eta, dim=inp.nu.dim, p_on=engine.p_on,
        vs_tensor=report_tensor, vs_overlap=report_overlap,
    )


def run_equivalence_campaign(n_cases: int = 100, seed: int = 0,
                             max_workers: int = 1) -> list[CampaignCase]:
    """Randomized engine-vs-oracle agreement campaign, seeded per case."""
    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(lambda i: run_case(seed, i), range(n_cases)))
    return [run_case(seed, i) for i in range(n_cases)]
