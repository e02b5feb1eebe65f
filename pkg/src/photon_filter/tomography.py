"""Photon-number distribution measurement by scanning the cavity phase.

With a narrow comb (small tau, large pump) the ON probability at phase
setting psi = chi_t * n is dominated by the single diagonal element nu_nn, so
sweeping n and recording click frequencies reads out the photon-number
distribution. Dividing out the on-peak click factor 1 - exp(-eta |alpha|^2)
keeps the estimator unbiased even for low-efficiency detectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cavity import CavityParams, comb
from .exceptions import CombAliasingError, InvariantViolation
from .filtering import FilterInput, success_probability
from .fock import DensityMatrix


@dataclass(frozen=True)
class ScanRecord:
    """One scan point: target peak position, exact and estimated quantities."""

    n_star_target: int
    psi_used: float
    p_on_exact: float
    clicks: int
    shots: int
    nu_estimate: float

    def __post_init__(self):
        if not 0 <= self.clicks <= max(self.shots, 0):
            raise InvariantViolation("clicks must lie in [0, shots]")
        if not 0.0 <= self.p_on_exact <= 1.0:
            raise InvariantViolation("p_on_exact must lie in [0, 1]")


def _on_peak_click_probability(alpha: complex, eta: float) -> float:
    return -math.expm1(-eta * abs(alpha) ** 2)


def scan_distribution(nu: DensityMatrix, alpha: complex,
                      params_base: CavityParams, n_max: int) -> list[ScanRecord]:
    """Exact ON probabilities for peak positions n = 0..n_max.

    Requires l* > n_max so that at most one comb peak falls inside the
    scanned range; otherwise a second peak would alias into the estimate.
    """
    if params_base.n_kerr != 1:
        raise InvariantViolation("scans drive a single-Kerr cavity")
    l_star = comb(params_base).l_star
    if l_star <= n_max:
        raise CombAliasingError(
            f"comb spacing l* = {l_star:.4g} must exceed n_max = {n_max}; "
            "lower chi_t or reduce the scan range"
        )
    on_peak = _on_peak_click_probability(alpha, params_base.eta)
    records = []
    for n in range(n_max + 1):
        psi = params_base.chi_t * n
        params = replace(params_base, psi=psi)
        p_on = success_probability(FilterInput(nu=nu, alpha=alpha, params=params))
        records.append(
            ScanRecord(
                n_star_target=n, psi_used=psi, p_on_exact=p_on,
                clicks=0, shots=0, nu_estimate=p_on / on_peak,
            )
        )
    return records


def sample_clicks(p_on: float, shots: int, seed: int) -> int:
    """Binomial number of ON clicks out of ``shots`` trials, seeded."""
    if not 0.0 <= p_on <= 1.0:
        raise InvariantViolation(f"p_on must lie in [0, 1], got {p_on}")
    if shots < 0:
        raise InvariantViolation("shots must be nonnegative")
    rng = np.random.default_rng(seed)
    return int(rng.binomial(shots, p_on))


def sampled_scan(nu: DensityMatrix, alpha: complex, params_base: CavityParams,
                 n_max: int, shots: int = 100_000, seed: int = 0) -> list[ScanRecord]:
    """Scan with finite counting statistics; one derived seed per scan point."""
    on_peak = _on_peak_click_probability(alpha, params_base.eta)
    sampled = []
    for record in scan_distribution(nu, alpha, params_base, n_max):
        point_seed = int(
            np.random.SeedSequence([seed, record.n_star_target]).generate_state(1)[0]
        )
        clicks = sample_clicks(record.p_on_exact, shots, point_seed)
        sampled.append(
            replace(
                record,
                clicks=clicks,
                shots=shots,
                nu_estimate=(clicks / shots) / on_peak if shots else 0.0,
            )
        )
    return sampled
