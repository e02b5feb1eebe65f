"""Algebraic model of the Kerr-coupled ring cavity.

The cavity couples to travelling modes through two beam splitters of
transmissivity ``tau``; a cross-Kerr medium plus a tunable shifter imprint a
photon-number dependent round-trip phase

    phi_n = psi - n_kerr * chi_t * n,

where ``n`` counts signal photons (summed over signal modes when two Kerr
crystals are present). The effective reflection/transmission amplitudes are

    kappa(phi) = sqrt(1 - tau) (e^{i phi} - 1) / (1 - (1 - tau) e^{i phi})
    sigma(phi) = tau / (1 - (1 - tau) e^{i phi})

with |kappa|^2 + |sigma|^2 = 1. As tau -> 0, |sigma(phi_n)| collapses onto a
comb of photon numbers n = n* + k l*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantViolation

#: |n* - round(n*)| below this counts as an integer (on-comb) peak position.
ON_COMB_ATOL = 1e-9


@dataclass(frozen=True)
class CavityParams:
    """Physical knobs of the device.

    tau: beam-splitter transmissivity, 0 < tau <= 1
    chi_t: Kerr susceptibility times interaction time (radians per photon)
    psi: phase-shifter setting (radians)
    eta: detector quantum efficiency in [0, 1]
    n_kerr: number of identical Kerr crystals in the loop (1 or 2)
    """

    tau: float
    chi_t: float
    psi: float
    eta: float = 1.0
    n_kerr: int = 1

    def __post_init__(self):
        if not 0.0 < self.tau <= 1.0:
            raise InvariantViolation(f"tau must be in (0, 1], got {self.tau}")
        if not self.chi_t > 0.0:
            raise InvariantViolation(f"chi_t must be positive, got {self.chi_t}")
        if not 0.0 <= self.eta <= 1.0:
            raise InvariantViolation(f"eta must be in [0, 1], got {self.eta}")
        if self.n_kerr not in (1, 2):
            raise InvariantViolation(f"n_kerr must be 1 or 2, got {self.n_kerr}")
        if not math.isfinite(self.psi):
            raise InvariantViolation("psi must be finite")


@dataclass(frozen=True)
class CombParams:
    """Transmission comb: first peak at n_star, successive peaks l_star apart."""

    l_star: float
    n_star: float


def phase_shift(n, params: CavityParams):
    """Round-trip phase seen by the cavity when the signal holds ``n`` photons.

    With two Kerr crystals each contributes twice the single-crystal shift per
    photon, which keeps the printed comb formulas l* = pi/(chi t) and
    n* = psi/(2 chi t) exact; ``n`` is then the joint photon number.
    """
    return params.psi - params.n_kerr * params.chi_t * np.asarray(n, dtype=float)


def kappa(phi, tau: float):
    """Effective reflection amplitude; exactly 0 at phi = 0 for any tau."""
    if not 0.0 < tau <= 1.0:
        raise InvariantViolation(f"tau must be in (0, 1], got {tau}")
    z = np.exp(1j * np.asarray(phi, dtype=float))
    # Denominator written as (1 - z) + tau z so that phi = 0 gives exactly tau.
    return np.sqrt(1.0 - tau) * (z - 1.0) / ((1.0 - z) + tau * z)


def sigma(phi, tau: float):
    """Effective transmission amplitude; exactly 1 at phi = 0 for any tau."""
    if not 0.0 < tau <= 1.0:
        raise InvariantViolation(f"tau must be in (0, 1], got {tau}")
    z = np.exp(1j * np.asarray(phi, dtype=float))
    return tau / ((1.0 - z) + tau * z)


def comb(params: CavityParams) -> CombParams:
    """Peak spacing and first-peak position of the transmission comb."""
    scale = params.n_kerr * params.chi_t
    return CombParams(l_star=2.0 * math.pi / scale, n_star=params.psi / scale)


def is_on_comb(params: CavityParams, atol: float = ON_COMB_ATOL) -> bool:
    """Whether the first peak sits on an integer photon number."""
    n_star = comb(params).n_star
    return abs(n_star - round(n_star)) <= atol


def comb_warnings(params: CavityParams) -> tuple[str, ...]:
    """Advisory messages about comb settings that suppress all output."""
    if is_on_comb(params):
        return ()
    n_star = comb(params).n_star
    return (
        f"n_star = {n_star:.6g} is not an integer: no photon number sits on a "
        "transmission peak and the conditional output is heavily suppressed",
    )
