"""Conditional Fock-state synthesis in a Kerr-coupled ring cavity.

A signal mode rides through a cross-Kerr medium inside a ring cavity pumped
by a coherent state; a successful ON click at the cavity output projects the
signal onto a comb of photon numbers. The package provides the closed-form
filtering engine, brute-force oracles that cross-validate it, photon-number
tomography by comb scanning, and a CLI that exports plot-ready data.
"""

__version__ = "0.1.0"

from .cavity import (
    CavityParams,
    CombParams,
    comb,
    comb_warnings,
    is_on_comb,
    kappa,
    phase_shift,
    sigma,
)
from .exceptions import (
    ClickProbabilityUnderflow,
    CombAliasingError,
    ConfigError,
    DimensionMismatch,
    InvariantViolation,
    PhotonFilterError,
    TruncationError,
)
from .filtering import (
    ConditionalResult,
    FilterInput,
    SuperpositionSpec,
    comb_photon_numbers,
    comb_population,
    conditional_output,
    design_superposition,
    entangled_target,
    fock_comb_target,
    success_probability,
    two_mode_conditional_output,
)
from .fock import (
    DensityMatrix,
    FockVector,
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
from .oracle import (
    CampaignCase,
    OracleReport,
    compare,
    off_trace,
    overlap_oracle,
    run_equivalence_campaign,
    tensor_oracle,
)
from .tomography import ScanRecord, sample_clicks, sampled_scan, scan_distribution

__all__ = [
    "CavityParams",
    "CombParams",
    "comb",
    "comb_warnings",
    "is_on_comb",
    "kappa",
    "phase_shift",
    "sigma",
    "ClickProbabilityUnderflow",
    "CombAliasingError",
    "ConfigError",
    "DimensionMismatch",
    "InvariantViolation",
    "PhotonFilterError",
    "TruncationError",
    "ConditionalResult",
    "FilterInput",
    "SuperpositionSpec",
    "comb_photon_numbers",
    "comb_population",
    "conditional_output",
    "design_superposition",
    "entangled_target",
    "fock_comb_target",
    "success_probability",
    "two_mode_conditional_output",
    "DensityMatrix",
    "FockVector",
    "coherent_fock_vector",
    "coherent_overlap",
    "fidelity_with_pure",
    "fock_basis_vector",
    "partial_trace",
    "photon_number_distribution",
    "purity",
    "suggested_truncation",
    "tensor_product",
    "CampaignCase",
    "OracleReport",
    "compare",
    "off_trace",
    "overlap_oracle",
    "run_equivalence_campaign",
    "tensor_oracle",
    "ScanRecord",
    "sample_clicks",
    "sampled_scan",
    "scan_distribution",
    "__version__",
]
