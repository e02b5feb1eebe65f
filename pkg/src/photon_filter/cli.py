"""Command-line front end.

One JSON config document (or a named preset) describes a run; artifacts are
written to an output directory as plot-ready CSV/JSON plus a manifest that
records every resolved parameter and metric. Identical config + seed yields
bit-identical files: no timestamps, sorted JSON keys, shortest round-trip
float formatting, atomic write-then-rename.

Exit codes: 0 success, 1 failed validation campaign, 2 config error,
3 engine error, 4 I/O error. On failure a machine-readable error JSON is
printed and, when possible, written next to the other artifacts.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .cavity import CavityParams, comb, sigma
from .exceptions import ConfigError, PhotonFilterError
from .filtering import (
    FilterInput,
    SuperpositionSpec,
    comb_population,
    conditional_output,
    design_superposition,
    entangled_target,
    fock_comb_target,
    two_mode_conditional_output,
)
from .fock import (
    DensityMatrix,
    coherent_fock_vector,
    fidelity_with_pure,
    fock_basis_vector,
    photon_number_distribution,
    purity,
    suggested_truncation,
)
from .oracle import run_equivalence_campaign
from .tomography import sampled_scan

SCHEMA_VERSION = 1
MODES = (
    "prepare-fock",
    "prepare-superposition",
    "entangle",
    "scan-pon",
    "sweep",
    "validate-oracle",
)
SWEEP_AXES = ("tau", "eta", "alpha_abs", "psi", "chi_t")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_ENGINE = 3
EXIT_IO = 4

CAMPAIGN_RHO_TOL = 1e-8
CAMPAIGN_PON_TOL = 1e-10


def thread_limit(default: int = 4) -> int:
    """Worker cap for internal parallelism, honoring PHOTON_FILTER_THREADS."""
    limit = min(default, os.cpu_count() or 1)
    env = os.environ.get("PHOTON_FILTER_THREADS")
    if env is not None:
        try:
            limit = min(limit, int(env))
        except ValueError as exc:
            raise ConfigError(f"PHOTON_FILTER_THREADS must be an integer: {env}") from exc
    return max(limit, 1)


# ---------------------------------------------------------------------------
# JSON helpers


def _parse_complex(value: Any, field: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{field} must be a number or an [re, im] pair, got {value!r}")


def _complex_pair(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


def _matrix_to_json(rho: DensityMatrix) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "mode_dims": list(rho.mode_dims),
        "entries": [[_complex_pair(v) for v in row] for row in rho.entries],
    }


def _matrix_from_json(doc: dict, source: str) -> DensityMatrix:
    try:
        mode_dims = tuple(int(d) for d in doc["mode_dims"])
        entries = np.array(
            [[complex(re, im) for re, im in row] for row in doc["entries"]],
            dtype=np.complex128,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: malformed density matrix document: {exc}") from exc
    return DensityMatrix(entries, mode_dims)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", dir=path.parent, prefix=f".{path.name}.", delete=False, encoding="utf-8"
    )
    try:
        handle.write(text)
        handle.flush()
        os.fsync(handle.fileno())
        handle.close()
        os.replace(handle.name, path)
    except BaseException:
        handle.close()
        os.unlink(handle.name)
        raise


def _write_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Config resolution


@dataclass(frozen=True)
class SignalSpec:
    kind: str  # coherent | fock | custom
    beta: complex = 0.0
    n: int = 0
    path: str = ""

    def describe(self) -> dict:
        if self.kind == "coherent":
            return {"kind": "coherent", "beta": _complex_pair(self.beta)}
        if self.kind == "fock":
            return {"kind": "fock", "n": self.n}
        return {"kind": "custom", "path": self.path}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    cavity: CavityParams
    alpha: complex
    signal: SignalSpec | None
    signal2: SignalSpec | None
    superposition: SuperpositionSpec | None
    n_trunc: tuple[int, ...]
    seed: int
    shots: int
    n_max: int
    sweep_axis: str
    sweep_values: tuple[float, ...]
    cases: int
    extras: tuple[str, ...]
    paper_literal: bool
    output_dir: str | None
    base_dir: Path


def _parse_signal(doc: Any, field: str, base_dir: Path) -> SignalSpec:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError(f"{field} must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "coherent":
        return SignalSpec(kind="coherent", beta=_parse_complex(doc.get("beta"), f"{field}.beta"))
    if kind == "fock":
        n = doc.get("n")
        if not isinstance(n, int) or n < 0:
            raise ConfigError(f"{field}.n must be a nonnegative integer")
        return SignalSpec(kind="fock", n=n)
    if kind == "custom":
        path = doc.get("path")
        if not isinstance(path, str):
            raise ConfigError(f"{field}.path must be a string")
        resolved = (base_dir / path).resolve()
        if not resolved.is_file():
            raise ConfigError(f"{field}.path does not exist: {resolved}")
        return SignalSpec(kind="custom", path=str(resolved))
    raise ConfigError(f"{field}.kind must be coherent, fock or custom, got {kind!r}")


def _signal_matrix(spec: SignalSpec, n_trunc: int | None) -> tuple[DensityMatrix, int]:
    if spec.kind == "coherent":
        dim = n_trunc or suggested_truncation(spec.beta)
        return DensityMatrix.coherent_state(spec.beta, dim), dim
    if spec.kind == "fock":
        dim = n_trunc or spec.n + 5
        if spec.n >= dim:
            raise ConfigError(f"fock index {spec.n} needs n_trunc > {spec.n}")
        return DensityMatrix.fock_state(spec.n, dim), dim
    with open(spec.path, encoding="utf-8") as handle:
        doc = json.load(handle)
    rho = _matrix_from_json(doc, spec.path)
    if rho.n_modes != 1:
        raise ConfigError(f"{spec.path}: signal matrix must be single-mode")
    if n_trunc is not None and rho.dim != n_trunc:
        raise ConfigError(f"{spec.path}: dimension {rho.dim} != n_trunc {n_trunc}")
    return rho, rho.dim


def _signal_vector(spec: SignalSpec, dim: int) -> np.ndarray | None:
    """Pure-state coefficients for fidelity targets, when the signal is pure."""
    if spec.kind == "coherent":
        return np.asarray(coherent_fock_vector(spec.beta, dim))
    if spec.kind == "fock":
        return np.asarray(fock_basis_vector(spec.n, dim))
    return None


def _resolve_cavity(doc: dict, mode: str,
                    superposition: SuperpositionSpec | None) -> CavityParams:
    cavity = doc.get("cavity")
    if not isinstance(cavity, dict):
        raise ConfigError("config needs a 'cavity' object")
    unknown = set(cavity) - {"tau", "chi_t", "psi", "eta", "n_kerr"}
    if unknown:
        raise ConfigError(f"unknown cavity fields: {sorted(unknown)}")
    n_kerr = int(cavity.get("n_kerr", 2 if mode == "entangle" else 1))
    chi_t = cavity.get("chi_t")
    psi = cavity.get("psi")
    if superposition is not None:
        if chi_t is None:
            chi_t = 2.0 * math.pi / superposition.l_star
        if psi is None:
            psi = chi_t * superposition.n_star
    if psi is None and "n_star" in doc:
        if chi_t is None:
            raise ConfigError("deriving psi from n_star requires cavity.chi_t")
        psi = n_kerr * chi_t * int(doc["n_star"])
    if mode == "scan-pon" and psi is None:
        psi = 0.0  # replaced point by point during the scan
    if chi_t is None or psi is None:
        raise ConfigError("cavity.chi_t and cavity.psi (or n_star) are required")
    try:
        return CavityParams(
            tau=float(cavity["tau"]),
            chi_t=float(chi_t),
            psi=float(psi),
            eta=float(cavity.get("eta", 1.0)),
            n_kerr=n_kerr,
        )
    except KeyError as exc:
        raise ConfigError(f"cavity is missing field {exc}") from exc
    except PhotonFilterError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_sweep(doc: dict) -> tuple[str, tuple[float, ...]]:
    sweep = doc.get("sweep")
    if not isinstance(sweep, dict):
        raise ConfigError("sweep mode needs a 'sweep' object")
    axis = sweep.get("axis")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}, got {axis!r}")
    if "values" in sweep:
        values = tuple(float(v) for v in sweep["values"])
    else:
        try:
            lo, hi, steps = float(sweep["min"]), float(sweep["max"]), int(sweep["steps"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("sweep needs 'values' or min/max/steps") from exc
        if steps < 0:
            raise ConfigError("sweep.steps must be >= 0")
        if sweep.get("scale", "linear") == "log":
            if lo <= 0 or hi <= 0:
                raise ConfigError("log sweep requires positive bounds")
            values = tuple(float(v) for v in np.geomspace(lo, hi, steps)) if steps else ()
        else:
            values = tuple(float(v) for v in np.linspace(lo, hi, steps)) if steps else ()
    return axis, values


def load_config(doc: dict, base_dir: Path) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    mode = doc.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")

    superposition = None
    if "superposition" in doc:
        sup = doc["superposition"]
        try:
            superposition = SuperpositionSpec(
                n_star=int(sup["n_star"]),
                l_star=int(sup["l_star"]),
                phase_Phi=float(sup.get("phase", 0.0)),
            )
        except (KeyError, TypeError, ValueError, PhotonFilterError) as exc:
            raise ConfigError(f"bad superposition spec: {exc}") from exc
    needs_superposition = mode == "prepare-superposition" or (
        mode == "sweep" and "superposition" in doc
    )
    if mode == "prepare-superposition" and superposition is None:
        raise ConfigError("prepare-superposition needs a 'superposition' object")

    if mode == "validate-oracle":
        # The campaign draws its own parameters; any cavity block is ignored.
        cavity = CavityParams(tau=0.5, chi_t=1.0, psi=0.0)
    else:
        cavity = _resolve_cavity(doc, mode, superposition if needs_superposition else None)

    alpha = _parse_complex(doc.get("alpha", 0.0), "alpha")

    n_trunc_doc = doc.get("n_trunc")
    if n_trunc_doc is None:
        n_trunc: tuple[int, ...] = ()
    elif isinstance(n_trunc_doc, int):
        n_trunc = (n_trunc_doc,)
    elif isinstance(n_trunc_doc, list) and all(isinstance(v, int) for v in n_trunc_doc):
        n_trunc = tuple(n_trunc_doc)
    else:
        raise ConfigError("n_trunc must be an integer or a list of integers")
    if any(v < 2 for v in n_trunc):
        raise ConfigError("n_trunc must be >= 2")

    signal = None
    if "signal" in doc:
        if needs_superposition:
            raise ConfigError("the signal is derived from 'superposition'; drop 'signal'")
        signal = _parse_signal(doc["signal"], "signal", base_dir)
    if needs_superposition and superposition is not None:
        signal = SignalSpec(kind="coherent", beta=design_superposition(superposition))
    signal2 = (
        _parse_signal(doc["signal2"], "signal2", base_dir) if "signal2" in doc else None
    )

    if mode in ("prepare-fock", "scan-pon") and signal is None:
        raise ConfigError(f"{mode} needs a 'signal' object")
    if mode == "entangle" and (signal is None or signal2 is None):
        raise ConfigError("entangle needs 'signal' and 'signal2' objects")
    if mode == "sweep" and signal is None:
        raise ConfigError("sweep needs a 'signal' or 'superposition' object")

    sweep_axis, sweep_values = ("", ())
    if mode == "sweep":
        sweep_axis, sweep_values = _resolve_sweep(doc)

    extras = doc.get("extras", [])
    if not isinstance(extras, list) or any(e != "sigma-surface" for e in extras):
        raise ConfigError("extras may only contain 'sigma-surface'")

    return RunConfig(
        mode=mode,
        cavity=cavity,
        alpha=alpha,
        signal=signal,
        signal2=signal2,
        superposition=superposition,
        n_trunc=n_trunc,
        seed=int(doc.get("seed", 0)),
        shots=int(doc.get("shots", 100_000)),
        n_max=int(doc.get("n_max", 10)),
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        cases=int(doc.get("cases", 100)),
        extras=tuple(extras),
        paper_literal=bool(doc.get("paper_literal", False)),
        output_dir=doc.get("output_dir"),
        base_dir=base_dir,
    )


def preset_names() -> list[str]:
    root = resources.files("photon_filter").joinpath("presets")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    resource = resources.files("photon_filter").joinpath("presets", f"{name}.json")
    if not resource.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return json.loads(resource.read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# Run modes


def _manifest_skeleton(config: RunConfig) -> dict:
    comb_params = comb(config.cavity)
    return {
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "mode": config.mode,
        "paper_literal": config.paper_literal,
        "seed": config.seed,
        "parameters": {
            "cavity": asdict(config.cavity),
            "comb": {"l_star": comb_params.l_star, "n_star": comb_params.n_star},
            "alpha": _complex_pair(config.alpha),
        },
        "results": {},
        "warnings": [],
    }


def _fidelity_target(config: RunConfig, n_trunc: int) -> tuple[np.ndarray | None, str | None]:
    if config.superposition is not None:
        spec = config.superposition
        return (
            fock_comb_target(spec, n_trunc),
            f"superposition:{spec.n_star}+{spec.n_star + spec.l_star}",
        )
    n_star = comb(config.cavity).n_star
    nearest = round(n_star)
    if abs(n_star - nearest) <= 1e-9 and 0 <= nearest < n_trunc:
        return np.asarray(fock_basis_vector(nearest, n_trunc)), f"fock:{nearest}"
    return None, None


def _distribution_rows(probabilities: np.ndarray) -> list[list]:
    return [[n, float(p)] for n, p in enumerate(probabilities)]


def _write_distribution(out_dir: Path, fmt: str, header: list[str], rows: list[list]) -> None:
    if fmt == "csv":
        _write_csv(out_dir / "distribution.csv", header, rows)
    else:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "columns": header,
            "rows": rows,
        }
        _write_json(out_dir / "distribution.json", payload)


def _write_sigma_surface(out_dir: Path, tau: float, points: int = 129) -> None:
    phi = np.linspace(-2.0 * math.pi, 2.0 * math.pi, points)
    trans = np.abs(sigma(phi, tau))
    rows = []
    for i, phi_s in enumerate(phi):
        for j, phi_sp in enumerate(phi):
            rows.append([float(phi_s), float(phi_sp), float(trans[i] * trans[j])])
    _write_csv(out_dir / "sigma_surface.csv", ["phi_s", "phi_s_prime", "abs_sigma_sigma"], rows)


def _run_prepare(config: RunConfig, out_dir: Path, fmt: str) -> dict:
    n_trunc = config.n_trunc[0] if config.n_trunc else None
    nu, dim = _signal_matrix(config.signal, n_trunc)
    inp = FilterInput(nu=nu, alpha=config.alpha, params=config.cavity, n_trunc=dim)
    result = conditional_output(inp, paper_literal=config.paper_literal)

    distribution = photon_number_distribution(result.rho_out)
    target, target_label = _fidelity_target(config, dim)

    manifest = _manifest_skeleton(config)
    manifest["parameters"]["signal"] = config.signal.describe()
    manifest["parameters"]["n_trunc"] = dim
    manifest["warnings"] = list(result.warnings)
    manifest["results"] = {
        "p_on": result.p_on,
        "normalizer": result.normalizer,
        "purity": purity(result.rho_out),
        "fidelity": (
            fidelity_with_pure(result.rho_out, target) if target is not None else None
        ),
        "fidelity_target": target_label,
        "argmax_n": int(np.argmax(distribution)),
        "comb_population": comb_population(result.rho_out, config.cavity),
    }

    _write_distribution(out_dir, fmt, ["n", "probability"], _distribution_rows(distribution))
    _write_json(out_dir / "density_matrix.json", _matrix_to_json(result.rho_out))
    if "sigma-surface" in config.extras:
        _write_sigma_surface(out_dir, config.cavity.tau)
    return manifest


def _run_entangle(config: RunConfig, out_dir: Path, fmt: str) -> dict:
    if len(config.n_trunc) == 1:
        dims: tuple[int | None, int | None] = (config.n_trunc[0], config.n_trunc[0])
    elif len(config.n_trunc) == 2:
        dims = (config.n_trunc[0], config.n_trunc[1])
    else:
        dims = (None, None)
    nu1, d1 = _signal_matrix(config.signal, dims[0])
    nu2, d2 = _signal_matrix(config.signal2, dims[1])
    result = two_mode_conditional_output(
        nu1, nu2, config.alpha, config.cavity, paper_literal=config.paper_literal
    )

    diagonal = result.rho_out.entries.diagonal().real.clip(min=0.0)
    rows = [
        [s1, s2, float(diagonal[s1 * d2 + s2])] for s1 in range(d1) for s2 in range(d2)
    ]

    fidelity = None
    target_label = None
    n_star = comb(config.cavity).n_star
    vec1 = _signal_vector(config.signal, d1)
    vec2 = _signal_vector(config.signal2, d2)
    if vec1 is not None and vec2 is not None and abs(n_star - round(n_star)) <= 1e-9:
        target = entangled_target(vec1, vec2, round(n_star))
        fidelity = fidelity_with_pure(result.rho_out, target)
        target_label = f"entangled:{round(n_star)}"

    manifest = _manifest_skeleton(config)
    manifest["parameters"]["signal"] = config.signal.describe()
    manifest["parameters"]["signal2"] = config.signal2.describe()
    manifest["parameters"]["n_trunc"] = [d1, d2]
    manifest["warnings"] = list(result.warnings)
    manifest["results"] = {
        "p_on": result.p_on,
        "normalizer": result.normalizer,
        "purity": purity(result.rho_out),
        "fidelity": fidelity,
        "fidelity_target": target_label,
    }

    if fmt == "csv":
        _write_csv(out_dir / "distribution.csv", ["n1", "n2", "probability"], rows)
    else:
        _write_json(
            out_dir / "distribution.json",
            {"schema_version": SCHEMA_VERSION, "columns": ["n1", "n2", "probability"], "rows": rows},
        )
    _write_json(out_dir / "density_matrix.json", _matrix_to_json(result.rho_out))
    return manifest


def _run_scan(config: RunConfig, out_dir: Path, fmt: str) -> dict:
    n_trunc = config.n_trunc[0] if config.n_trunc else None
    nu, dim = _signal_matrix(config.signal, n_trunc)
    records = sampled_scan(
        nu, config.alpha, config.cavity, config.n_max,
        shots=config.shots, seed=config.seed,
    )
    header = ["n_star_target", "psi_used", "p_on_exact", "clicks", "shots", "nu_estimate"]
    rows = [
        [r.n_star_target, r.psi_used, r.p_on_exact, r.clicks, r.shots, r.nu_estimate]
        for r in records
    ]
    manifest = _manifest_skeleton(config)
    manifest["parameters"]["signal"] = config.signal.describe()
    manifest["parameters"]["n_trunc"] = dim
    manifest["results"] = {
        "points": len(records),
        "shots": config.shots,
        "estimate_sum": float(sum(r.nu_estimate for r in records)),
    }
    if fmt == "csv":
        _write_csv(out_dir / "scan.csv", header, rows)
    else:
        _write_json(
            out_dir / "scan.json",
            {"schema_version": SCHEMA_VERSION, "columns": header, "rows": rows},
        )
    return manifest


def _apply_axis(config: RunConfig, axis: str, value: float) -> RunConfig:
    if axis == "alpha_abs":
        phase = np.angle(config.alpha) if config.alpha != 0 else 0.0
        return replace(config, alpha=value * complex(np.exp(1j * phase)))
    return replace(config, cavity=replace(config.cavity, **{axis: value}))


def _run_sweep(config: RunConfig, out_dir: Path, fmt: str) -> dict:
    n_trunc = config.n_trunc[0] if config.n_trunc else None
    nu, dim = _signal_matrix(config.signal, n_trunc)
    target, target_label = _fidelity_target(config, dim)

    def one_point(value: float) -> list:
        point = _apply_axis(config, config.sweep_axis, value)
        inp = FilterInput(nu=nu, alpha=point.alpha, params=point.cavity, n_trunc=dim)
        result = conditional_output(inp, paper_literal=point.paper_literal)
        fid = fidelity_with_pure(result.rho_out, target) if target is not None else math.nan
        return [float(value), result.p_on, fid, purity(result.rho_out)]

    workers = thread_limit()
    if workers > 1 and len(config.sweep_values) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one_point, config.sweep_values))
    else:
        rows = [one_point(v) for v in config.sweep_values]

    header = [config.sweep_axis, "p_on", "fidelity", "purity"]
    manifest = _manifest_skeleton(config)
    manifest["parameters"]["signal"] = config.signal.describe()
    manifest["parameters"]["n_trunc"] = dim
    manifest["results"] = {
        "axis": config.sweep_axis,
        "rows": len(rows),
        "fidelity_target": target_label,
    }
    if fmt == "csv":
        _write_csv(out_dir / "sweep.csv", header, rows)
    else:
        _write_json(
            out_dir / "sweep.json",
            {"schema_version": SCHEMA_VERSION, "columns": header, "rows": rows},
        )
    return manifest


def _run_validate(config: RunConfig, out_dir: Path, fmt: str) -> tuple[dict, bool]:
    cases = run_equivalence_campaign(
        n_cases=config.cases, seed=config.seed, max_workers=thread_limit()
    )
    header = [
        "case", "alpha_re", "alpha_im", "tau", "chi_t", "psi", "eta", "dim", "p_on",
        "max_dev_tensor", "p_on_dev_tensor", "max_dev_overlap", "p_on_dev_overlap",
    ]
    rows = [
        [
            c.index, c.alpha.real, c.alpha.imag, c.tau, c.chi_t, c.psi, c.eta, c.dim,
            c.p_on, c.vs_tensor.max_abs_deviation, c.vs_tensor.p_on_deviation,
            c.vs_overlap.max_abs_deviation, c.vs_overlap.p_on_deviation,
        ]
        for c in cases
    ]
    worst_rho = max(
        max(c.vs_tensor.max_abs_deviation for c in cases),
        max(c.vs_overlap.max_abs_deviation for c in cases),
    )
    worst_pon = max(
        max(c.vs_tensor.p_on_deviation for c in cases),
        max(c.vs_overlap.p_on_deviation for c in cases),
    )
    passed = worst_rho <= CAMPAIGN_RHO_TOL and worst_pon <= CAMPAIGN_PON_TOL

    manifest = _manifest_skeleton(config)
    del manifest["parameters"]["cavity"], manifest["parameters"]["comb"]
    del manifest["parameters"]["alpha"]
    manifest["results"] = {
        "cases": len(cases),
        "max_abs_deviation": worst_rho,
        "max_p_on_deviation": worst_pon,
        "rho_tolerance": CAMPAIGN_RHO_TOL,
        "p_on_tolerance": CAMPAIGN_PON_TOL,
        "passed": passed,
    }
    if fmt == "csv":
        _write_csv(out_dir / "oracle_report.csv", header, rows)
    else:
        _write_json(
            out_dir / "oracle_report.json",
            {"schema_version": SCHEMA_VERSION, "columns": header, "rows": rows},
        )
    return manifest, passed


def run(config: RunConfig, out_dir: Path, fmt: str = "csv") -> tuple[int, dict]:
    """Execute one resolved configuration; returns (exit_code, manifest)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    exit_code = EXIT_OK
    if config.mode in ("prepare-fock", "prepare-superposition"):
        manifest = _run_prepare(config, out_dir, fmt)
    elif config.mode == "entangle":
        manifest = _run_entangle(config, out_dir, fmt)
    elif config.mode == "scan-pon":
        manifest = _run_scan(config, out_dir, fmt)
    elif config.mode == "sweep":
        manifest = _run_sweep(config, out_dir, fmt)
    elif config.mode == "validate-oracle":
        manifest, passed = _run_validate(config, out_dir, fmt)
        if not passed:
            exit_code = EXIT_VALIDATION
    else:  # pragma: no cover - guarded by load_config
        raise ConfigError(f"unhandled mode {config.mode}")
    _write_json(out_dir / "manifest.json", manifest)
    return exit_code, manifest


# ---------------------------------------------------------------------------
# Entry point


def _fail(code: str, message: str, exit_code: int, out_dir: Path | None) -> int:
    payload = {"error": {"code": code, "message": message}}
    print(json.dumps(payload, sort_keys=True))
    if out_dir is not None:
        try:
            _write_json(out_dir / "error.json", payload)
        except OSError:
            pass
    return exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photon-filter",
        description="Conditional Fock-state synthesis in a Kerr-coupled ring cavity",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="JSON run configuration")
    source.add_argument(
        "--preset", help="named built-in configuration (fig2, fig3, fig4-left, ...)"
    )
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument(
        "--paper-literal", action="store_true",
        help="use the approximate printed ON factor instead of the exact one",
    )
    parser.add_argument("--list-presets", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_presets:
        print("\n".join(preset_names()))
        return EXIT_OK

    out_dir: Path | None = args.out
    try:
        if args.preset is not None:
            doc = load_preset(args.preset)
            base_dir = Path.cwd()
            default_out = Path(f"{args.preset}_out")
        else:
            try:
                with open(args.config, encoding="utf-8") as handle:
                    doc = json.load(handle)
            except FileNotFoundError as exc:
                raise ConfigError(f"config file not found: {args.config}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
            base_dir = args.config.resolve().parent
            default_out = args.config.resolve().with_suffix("").name + "_out"
            default_out = Path(default_out)

        if args.seed is not None:
            doc = {**doc, "seed": args.seed}
        if args.paper_literal:
            doc = {**doc, "paper_literal": True}
        config = load_config(doc, base_dir)
        out_dir = args.out or (Path(config.output_dir) if config.output_dir else default_out)
    except ConfigError as exc:
        return _fail("CONFIG", str(exc), EXIT_CONFIG, out_dir)

    try:
        exit_code, manifest = run(config, out_dir, fmt=args.format)
    except ConfigError as exc:
        return _fail("CONFIG", str(exc), EXIT_CONFIG, out_dir)
    except PhotonFilterError as exc:
        return _fail("ENGINE", str(exc), EXIT_ENGINE, out_dir)
    except OSError as exc:
        return _fail("IO", str(exc), EXIT_IO, out_dir)

    if config.mode == "validate-oracle" and exit_code == EXIT_VALIDATION:
        return _fail(
            "ORACLE_DISAGREEMENT",
            "engine and oracles disagree beyond tolerance; see oracle_report",
            EXIT_VALIDATION,
            out_dir,
        )
    print(json.dumps({"out_dir": str(out_dir), "results": manifest["results"]}, sort_keys=True))
    return exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
