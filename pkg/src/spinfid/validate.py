"""Fast self-consistency battery behind the ``validate`` CLI verb.

Every check is deterministic (fixed seeds), takes well under a second,
and exercises a cross-cutting invariant rather than a stored expected
value: operator algebra, propagator unitarity, Hamiltonian structure,
state spectra, noise-sampler determinism and statistics, agreement of
the two evolution paths, worker-count determinism, coupling invariance
of the pseudo-pure modulus, and config/CSV round-trips.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .analytic import fid_pps_single, fid_thermal_single
from .config import parse_config, serialize_config
from .csvio import emit_trace_csv, load_csv
from .engine import TimeGrid, evolve_fid
from .experiments import preset_config, run_experiment
from .hamiltonians import (
    SpinSystemSpec,
    build_effective,
    build_lab,
    build_rotating_heisenberg,
)
from .noise import NoiseModel
from .operators import PAULI, embed, expm_hermitian, pauli
from .states import PulseSpec, apply_pulse, pps_state, thermal_state

__all__ = ["CheckResult", "run_validation"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_pauli_algebra() -> str:
    x, y, z, eye = pauli("x"), pauli("y"), pauli("z"), PAULI["i"]
    worst = 0.0
    for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
        worst = max(worst, float(np.max(np.abs(a @ b - 1j * c))))
        worst = max(worst, float(np.max(np.abs(a @ b + b @ a))))
    for a in (x, y, z):
        worst = max(worst, float(np.max(np.abs(a @ a - eye))))
    if worst > 1e-15:
        raise AssertionError(f"algebra residual {worst:.3g}")
    return "products, anticommutators, squares all exact"


def _check_embedding() -> str:
    got = np.diagonal(embed(pauli("z"), 0, 2)).real
    want = np.array([1.0, 1.0, -1.0, -1.0])
    if not np.array_equal(got, want):
        raise AssertionError(f"site-0 embedding gave diagonal {got}")
    return "site 0 is the slowest-varying qubit"


def _check_propagator() -> str:
    rng = np.random.default_rng(7)
    h = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h = h + h.conj().T
    u1 = expm_hermitian(h, 0.3)
    u2 = expm_hermitian(h, 0.5)
    u3 = expm_hermitian(h, 0.8)
    defect = max(u1.unitarity_defect(), u2.unitarity_defect())
    group = float(np.max(np.abs(u1.matrix @ u2.matrix - u3.matrix)))
    if defect > 1e-12 or group > 1e-12:
        raise AssertionError(f"unitarity defect {defect:.3g}, group residual {group:.3g}")
    return f"unitarity defect {defect:.2g}, group residual {group:.2g}"


def _check_hamiltonian_structure() -> str:
    spec = SpinSystemSpec()
    h_lab = build_lab(spec)
    h_eff = build_effective(spec)
    h_rot = build_rotating_heisenberg(spec)
    for name, h in (("lab", h_lab), ("effective", h_eff), ("rotating", h_rot)):
        if np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise AssertionError(f"{name} Hamiltonian is not Hermitian")
    if np.max(np.abs(h_eff - np.diag(np.diagonal(h_eff)))) != 0.0:
        raise AssertionError("effective Hamiltonian has off-diagonal terms")
    z_total = sum(embed(pauli("z"), k, 3) for k in range(3))
    comm = float(np.max(np.abs(h_rot @ z_total - z_total @ h_rot)))
    if comm > 1e-10:
        raise AssertionError(f"rotating Hamiltonian does not conserve total z ({comm:.3g})")
    h0 = build_effective(replace(spec, magnification=0.0))
    h2 = build_effective(replace(spec, magnification=2.0))
    linearity = float(np.max(np.abs((h2 - h0) - 2.0 * (h_eff - h0))))
    if linearity > 1e-9:
        raise AssertionError(f"coupling term is not linear in magnification ({linearity:.3g})")
    return "hermitian, diagonal secular part, conserved total z, linear couplings"


def _check_states() -> str:
    spec = SpinSystemSpec(polarization=0.5)
    rho_t = thermal_state(spec)
    rho_p = pps_state(spec, "101")
    uniform = (1.0 - 0.5) / 8.0
    want = np.sort(np.concatenate([np.full(7, uniform), [uniform + 0.5]]))
    got = np.sort(np.linalg.eigvalsh(rho_p.matrix))
    if not np.allclose(got, want, atol=1e-12, rtol=0.0):
        raise AssertionError(f"pseudo-pure spectrum {got}")
    pulsed = apply_pulse(rho_t, PulseSpec(target=2))
    before = np.sort(np.linalg.eigvalsh(rho_t.matrix))
    after = np.sort(np.linalg.eigvalsh(pulsed.matrix))
    if not np.allclose(before, after, atol=1e-12, rtol=0.0):
        raise AssertionError("pulse changed the state spectrum")
    sz = embed(pauli("z"), 2, 3)
    m_along = float(np.trace(rho_t.matrix @ sz).real)
    if abs(m_along - spec.polarization) > 1e-12:
        raise AssertionError(f"thermal <sigma_z> = {m_along}, want {spec.polarization}")
    return "spectra and longitudinal moments as constructed"


def _check_noise_determinism() -> str:
    for kind in ("white", "gaussian", "lorentzian"):
        model = NoiseModel(kind=kind, width=28.0)
        whole = model.sample_block(11, 0, 100)
        tail = model.sample_block(11, 50, 50)
        if not np.array_equal(whole[50:], tail):
            raise AssertionError(f"{kind} sampler is not slice-invariant")
    return "per-index draws independent of batch boundaries"


def _check_noise_statistics() -> str:
    t = np.linspace(0.0, 0.024, 97)
    worst = 0.0
    for kind in ("white", "gaussian", "lorentzian"):
        model = NoiseModel(kind=kind, width=28.0)
        etas = model.sample_block(7, 0, 20_000)
        mc = np.cos(np.outer(etas, t)).mean(axis=0)
        worst = max(worst, float(np.max(np.abs(mc - model.avg_cos(t)))))
    if worst > 0.04:
        raise AssertionError(f"Monte-Carlo dephasing factor off by {worst:.3g}")
    return f"20k-draw dephasing factors within {worst:.3g} of closed forms"


def _per_draw_reference(spec: SpinSystemSpec, state_kind: str, etas: np.ndarray, t: np.ndarray):
    mx = np.zeros_like(t)
    my = np.zeros_like(t)
    for eta in etas:
        fid = (
            fid_thermal_single(spec, float(eta), t)
            if state_kind == "thermal"
            else fid_pps_single(spec, float(eta), t)
        )
        mx += fid[0]
        my += fid[1]
    return mx / etas.size, my / etas.size


def _check_engine_closed_form() -> str:
    grid = TimeGrid(n_points=49)
    noise = NoiseModel(kind="gaussian", width=28.0)
    worst = 0.0
    for state_kind, polarization in (("thermal", -1.0), ("pps", 1.0)):
        spec = SpinSystemSpec(polarization=polarization)
        config = replace(
            preset_config("fig2-thermal" if state_kind == "thermal" else "fig2-pps"),
            system=spec,
            noise=noise,
            grid=grid,
            n_realizations=3,
            seed=23,
        )
        trace = run_experiment(config).trace
        etas = noise.sample_block(23, 0, 3)
        mx, my = _per_draw_reference(spec, state_kind, etas, grid.points)
        worst = max(worst, float(np.max(np.abs(trace.mx - mx))), float(np.max(np.abs(trace.my - my))))
    if worst > 1e-10:
        raise AssertionError(f"engine deviates from closed forms by {worst:.3g}")
    return f"per-draw agreement within {worst:.2g}"


def _check_path_agreement() -> str:
    spec = SpinSystemSpec(magnification=0.0, polarization=-1.0)
    grid = TimeGrid(n_points=49)
    noise = NoiseModel(kind="lorentzian", width=28.0)
    initial = apply_pulse(thermal_state(spec), PulseSpec(target=2))
    kwargs = dict(n_realizations=50, seed=31)
    secular = evolve_fid(spec, initial, noise, grid, hamiltonian="effective", **kwargs)
    dense = evolve_fid(spec, initial, noise, grid, hamiltonian="heisenberg", **kwargs)
    worst = max(
        float(np.max(np.abs(secular.mx - dense.mx))),
        float(np.max(np.abs(secular.my - dense.my))),
    )
    if worst > 1e-9:
        raise AssertionError(f"diagonal and dense paths disagree by {worst:.3g}")
    return f"diagonal vs dense evolution within {worst:.2g} at zero coupling"


def _check_worker_determinism() -> str:
    spec = SpinSystemSpec(polarization=1.0)
    grid = TimeGrid()
    noise = NoiseModel(kind="lorentzian", width=28.0)
    initial = apply_pulse(pps_state(spec, "101"), PulseSpec(target=2))
    kwargs = dict(n_realizations=5000, seed=5)
    serial = evolve_fid(spec, initial, noise, grid, workers=1, **kwargs)
    threaded = evolve_fid(spec, initial, noise, grid, workers=3, **kwargs)
    if not (np.array_equal(serial.mx, threaded.mx) and np.array_equal(serial.my, threaded.my)):
        raise AssertionError("results depend on the worker count")
    return "bit-identical traces for 1 and 3 workers"


def _check_coupling_invariance() -> str:
    grid = TimeGrid(n_points=97)
    noise = NoiseModel(kind="lorentzian", width=28.0)
    traces = []
    for magnification in (1.0, 10.0):
        spec = SpinSystemSpec(polarization=1.0, magnification=magnification)
        initial = apply_pulse(pps_state(spec, "101"), PulseSpec(target=2))
        traces.append(evolve_fid(spec, initial, noise, grid, n_realizations=500, seed=17))
    worst = float(np.max(np.abs(traces[0].mperp - traces[1].mperp)))
    if worst > 1e-9:
        raise AssertionError(f"pseudo-pure modulus moved by {worst:.3g} under 10x couplings")
    return f"pseudo-pure modulus coupling-independent within {worst:.2g}"


def _check_config_roundtrip() -> str:
    config = replace(preset_config("fig2-pps-x10"), output="trace.csv")
    text = serialize_config(config)
    if parse_config(text) != config:
        raise AssertionError("parse(serialize(config)) != config")
    return "serialize/parse round-trip is the identity"


def _check_csv_roundtrip() -> str:
    config = replace(preset_config("fig2-pps"), grid=TimeGrid(n_points=25), n_realizations=20)
    result = run_experiment(config)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "trace.csv")
        emit_trace_csv(path, result.trace, oracles=result.oracles, metadata={"config_hash": "x"})
        loaded = load_csv(path)
        back = loaded.trace()
    same = (
        np.array_equal(back.mx, result.trace.mx)
        and np.array_equal(back.my, result.trace.my)
        and back.seed == result.trace.seed
        and back.n_realizations == result.trace.n_realizations
        and np.array_equal(loaded.oracles["pps"], result.oracles["pps"])
    )
    if not same:
        raise AssertionError("CSV round-trip altered the trace")
    return "emit/load round-trip is bit-exact"


_CHECKS: tuple[tuple[str, Callable[[], str]], ...] = (
    ("pauli-algebra", _check_pauli_algebra),
    ("operator-embedding", _check_embedding),
    ("propagator-unitarity", _check_propagator),
    ("hamiltonian-structure", _check_hamiltonian_structure),
    ("state-spectra", _check_states),
    ("noise-determinism", _check_noise_determinism),
    ("noise-statistics", _check_noise_statistics),
    ("engine-closed-form", _check_engine_closed_form),
    ("evolution-path-agreement", _check_path_agreement),
    ("worker-determinism", _check_worker_determinism),
    ("coupling-invariance", _check_coupling_invariance),
    ("config-roundtrip", _check_config_roundtrip),
    ("csv-roundtrip", _check_csv_roundtrip),
)


def run_validation() -> list[CheckResult]:
    """Run every invariant check; never raises, failures are reported."""
    results = []
    for name, check in _CHECKS:
        try:
            detail = check()
            results.append(CheckResult(name=name, passed=True, detail=detail))
        except Exception as exc:  # noqa: BLE001 - report, don't crash the battery
            results.append(CheckResult(name=name, passed=False, detail=str(exc)))
    return results
