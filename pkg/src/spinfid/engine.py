"""Monte-Carlo free-induction-decay engine.

Semantics: for every realization r the static offset eta_r is drawn from
the noise model, the chosen rotating-frame Hamiltonian is built with
that offset, the prepared state evolves under exp(-i H t), and the
transverse spin components mx = Tr(rho(t) I_x), my = Tr(rho(t) I_y) of
the observed spin (or their sum over all spins) are recorded on the time
grid.  The trace holds the ensemble means and the modulus is taken after
averaging: mperp = sqrt(mx^2 + my^2), which decays through ensemble
dephasing even though every single realization keeps its amplitude.

Two exact evaluation paths:

* secular Hamiltonian: it is diagonal and commutes with the common-mode
  noise term, and the observable carries only single-quantum coherences,
  so every realization's signal is the zero-noise signal times
  exp(i eta_r t); the ensemble mean costs one phase average.
* isotropic Hamiltonian: one Hermitian eigendecomposition per
  realization (batched), with all grid times obtained by phase
  reweighting of the eigencomponents.

Determinism: realizations are split into fixed-size chunks whose
boundaries depend only on the problem shape, each chunk is reduced with
numpy's deterministic summation, and chunk partials are combined in
chunk order.  Worker threads only decide who computes a chunk, so
results are bit-identical for any worker count.  The worker count comes
from the ``workers`` argument, else the SPINFID_WORKERS environment
variable, else the CPU count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import trapezoid_weights
from .hamiltonians import SpinSystemSpec, build_effective, build_rotating_heisenberg
from .noise import NoiseModel
from .operators import DensityMatrix, embed, pauli

__all__ = [
    "TimeGrid",
    "ObservableSpec",
    "FidTrace",
    "evolve_fid",
    "residual_ratio",
    "WORKERS_ENV_VAR",
]

WORKERS_ENV_VAR = "SPINFID_WORKERS"

HAMILTONIAN_KINDS = ("effective", "heisenberg")

# Complex grid cells a chunk may hold; bounds peak memory to ~100 MB.
_CHUNK_CELLS = 4_000_000

# Refuse ensembles whose realization x grid-point product exceeds this.
_MAX_WORK_CELLS = 20_000_000_000


@dataclass(frozen=True)
class TimeGrid:
    """Uniform acquisition grid: n_points samples from 0 to t_max inclusive."""

    t_max: float = 0.024
    n_points: int = 481

    def __post_init__(self) -> None:
        if not (self.t_max > 0.0 and math.isfinite(self.t_max)):
            raise ValueError(f"t_max must be positive and finite, got {self.t_max!r}")
        if self.n_points < 2:
            raise ValueError(f"n_points must be at least 2, got {self.n_points}")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)

    @property
    def dt(self) -> float:
        return self.t_max / (self.n_points - 1)


@dataclass(frozen=True)
class ObservableSpec:
    """Which transverse magnetization is recorded.

    kind 'single' records I_x, I_y of spin ``index``; kind 'total' sums
    over all spins.  Both are single-quantum, which the secular fast
    path relies on.
    """

    kind: str = "single"
    index: int = 2

    def __post_init__(self) -> None:
        if self.kind not in ("single", "total"):
            raise ValueError(f"observable kind must be 'single' or 'total', got {self.kind!r}")
        if self.kind == "single" and self.index < 0:
            raise ValueError(f"observable index must be >= 0, got {self.index}")

    @classmethod
    def single(cls, index: int) -> "ObservableSpec":
        return cls(kind="single", index=index)

    @classmethod
    def total(cls) -> "ObservableSpec":
        return cls(kind="total", index=0)

    def sites(self, n_spins: int) -> list[int]:
        if self.kind == "total":
            return list(range(n_spins))
        if self.index >= n_spins:
            raise ValueError(f"observable spin {self.index} out of range for {n_spins} spins")
        return [self.index]

    def ladder_matrix(self, n_spins: int) -> np.ndarray:
        """Complex observable O = sum_sites (I_x + i I_y); Tr(rho O) = mx + i my."""
        out = np.zeros((2**n_spins, 2**n_spins), dtype=complex)
        for site in self.sites(n_spins):
            out += 0.5 * (embed(pauli("x"), site, n_spins) + 1j * embed(pauli("y"), site, n_spins))
        return out


@dataclass(frozen=True)
class FidTrace:
    """Ensemble-averaged FID on a time grid.

    mperp is always the modulus of the averaged components.  The
    deviation amplitude of the initial state is carried along so traces
    can be reported per unit polarization.
    """

    grid: TimeGrid
    mx: np.ndarray
    my: np.ndarray
    mperp: np.ndarray
    n_realizations: int
    seed: int
    polarization: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mx", "my", "mperp"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n_points,):
                raise ValueError(f"{name} must have shape ({self.grid.n_points},), got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_components(
        cls,
        grid: TimeGrid,
        mx: np.ndarray,
        my: np.ndarray,
        n_realizations: int,
        seed: int,
        polarization: float = 1.0,
    ) -> "FidTrace":
        return cls(
            grid=grid,
            mx=mx,
            my=my,
            mperp=np.hypot(mx, my),
            n_realizations=n_realizations,
            seed=seed,
            polarization=polarization,
        )

    @property
    def mperp_normalized(self) -> np.ndarray:
        """Transverse modulus per unit deviation amplitude, mperp / |p|."""
        if self.polarization == 0.0:
            raise ValueError("trace has zero polarization")
        return self.mperp / abs(self.polarization)


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR, "").strip()
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise ValueError(f"{WORKERS_ENV_VAR} must be an integer, got {env!r}") from None
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def _chunk_bounds(n_realizations: int, n_points: int, dim: int) -> list[tuple[int, int]]:
    """Fixed chunk boundaries; a function of the problem shape only."""
    per_realization = max(n_points * dim * dim, 1)
    size = max(1, _CHUNK_CELLS // per_realization)
    return [(lo, min(lo + size, n_realizations)) for lo in range(0, n_realizations, size)]


def _map_chunks(fn, bounds: list[tuple[int, int]], workers: int) -> list[np.ndarray]:
    if workers == 1 or len(bounds) == 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def _resolve_hamiltonian(spec: SpinSystemSpec, hamiltonian: str | None) -> str:
    if hamiltonian is None:
        hamiltonian = "effective" if spec.coupling_form == "ising" else "heisenberg"
    if hamiltonian not in HAMILTONIAN_KINDS:
        raise ValueError(f"hamiltonian must be one of {HAMILTONIAN_KINDS}, got {hamiltonian!r}")
    return hamiltonian


def evolve_fid(
    spec: SpinSystemSpec,
    initial: DensityMatrix,
    noise: NoiseModel,
    grid: TimeGrid,
    observable: ObservableSpec | None = None,
    n_realizations: int = 100_000,
    seed: int = 101,
    hamiltonian: str | None = None,
    workers: int | None = None,
) -> FidTrace:
    """Ensemble-averaged FID of ``initial`` under the chosen Hamiltonian."""
    if initial.dim != spec.dim:
        raise ValueError(f"state dimension {initial.dim} does not match spec dimension {spec.dim}")
    if n_realizations < 1:
        raise ValueError(f"n_realizations must be >= 1, got {n_realizations}")
    if n_realizations * grid.n_points > _MAX_WORK_CELLS:
        raise ValueError(
            f"requested {n_realizations} realizations x {grid.n_points} grid points "
            f"exceeds the work limit of {_MAX_WORK_CELLS} cells"
        )
    kind = _resolve_hamiltonian(spec, hamiltonian)
    observable = observable if observable is not None else ObservableSpec.single(spec.n_spins - 1)
    obs = observable.ladder_matrix(spec.n_spins)
    t = grid.points
    workers = _resolve_workers(workers)
    bounds = _chunk_bounds(n_realizations, grid.n_points, spec.dim if kind == "heisenberg" else 1)

    if kind == "effective":
        signal = _mean_signal_secular(spec, initial, noise, obs, t, bounds, seed, workers)
    else:
        signal = _mean_signal_dense(spec, initial, noise, obs, t, bounds, seed, workers)
    signal /= n_realizations

    return FidTrace.from_components(
        grid=grid,
        mx=signal.real.copy(),
        my=signal.imag.copy(),
        n_realizations=n_realizations,
        seed=seed,
        polarization=spec.polarization,
    )


def _mean_signal_secular(
    spec: SpinSystemSpec,
    initial: DensityMatrix,
    noise: NoiseModel,
    obs: np.ndarray,
    t: np.ndarray,
    bounds: list[tuple[int, int]],
    seed: int,
    workers: int,
) -> np.ndarray:
    """Sum over realizations of the signal under the diagonal Hamiltonian.

    With H diagonal and the noise a common shift of all I_iz, a
    single-quantum observable picks up the offset as one global phase:
    s_r(t) = D(t) exp(i eta_r t) where D is the zero-noise signal.
    """
    h0 = build_effective(spec, eta_z=0.0)
    energies = np.diag(h0).real
    amplitudes = initial.matrix * obs.T  # A_jk = rho_jk * O_kj
    omega = energies[:, None] - energies[None, :]
    mask = np.abs(amplitudes) > 0.0
    a = amplitudes[mask]
    w = omega[mask]
    deterministic = (a[:, None] * np.exp(-1j * np.outer(w, t))).sum(axis=0)

    def chunk_sum(lo: int, hi: int) -> np.ndarray:
        etas = noise.sample_block(seed, lo, hi - lo)
        return np.exp(1j * np.outer(etas, t)).sum(axis=0)

    partials = _map_chunks(chunk_sum, bounds, workers)
    phase_sum = np.sum(np.stack(partials), axis=0)
    return deterministic * phase_sum


def _mean_signal_dense(
    spec: SpinSystemSpec,
    initial: DensityMatrix,
    noise: NoiseModel,
    obs: np.ndarray,
    t: np.ndarray,
    bounds: list[tuple[int, int]],
    seed: int,
    workers: int,
) -> np.ndarray:
    """Sum over realizations under the full isotropic Hamiltonian.

    Each realization is evolved exactly through one eigendecomposition;
    the eigendecompositions of a chunk are batched.
    """
    h0 = build_rotating_heisenberg(spec, eta_z=0.0)
    z_total = sum(0.5 * embed(pauli("z"), s, spec.n_spins) for s in range(spec.n_spins))
    rho0 = initial.matrix
    dim = spec.dim

    def chunk_sum(lo: int, hi: int) -> np.ndarray:
        etas = noise.sample_block(seed, lo, hi - lo)
        h = h0[None, :, :] + etas[:, None, None] * z_total[None, :, :]
        vals, vecs = np.linalg.eigh(h)
        vecs_h = vecs.conj().transpose(0, 2, 1)
        rho_eig = vecs_h @ rho0 @ vecs
        obs_eig = vecs_h @ obs @ vecs
        amp = (rho_eig * obs_eig.transpose(0, 2, 1)).reshape(len(etas), dim * dim)
        omega = (vals[:, :, None] - vals[:, None, :]).reshape(len(etas), dim * dim)
        phases = np.exp(-1j * omega[:, :, None] * t[None, None, :])
        return np.einsum("ca,cat->t", amp, phases)

    partials = _map_chunks(chunk_sum, bounds, workers)
    return np.sum(np.stack(partials), axis=0)


def residual_ratio(trace: FidTrace, baseline: FidTrace) -> float:
    """Integrated relative deviation between two traces' moduli.

    R = integral |A - A_0| dt / integral A_0 dt with composite trapezoid
    weights on the shared grid; ``baseline`` supplies A_0.
    """
    if trace.grid != baseline.grid:
        raise ValueError("traces live on different grids")
    t = trace.grid.points
    w = trapezoid_weights(t)
    denominator = float(np.sum(w * baseline.mperp))
    if denominator <= 0.0:
        raise ValueError("baseline modulus integrates to zero")
    return float(np.sum(w * np.abs(trace.mperp - baseline.mperp)) / denominator)
