"""Monte-Carlo evolution engine: per-draw exactness, determinism, semantics."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinfid import (
    DensityMatrix,
    FidTrace,
    NoiseModel,
    ObservableSpec,
    PulseSpec,
    SpinSystemSpec,
    TimeGrid,
    apply_pulse,
    build_rotating_heisenberg,
    embed,
    evolve_fid,
    expm_hermitian,
    fid_pps,
    fid_thermal,
    pauli,
    pps_state,
    residual_ratio,
    thermal_state,
)

TWO_PI = 2.0 * np.pi


def pulsed_thermal(spec: SpinSystemSpec) -> DensityMatrix:
    return apply_pulse(thermal_state(spec), PulseSpec(target=2))


def pulsed_pps(spec: SpinSystemSpec, label: str = "101") -> DensityMatrix:
    return apply_pulse(pps_state(spec, label), PulseSpec(target=2))


class TestTimeGrid:
    def test_default_window(self):
        grid = TimeGrid()
        assert grid.t_max == 0.024
        assert grid.n_points == 481
        assert grid.dt == pytest.approx(5e-5)
        assert grid.points[0] == 0.0
        assert grid.points[-1] == pytest.approx(0.024)

    def test_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(t_max=0.0)
        with pytest.raises(ValueError):
            TimeGrid(n_points=1)


class TestObservableSpec:
    def test_total_is_sum_of_singles(self):
        total = ObservableSpec.total().ladder_matrix(3)
        summed = sum(ObservableSpec.single(k).ladder_matrix(3) for k in range(3))
        assert np.allclose(total, summed)

    def test_single_matches_embedded_ladder(self):
        ladder = (pauli("x") + 1j * pauli("y")) / 2.0  # raises z by one quantum
        assert np.allclose(ObservableSpec.single(1).ladder_matrix(3), embed(ladder, 1, 3))

    def test_sites(self):
        assert list(ObservableSpec.single(2).sites(3)) == [2]
        assert list(ObservableSpec.total().sites(3)) == [0, 1, 2]

    def test_invalid_kind(self):
        with pytest.raises(ValueError):
            ObservableSpec(kind="pair", index=0)


class TestPerDrawExactness:
    """Engine evolution equals the closed forms realization by realization."""

    def test_thermal_matches_closed_form_per_draw(self, default_system, default_grid):
        from spinfid.analytic import fid_thermal_single

        model = NoiseModel("lorentzian", 28.0)
        t = default_grid.points
        eta = model.sample(101, 0)
        trace = evolve_fid(
            default_system,
            pulsed_thermal(default_system),
            model,
            default_grid,
            n_realizations=1,
            seed=101,
        )
        mx, my, _ = fid_thermal_single(default_system, eta, t)
        assert np.max(np.abs(trace.mx - mx)) < 1e-10
        assert np.max(np.abs(trace.my - my)) < 1e-10

    def test_pps_matches_closed_form_per_draw(self, pps_system, default_grid):
        from spinfid.analytic import fid_pps_single

        t = default_grid.points
        model = NoiseModel("lorentzian", 28.0)
        eta = model.sample(7, 0)
        trace = evolve_fid(
            pps_system,
            pulsed_pps(pps_system),
            model,
            default_grid,
            n_realizations=1,
            seed=7,
        )
        mx, my, _ = fid_pps_single(pps_system, eta, t)
        assert np.max(np.abs(trace.mx - mx)) < 1e-10
        assert np.max(np.abs(trace.my - my)) < 1e-10

    def test_ensemble_mean_is_modulus_after_averaging(self, pps_system, default_grid):
        # two draws: the reported modulus must be |mean of complex signals|,
        # which differs from the mean of per-draw moduli
        from spinfid.analytic import fid_pps_single

        t = default_grid.points
        model = NoiseModel("lorentzian", 28.0)
        etas = model.sample_block(33, 0, 2)
        trace = evolve_fid(
            pps_system, pulsed_pps(pps_system), model, default_grid,
            n_realizations=2, seed=33,
        )
        draws = [fid_pps_single(pps_system, eta, t) for eta in etas]
        s = np.mean([mx + 1j * my for mx, my, _ in draws], axis=0)
        assert np.max(np.abs(trace.mx - s.real)) < 1e-12
        assert np.max(np.abs(trace.my - s.imag)) < 1e-12
        assert np.max(np.abs(trace.mperp - np.abs(s))) < 1e-12
        # per-draw moduli stay at 0.5; the averaged modulus must decay below
        assert trace.mperp[-1] < 0.5 - 1e-3

    def test_effective_and_heisenberg_agree_at_zero_magnification(
        self, pps_system, default_grid
    ):
        spec = SpinSystemSpec(polarization=1.0, magnification=0.0)
        model = NoiseModel("lorentzian", 28.0)
        eff = evolve_fid(
            spec, pulsed_pps(spec), model, default_grid,
            n_realizations=16, seed=5, hamiltonian="effective",
        )
        heis = evolve_fid(
            spec, pulsed_pps(spec), model, default_grid,
            n_realizations=16, seed=5, hamiltonian="heisenberg",
        )
        assert np.max(np.abs(eff.mx - heis.mx)) < 1e-9
        assert np.max(np.abs(eff.my - heis.my)) < 1e-9

    def test_dense_path_matches_step_propagator(self, default_grid):
        # independent cross-check of the exchange-coupling path: evolve the
        # density matrix step by step with matrix exponentials
        spec = SpinSystemSpec(polarization=1.0)
        grid = TimeGrid(t_max=0.006, n_points=61)
        model = NoiseModel("white", 0.0)
        trace = evolve_fid(
            spec, pulsed_pps(spec), model, grid, n_realizations=1, seed=0,
            hamiltonian="heisenberg", observable=ObservableSpec.total(),
        )
        h = build_rotating_heisenberg(spec)
        u = expm_hermitian(h, grid.dt)
        rho = pulsed_pps(spec)
        ladder = ObservableSpec.total().ladder_matrix(3)
        mx = np.empty(grid.n_points)
        my = np.empty(grid.n_points)
        for k in range(grid.n_points):
            if k:
                rho = u.evolve(rho)
            s = np.trace(rho.matrix @ ladder)
            mx[k], my[k] = s.real, s.imag
        assert np.max(np.abs(trace.mx - mx)) < 1e-12
        assert np.max(np.abs(trace.my - my)) < 1e-12


class TestConservation:
    def test_total_z_constant_under_exchange_coupling(self):
        spec = SpinSystemSpec(polarization=1.0, magnification=3.0)
        h = build_rotating_heisenberg(spec, eta_z=150.0)
        z_total = sum(embed(pauli("z"), i, 3) for i in range(3))
        rho = pulsed_pps(spec)
        u = expm_hermitian(h, 4e-4)
        values = []
        for _ in range(20):
            values.append(rho.expect(z_total))
            rho = u.evolve(rho)
        assert np.max(np.abs(np.array(values) - values[0])) < 1e-10


class TestDeterminism:
    def test_worker_count_invariance(self, pps_system, default_grid):
        model = NoiseModel("lorentzian", 28.0)
        runs = [
            evolve_fid(
                pps_system, pulsed_pps(pps_system), model, default_grid,
                n_realizations=500, seed=11, workers=w,
            )
            for w in (1, 2, 3)
        ]
        for other in runs[1:]:
            assert np.array_equal(runs[0].mx, other.mx)
            assert np.array_equal(runs[0].my, other.my)

    def test_same_seed_same_trace(self, pps_system, default_grid):
        model = NoiseModel("gaussian", 28.0)
        a = evolve_fid(pps_system, pulsed_pps(pps_system), model, default_grid,
                       n_realizations=64, seed=21)
        b = evolve_fid(pps_system, pulsed_pps(pps_system), model, default_grid,
                       n_realizations=64, seed=21)
        assert np.array_equal(a.mx, b.mx) and np.array_equal(a.my, b.my)

    def test_different_seeds_differ(self, pps_system, default_grid):
        model = NoiseModel("gaussian", 28.0)
        a = evolve_fid(pps_system, pulsed_pps(pps_system), model, default_grid,
                       n_realizations=64, seed=21)
        b = evolve_fid(pps_system, pulsed_pps(pps_system), model, default_grid,
                       n_realizations=64, seed=22)
        assert not np.array_equal(a.mx, b.mx)

    @given(workers=st.integers(1, 4), n=st.integers(1, 40))
    @settings(max_examples=10, deadline=None)
    def test_worker_invariance_random_sizes(self, workers, n):
        spec = SpinSystemSpec(polarization=1.0)
        grid = TimeGrid(t_max=0.004, n_points=17)
        model = NoiseModel("lorentzian", 28.0)
        base = evolve_fid(spec, pulsed_pps(spec), model, grid,
                          n_realizations=n, seed=3, workers=1)
        other = evolve_fid(spec, pulsed_pps(spec), model, grid,
                           n_realizations=n, seed=3, workers=workers)
        assert np.array_equal(base.mx, other.mx)
        assert np.array_equal(base.my, other.my)


class TestCouplingInvariance:
    def test_pps_modulus_unchanged_by_tenfold_coupling(self, default_grid):
        model = NoiseModel("lorentzian", 28.0)
        traces = []
        for m in (1.0, 10.0):
            spec = SpinSystemSpec(polarization=1.0, magnification=m)
            traces.append(
                evolve_fid(spec, pulsed_pps(spec), model, default_grid,
                           n_realizations=2_000, seed=101)
            )
        assert np.max(np.abs(traces[0].mperp - traces[1].mperp)) < 1e-9

    def test_thermal_modulus_changes_with_coupling(self, default_grid):
        model = NoiseModel("lorentzian", 28.0)
        traces = []
        for m in (1.0, 10.0):
            spec = SpinSystemSpec(polarization=-1.0, magnification=m)
            traces.append(
                evolve_fid(spec, pulsed_thermal(spec), model, default_grid,
                           n_realizations=500, seed=101)
            )
        assert np.max(np.abs(traces[0].mperp - traces[1].mperp)) > 1e-2


class TestFidTrace:
    def test_mperp_is_hypot_of_means(self, pps_system, default_grid):
        trace = evolve_fid(
            pps_system, pulsed_pps(pps_system), NoiseModel("lorentzian", 28.0),
            default_grid, n_realizations=100, seed=2,
        )
        assert np.allclose(trace.mperp, np.hypot(trace.mx, trace.my), atol=1e-15)

    def test_normalization_divides_by_polarization(self, default_grid):
        spec = SpinSystemSpec(polarization=0.25)
        trace = evolve_fid(
            spec, pulsed_pps(spec), NoiseModel("lorentzian", 28.0),
            default_grid, n_realizations=100, seed=2,
        )
        # the start amplitude is |p|/2, so per unit polarization it is 1/2
        assert trace.mperp_normalized[0] == pytest.approx(0.5)
        assert np.allclose(trace.mperp_normalized, trace.mperp / 0.25)

    def test_normalization_rejects_zero_polarization(self, default_grid):
        n = default_grid.n_points
        trace = FidTrace.from_components(
            default_grid, np.ones(n), np.zeros(n),
            n_realizations=1, seed=0, polarization=0.0,
        )
        with pytest.raises(ValueError):
            trace.mperp_normalized

    def test_from_components(self, default_grid):
        t = default_grid.points
        mx = 0.5 * np.cos(TWO_PI * 100.0 * t)
        my = 0.5 * np.sin(TWO_PI * 100.0 * t)
        trace = FidTrace.from_components(default_grid, mx, my, n_realizations=1, seed=0)
        assert np.allclose(trace.mperp, 0.5)


class TestResidualRatio:
    def synthetic(self, grid: TimeGrid, amplitude: np.ndarray) -> FidTrace:
        return FidTrace.from_components(
            grid, amplitude, np.zeros_like(amplitude), n_realizations=1, seed=0
        )

    def test_identical_traces_give_zero(self, default_grid):
        a = self.synthetic(default_grid, np.exp(-100.0 * default_grid.points))
        assert residual_ratio(a, a) == 0.0

    def test_doubled_amplitude_gives_one(self, default_grid):
        base = np.exp(-100.0 * default_grid.points)
        r = residual_ratio(
            self.synthetic(default_grid, 2.0 * base), self.synthetic(default_grid, base)
        )
        assert r == pytest.approx(1.0, rel=1e-12)

    def test_grid_mismatch_rejected(self):
        a = self.synthetic(TimeGrid(t_max=0.01, n_points=11), np.ones(11))
        b = self.synthetic(TimeGrid(t_max=0.02, n_points=21), np.ones(21))
        with pytest.raises(ValueError):
            residual_ratio(a, b)

    def test_zero_baseline_rejected(self, default_grid):
        zero = self.synthetic(default_grid, np.zeros(default_grid.n_points))
        one = self.synthetic(default_grid, np.ones(default_grid.n_points))
        with pytest.raises(ValueError):
            residual_ratio(one, zero)


class TestArgumentValidation:
    def test_dimension_mismatch(self, default_system, default_grid):
        small = thermal_state(SpinSystemSpec(n_spins=1, delta=(0.0,), j=()))
        with pytest.raises(ValueError):
            evolve_fid(default_system, small, NoiseModel("white", 0.0), default_grid,
                       n_realizations=1)

    def test_nonpositive_realizations(self, default_system, default_grid):
        with pytest.raises(ValueError):
            evolve_fid(default_system, pulsed_thermal(default_system),
                       NoiseModel("white", 0.0), default_grid, n_realizations=0)

    def test_unknown_hamiltonian(self, default_system, default_grid):
        with pytest.raises(ValueError):
            evolve_fid(default_system, pulsed_thermal(default_system),
                       NoiseModel("white", 0.0), default_grid,
                       n_realizations=1, hamiltonian="dipolar")


class TestAgainstAnalyticOracles:
    def test_thermal_trace_matches_oracle_with_noise(self, default_system, default_grid):
        model = NoiseModel("lorentzian", 28.0)
        trace = evolve_fid(
            default_system, pulsed_thermal(default_system), model, default_grid,
            n_realizations=20_000, seed=101,
        )
        _, _, oracle = fid_thermal(default_system, model, default_grid.points)
        assert np.max(np.abs(trace.mperp - oracle)) < 5e-3

    def test_pps_trace_matches_oracle_with_noise(self, pps_system, default_grid):
        model = NoiseModel("lorentzian", 28.0)
        trace = evolve_fid(
            pps_system, pulsed_pps(pps_system), model, default_grid,
            n_realizations=20_000, seed=101,
        )
        _, _, oracle = fid_pps(pps_system, model, default_grid.points)
        assert np.max(np.abs(trace.mperp - oracle)) < 5e-3
