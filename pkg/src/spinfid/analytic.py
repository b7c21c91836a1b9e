"""Closed-form free-induction-decay signals for the supported preparations.

All formulas share one convention with the numerical engine: the
recorded components are mx = Tr(rho(t) I_x) and my = Tr(rho(t) I_y) of
the observed spin (spin operators, sigma/2), evolved by exp(-i H t), so
the complex signal s = mx + i*my of a free spin rotates with positive
frequency, s ~ (p/2) exp(+i delta t).  A spin whose basis label is 1
starts along -x after the y pi/2 pulse, flipping the overall sign.

Static common-mode noise multiplies every realization's signal by
exp(i eta t); averaging therefore factors into the deterministic
coherence times (avg_cos + i avg_sin) of the noise model.  Each ensemble
formula has a ``*_single`` companion evaluated at one fixed offset,
which the engine must reproduce to numerical precision under the
secular (diagonal) Hamiltonian.

The perturbative three-branch formula treats the flip-flop part of the
isotropic coupling as a first-order perturbation on the secular
dynamics and describes the TOTAL transverse readout (sum over spins):
the perturbation bleeds coherence onto the spectator spins, and those
branches beat against the main line only when the readout sees every
spin.  The coherent branch sum is accurate to second order in the
mixing coefficients; the separate linearized envelope factor F also
drops the coupling corrections inside its cosine arguments, so it
degrades faster as magnification grows (the regime flag turns on once
|lambda_1| + |lambda_2| > 0.2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import SpinSystemSpec
from .noise import NoiseModel

__all__ = [
    "fid_single",
    "fid_thermal",
    "fid_thermal_single",
    "fid_pps",
    "fid_pps_single",
    "PerturbationCoeffs",
    "perturbation_coeffs",
    "fid_perturbative",
    "fid_perturbative_single",
    "envelope_factor",
    "residual_ratio_analytic",
    "trapezoid_weights",
]

Fid = tuple[np.ndarray, np.ndarray, np.ndarray]


def _components(s: np.ndarray) -> Fid:
    mx = np.ascontiguousarray(s.real)
    my = np.ascontiguousarray(s.imag)
    return mx, my, np.hypot(mx, my)


def _coherence(model: NoiseModel, t: np.ndarray) -> np.ndarray:
    """Ensemble mean of exp(i eta t) = avg_cos + i avg_sin."""
    return model.avg_cos(t) + 1j * model.avg_sin(t)


def fid_single(model: NoiseModel, polarization: float, t: np.ndarray | float) -> Fid:
    """Mean FID of one uncoupled on-resonance spin after a y pi/2 pulse.

    mx = (p/2) avg_cos, my = (p/2) avg_sin, and the transverse modulus
    (p/2) sqrt(avg_cos^2 + avg_sin^2) decays with the envelope alone.
    """
    t = np.asarray(t, dtype=float)
    return _components(0.5 * polarization * _coherence(model, t))


def _label_signs(label: str, n_spins: int) -> list[int]:
    if len(label) != n_spins or any(c not in "01" for c in label):
        raise ValueError(f"label must be {n_spins} characters of 0/1, got {label!r}")
    return [1 if c == "0" else -1 for c in label]


def _coupling_cosines(spec: SpinSystemSpec, observed: int, t: np.ndarray) -> np.ndarray:
    """prod_{i != observed} cos(m J_i,obs t / 2) in angular units."""
    out = np.ones_like(t)
    for i in range(spec.n_spins):
        if i == observed:
            continue
        j_rad = spec.scale * spec.magnification * spec.j_coupling(i, observed)
        out = out * np.cos(0.5 * j_rad * t)
    return out


def _check_observed(spec: SpinSystemSpec, observed: int) -> None:
    if not 0 <= observed < spec.n_spins:
        raise ValueError(f"observed spin {observed} out of range for {spec.n_spins} spins")


def fid_thermal_single(
    spec: SpinSystemSpec, eta_z: float, t: np.ndarray | float, observed: int = 2
) -> Fid:
    """Exact secular-model FID of the thermal state at one fixed offset.

    s(t) = (p/2) * prod_{i != k} cos(m J_ik t / 2) * exp(i (delta_k + eta) t)
    for observed spin k.  The couplings split the observed line into a
    product of cosine modulations while the offset and noise only rotate
    the phase.
    """
    _check_observed(spec, observed)
    t = np.asarray(t, dtype=float)
    delta_rad = spec.scale * spec.delta[observed]
    s = (
        0.5
        * spec.polarization
        * _coupling_cosines(spec, observed, t)
        * np.exp(1j * (delta_rad + eta_z) * t)
    )
    return _components(s)


def fid_thermal(
    spec: SpinSystemSpec, model: NoiseModel, t: np.ndarray | float, observed: int = 2
) -> Fid:
    """Noise-averaged thermal-state FID under the secular Hamiltonian."""
    _check_observed(spec, observed)
    t = np.asarray(t, dtype=float)
    delta_rad = spec.scale * spec.delta[observed]
    s = (
        0.5
        * spec.polarization
        * _coupling_cosines(spec, observed, t)
        * np.exp(1j * delta_rad * t)
        * _coherence(model, t)
    )
    return _components(s)


def _pps_phase_rate(spec: SpinSystemSpec, label: str, observed: int) -> tuple[float, int]:
    """Coherence frequency (rad/s) and sign of the pseudo-pure FID branch.

    The spectator spins sit in definite z states fixed by the label, so
    the observed coherence precesses at delta_k plus half the signed sum
    of its couplings; a label bit 1 on the observed spin flips the
    initial transverse direction.
    """
    signs = _label_signs(label, spec.n_spins)
    rate = spec.scale * spec.delta[observed]
    for i in range(spec.n_spins):
        if i == observed:
            continue
        rate += 0.5 * signs[i] * spec.scale * spec.magnification * spec.j_coupling(i, observed)
    return rate, signs[observed]


def fid_pps_single(
    spec: SpinSystemSpec,
    eta_z: float,
    t: np.ndarray | float,
    label: str = "101",
    observed: int = 2,
) -> Fid:
    """Exact secular-model FID of the pseudo-pure state at one fixed offset."""
    _check_observed(spec, observed)
    t = np.asarray(t, dtype=float)
    rate, sign = _pps_phase_rate(spec, label, observed)
    s = sign * 0.5 * spec.polarization * np.exp(1j * (rate + eta_z) * t)
    return _components(s)


def fid_pps(
    spec: SpinSystemSpec,
    model: NoiseModel,
    t: np.ndarray | float,
    label: str = "101",
    observed: int = 2,
) -> Fid:
    """Noise-averaged pseudo-pure FID under the secular Hamiltonian.

    The transverse modulus (|p|/2) sqrt(avg_cos^2 + avg_sin^2) is
    independent of every coupling: the label pins the spectator spins,
    so couplings only shift the single coherence frequency, which the
    modulus ignores.
    """
    _check_observed(spec, observed)
    t = np.asarray(t, dtype=float)
    rate, sign = _pps_phase_rate(spec, label, observed)
    s = sign * 0.5 * spec.polarization * np.exp(1j * rate * t) * _coherence(model, t)
    return _components(s)


@dataclass(frozen=True)
class PerturbationCoeffs:
    """First-order flip-flop mixing coefficients for the |101> preparation.

    lambda_1 weighs the branch created by exchange with the second spin
    and lambda_2 the branch from exchange with the first; both scale
    linearly with magnification and inversely with the offset gaps.
    ``out_of_regime`` flags |lambda_1| + |lambda_2| > 0.2, beyond which
    the first-order formulas stop being quantitative.
    """

    lambda_1: float
    lambda_2: float

    @property
    def out_of_regime(self) -> bool:
        return abs(self.lambda_1) + abs(self.lambda_2) > 0.2


def perturbation_coeffs(spec: SpinSystemSpec) -> PerturbationCoeffs:
    """Mixing coefficients lambda_1, lambda_2 (dimensionless, Hz ratios)."""
    if spec.n_spins != 3:
        raise ValueError("perturbative formulas are defined for three spins")
    d = spec.delta
    if d[2] == d[1] or d[2] == d[0]:
        raise ValueError("offset gaps to the observed spin must be nonzero")
    m = spec.magnification
    lam1 = m * spec.j_coupling(1, 2) / (2.0 * (d[2] - d[1]))
    lam2 = -m * spec.j_coupling(0, 2) / (2.0 * (d[2] - d[0]))
    return PerturbationCoeffs(lambda_1=lam1, lambda_2=lam2)


def _perturbative_branches(spec: SpinSystemSpec) -> tuple[np.ndarray, np.ndarray]:
    """Branch frequencies (rad/s) and weights of the three-line expansion."""
    if spec.delta[0] != 0.0:
        raise ValueError("the three-branch expansion assumes the first offset is zero")
    coeffs = perturbation_coeffs(spec)
    m = spec.magnification
    j01 = spec.j_coupling(0, 1)
    j02 = spec.j_coupling(0, 2)
    j12 = spec.j_coupling(1, 2)
    d = spec.delta
    rates = spec.scale * np.array(
        [
            d[2] + 0.5 * m * (j12 - j02),
            d[1] + 0.5 * m * (j12 - j01),
            d[0] + 0.5 * m * (j01 - j02),
        ]
    )
    weights = np.array(
        [1.0 - coeffs.lambda_1 - coeffs.lambda_2, coeffs.lambda_1, coeffs.lambda_2]
    )
    return rates, weights


def fid_perturbative_single(
    spec: SpinSystemSpec, eta_z: float, t: np.ndarray | float
) -> Fid:
    """First-order isotropic-coupling FID at one fixed offset, |101> start.

    Models the TOTAL transverse signal (sum of every spin's raising
    operator): the flip-flop terms move a little coherence onto the
    spectator spins, and only a total readout sees those branches beat
    against the main line at first order -- a single-spin readout stays
    flat to second order.  Three coherence branches with weights
    (1 - l1 - l2, l1, l2); the modulus is the true modulus of the branch
    sum, exact to first order in the mixing coefficients.
    """
    t = np.asarray(t, dtype=float)
    rates, weights = _perturbative_branches(spec)
    s = np.zeros(t.shape, dtype=complex)
    for rate, weight in zip(rates, weights):
        s = s + weight * np.exp(1j * (rate + eta_z) * t)
    s = -0.5 * spec.polarization * s
    return _components(s)


def envelope_factor(spec: SpinSystemSpec, t: np.ndarray | float) -> np.ndarray:
    """Linearized modulus factor F(t) of the three-branch expansion.

    F = 1 - l1 - l2 + l1 cos((d3 - d2) t) + l2 cos(d3 t), keeping only
    terms linear in the mixing coefficients and dropping the coupling
    corrections inside the beat frequencies.
    """
    t = np.asarray(t, dtype=float)
    coeffs = perturbation_coeffs(spec)
    if spec.delta[0] != 0.0:
        raise ValueError("the three-branch expansion assumes the first offset is zero")
    gap_32 = spec.scale * (spec.delta[2] - spec.delta[1])
    gap_31 = spec.scale * (spec.delta[2] - spec.delta[0])
    return (
        1.0
        - coeffs.lambda_1
        - coeffs.lambda_2
        + coeffs.lambda_1 * np.cos(gap_32 * t)
        + coeffs.lambda_2 * np.cos(gap_31 * t)
    )


def fid_perturbative(spec: SpinSystemSpec, model: NoiseModel, t: np.ndarray | float) -> Fid:
    """Noise-averaged first-order total-readout FID for the |101> start.

    Every branch is a single-quantum coherence, so the random offset
    contributes one common phase that factors through the model's
    coherence function; the modulus is then exactly
    (|p|/2) |branch sum| sqrt(avg_cos^2 + avg_sin^2).  The coherent
    branch sum keeps the coupling corrections inside the beat
    frequencies, unlike the linearized :func:`envelope_factor`, which is
    why its residual against the full evolution is second order in the
    mixing coefficients.
    """
    t = np.asarray(t, dtype=float)
    rates, weights = _perturbative_branches(spec)
    branch_sum = np.zeros(t.shape, dtype=complex)
    for rate, weight in zip(rates, weights):
        branch_sum = branch_sum + weight * np.exp(1j * rate * t)
    s = -0.5 * spec.polarization * branch_sum * _coherence(model, t)
    return _components(s)


def trapezoid_weights(t: np.ndarray) -> np.ndarray:
    """Composite trapezoid quadrature weights for a sorted sample grid."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("need a 1-d grid with at least two points")
    w = np.zeros_like(t)
    gaps = np.diff(t)
    w[:-1] += 0.5 * gaps
    w[1:] += 0.5 * gaps
    return w


def residual_ratio_analytic(
    spec: SpinSystemSpec, model: NoiseModel, t: np.ndarray
) -> float:
    """Integrated relative deviation of the first-order model from ideal.

    R = integral |A_m - A_0| dt / integral A_0 dt over the given grid,
    where A_m is the perturbative mperp and A_0 the coupling-free
    modulus (the ideal pseudo-pure decay, which is also the m = 0 limit
    of A_m); with the mixing coefficients linear in magnification, R is
    too, up to second-order corrections.
    """
    t = np.asarray(t, dtype=float)
    w = trapezoid_weights(t)
    a_0 = 0.5 * abs(spec.polarization) * np.hypot(model.avg_cos(t), model.avg_sin(t))
    a_m = fid_perturbative(spec, model, t)[2]
    denominator = float(np.sum(w * a_0))
    if denominator <= 0.0:
        raise ValueError("baseline envelope integrates to zero on this grid")
    return float(np.sum(w * np.abs(a_m - a_0)) / denominator)
