"""Spin-1/2 operator algebra on small tensor-product Hilbert spaces.

Conventions used throughout the package:

* hbar = 1, so Hamiltonians are angular frequencies (rad/s) and spin
  operators are dimensionless: I_a = sigma_a / 2.
* An n-spin operator is a dense complex ndarray of shape (2**n, 2**n).
* Site 0 is the leftmost Kronecker factor.  A computational basis state
  |b0 b1 ... b_{n-1}> maps to the row index with b0 as the most
  significant bit, and |0> is the sigma_z eigenstate with eigenvalue +1.

Matrix exponentials of Hermitian generators are evaluated through an
eigendecomposition, which keeps the resulting propagators unitary to
machine precision for the 8x8 problems this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PAULI",
    "pauli",
    "spin_half",
    "embed",
    "expectation",
    "expm_hermitian",
    "Propagator",
    "DensityMatrix",
    "require_hermitian",
    "require_square",
]

HERMITICITY_TOL = 1e-10

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
for _m in PAULI.values():
    _m.setflags(write=False)


def pauli(axis: str) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis`` in {'i', 'x', 'y', 'z'}."""
    try:
        return PAULI[axis]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}, expected one of i/x/y/z") from None


def spin_half(axis: str) -> np.ndarray:
    """Spin-1/2 angular momentum component I_axis = sigma_axis / 2."""
    return 0.5 * pauli(axis)


def require_square(a: np.ndarray) -> int:
    """Check that ``a`` is a square matrix over a power-of-two dimension."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    if dim < 1 or dim & (dim - 1):
        raise ValueError(f"dimension {dim} is not a power of two")
    return dim


def require_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    defect = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e} > {tol:.1e})")


def embed(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Embed a single-spin operator at ``site`` into an ``n_spins`` register.

    Identity factors fill the remaining sites; site 0 is the leftmost
    Kronecker factor.  embed(pauli('z'), 0, 2) == diag(1, 1, -1, -1).
    """
    if op.shape != (2, 2):
        raise ValueError(f"expected a 2x2 single-spin operator, got {op.shape}")
    if not 0 <= site < n_spins:
        raise ValueError(f"site {site} out of range for {n_spins} spins")
    out = np.kron(np.eye(2**site, dtype=complex), op)
    return np.kron(out, np.eye(2 ** (n_spins - site - 1), dtype=complex))


def expectation(rho: np.ndarray | "DensityMatrix", observable: np.ndarray) -> float:
    """Real expectation value Tr(rho * observable) of a Hermitian observable."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else rho
    if mat.shape != observable.shape:
        raise ValueError(f"dimension mismatch: state {mat.shape} vs observable {observable.shape}")
    require_hermitian(observable)
    value = np.trace(mat @ observable)
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise ValueError(f"expectation value has a non-negligible imaginary part: {value}")
    return float(value.real)


@dataclass(frozen=True)
class Propagator:
    """Unitary time-evolution operator exp(-i H t) with its duration in seconds."""

    matrix: np.ndarray
    duration: float

    def __post_init__(self) -> None:
        require_square(self.matrix)
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def unitarity_defect(self) -> float:
        dim = self.matrix.shape[0]
        return float(np.max(np.abs(self.matrix @ self.matrix.conj().T - np.eye(dim))))

    def evolve(self, rho: "DensityMatrix") -> "DensityMatrix":
        """Schroedinger-picture map rho -> U rho U^dagger."""
        return DensityMatrix(self.matrix @ rho.matrix @ self.matrix.conj().T)


def expm_hermitian(h: np.ndarray, t: float) -> Propagator:
    """Exact unitary exp(-i h t) for Hermitian ``h`` via eigendecomposition."""
    require_square(h)
    require_hermitian(h)
    vals, vecs = np.linalg.eigh(h)
    u = (vecs * np.exp(-1j * vals * t)) @ vecs.conj().T
    return Propagator(matrix=u, duration=float(t))


@dataclass(frozen=True)
class DensityMatrix:
    """State of the spin register: Hermitian, unit trace.

    Positivity is deliberately not enforced at construction.  The
    high-temperature (linearized) thermal state used here carries
    negative eigenvalues once n*|p| exceeds 1 while remaining a valid
    source of expectation values, which are linear in the state.  Use
    :meth:`min_eigenvalue` where positivity is part of the contract.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        dim = require_square(self.matrix)
        m = np.array(self.matrix, dtype=complex)
        require_hermitian(m)
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", dim)

    dim: int = field(init=False, repr=False, default=0)

    @property
    def n_spins(self) -> int:
        return int(self.dim).bit_length() - 1

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def expect(self, observable: np.ndarray) -> float:
        return expectation(self.matrix, observable)
