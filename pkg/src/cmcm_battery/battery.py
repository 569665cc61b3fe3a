"""Qubit battery: energy, ergotropy and the optimal extraction unitary.

The battery Hamiltonian is ``H0 = (omega0 / 2) (I - sigma_z)``, so |0> is the
ground state with zero energy and |1> has energy ``omega0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonUnitaryInput
from .linalg import as_matrix, dagger, herm_eigen
from .quantum import DensityMatrix

UNITARY_TOL = 1e-10
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class BatteryHamiltonian:
    omega0: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0!r}")

    @property
    def matrix(self) -> np.ndarray:
        return np.diag([0.0, self.omega0]).astype(np.complex128)

    @property
    def levels(self) -> np.ndarray:
        """Energies in ascending order, paired with |0>, |1>."""
        return np.array([0.0, self.omega0])


DEFAULT_H = BatteryHamiltonian()


@dataclass(frozen=True)
class ErgotropyResult:
    energy: float
    ergotropy: float
    passive_energy: float
    optimal_unitary: np.ndarray


def _mat(rho) -> np.ndarray:
    return rho.mat if isinstance(rho, DensityMatrix) else as_matrix(rho, dims=(2,))


def energy(rho, h: BatteryHamiltonian = DEFAULT_H) -> float:
    # H0 is diagonal: only the excited population contributes
    return float(h.omega0 * _mat(rho)[1, 1].real)


def ergotropy(rho, h: BatteryHamiltonian = DEFAULT_H) -> ErgotropyResult:
    """Maximal unitarily extractable work and the unitary achieving it.

    The passive state puts the largest eigenvalue of ``rho`` on the ground
    level; the optimal unitary maps that eigenvector to |0> and the other one
    to |1>. A maximally mixed state is already passive and gets the identity.
    """
    m = _mat(rho)
    e = energy(m, h)
    eig = herm_eigen(m)
    lam_small, lam_large = eig.eigenvalues
    passive = float(lam_large * h.levels[0] + lam_small * h.levels[1])
    if lam_large - lam_small <= DEGENERACY_TOL:
        u = np.eye(2, dtype=np.complex128)
    else:
        r_small = eig.eigenvectors[:, 0]
        r_large = eig.eigenvectors[:, 1]
        u = np.outer([1, 0], r_large.conj()) + np.outer([0, 1], r_small.conj())
    return ErgotropyResult(energy=e, ergotropy=e - passive, passive_energy=passive, optimal_unitary=u)


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u)
    err = float(np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))))
    if err > tol:
        raise NonUnitaryInput(f"matrix is not unitary (err={err:.3e})")
    return u


def extracted_work(rho, u, h: BatteryHamiltonian = DEFAULT_H) -> float:
    """Energy before minus energy after applying ``u``; negative means charging."""
    m = _mat(rho)
    u = check_unitary(u)
    return energy(m, h) - energy(u @ m @ dagger(u), h)


def ergotropy_values(mats: np.ndarray, h: BatteryHamiltonian = DEFAULT_H) -> np.ndarray:
    """Ergotropy of a stack of qubit states, shape ``(m, 2, 2)``.

    Uses the closed-form smaller eigenvalue, ``E - omega0 * lambda_min``; the
    batched counterpart of :func:`ergotropy` for outcome-averaged sums.
    """
    mats = np.asarray(mats)
    a, d = mats[:, 0, 0].real, mats[:, 1, 1].real
    lam_min = 0.5 * (a + d - np.hypot(a - d, 2 * np.abs(mats[:, 0, 1])))
    return h.omega0 * (d - lam_min)


def passive_state(rho) -> DensityMatrix:
    eig = herm_eigen(_mat(rho))
    return DensityMatrix(np.diag(eig.eigenvalues[::-1]))
