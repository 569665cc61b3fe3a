"""States, Kraus channels and two-outcome POVMs on a single qubit ancilla."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidState, OutOfRange, ZeroProbabilityBranch
from .linalg import HERMITIAN_TOL, as_matrix, dagger, herm_eigen, hermiticity_error, kron, partial_trace_env

TRACE_TOL = 1e-9
PSD_TOL = 1e-9
COMPLETENESS_TOL = 1e-12
PROB_CLIP_TOL = 1e-12
ZERO_BRANCH_TOL = 1e-15

I2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
# |0> is the ground state: sigma_minus = |0><1| lowers the energy.
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
KET0_PROJ = np.array([[1, 0], [0, 0]], dtype=np.complex128)
KET1_PROJ = np.array([[0, 0], [0, 1]], dtype=np.complex128)


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=np.complex128)
    m.flags.writeable = False
    return m


def _min_eigenvalue(m: np.ndarray) -> float:
    if m.shape[0] == 2:
        a, d = m[0, 0].real, m[1, 1].real
        return 0.5 * (a + d) - math.sqrt(0.25 * (a - d) ** 2 + abs(m[0, 1]) ** 2)
    return float(herm_eigen(m).eigenvalues[0])


def clip_probability(p: float) -> float:
    if -PROB_CLIP_TOL <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + PROB_CLIP_TOL:
        return 1.0
    return p


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one, Hermitian, positive semidefinite matrix of size 2 or 4.

    A trace off by at most ``TRACE_TOL`` is silently renormalized; anything
    larger is an error.
    """

    mat: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.mat)
        if hermiticity_error(m) > HERMITIAN_TOL:
            raise InvalidState("density matrix is not Hermitian")
        m = 0.5 * (m + dagger(m))
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"density matrix has trace {tr!r}")
        m = m / tr
        if _min_eigenvalue(m) < -PSD_TOL:
            raise InvalidState("density matrix is not positive semidefinite")
        object.__setattr__(self, "mat", _frozen(m))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    @classmethod
    def from_ket(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


def ground_state() -> DensityMatrix:
    return DensityMatrix(KET0_PROJ)


def excited_state() -> DensityMatrix:
    return DensityMatrix(KET1_PROJ)


def tensor(rho_b: DensityMatrix, rho_e: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(kron(rho_b.mat, rho_e.mat))


@dataclass(frozen=True)
class KrausChannel:
    kraus: tuple

    def __post_init__(self):
        ks = tuple(_frozen(as_matrix(k)) for k in self.kraus)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ks[0].shape[0]
        if any(k.shape[0] != dim for k in ks):
            raise DimensionMismatch("Kraus operators of mixed dimension")
        completeness = sum(dagger(k) @ k for k in ks)
        err = float(np.max(np.abs(completeness - np.eye(dim))))
        if err > COMPLETENESS_TOL:
            raise ValueError(f"Kraus set is not trace preserving (err={err:.3e})")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def on_battery(self) -> "KrausChannel":
        """Lift a qubit channel to act on the battery factor of the joint space."""
        if self.dim != 2:
            raise DimensionMismatch("only qubit channels can be lifted")
        return KrausChannel(tuple(kron(k, I2) for k in self.kraus))


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim),))


def apply_kraus(m: np.ndarray, ch: KrausChannel) -> np.ndarray:
    """Apply ``ch`` to a raw (possibly unnormalized) operator."""
    return sum(k @ m @ dagger(k) for k in ch.kraus)


def apply_channel(rho: DensityMatrix, ch: KrausChannel) -> DensityMatrix:
    if rho.dim != ch.dim:
        raise DimensionMismatch(f"state of size {rho.dim} vs channel of size {ch.dim}")
    return DensityMatrix(apply_kraus(rho.mat, ch))


def _check_probability(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"{name}={p!r} is not a probability")
    return p


def amplitude_damping(p_ad: float) -> KrausChannel:
    p = _check_probability("p_ad", p_ad)
    k0 = np.array([[1, 0], [0, math.sqrt(1 - p)]])
    k1 = np.array([[0, math.sqrt(p)], [0, 0]])
    return KrausChannel((k0, k1))


def dephasing(p_d: float) -> KrausChannel:
    p = _check_probability("p_d", p_d)
    return KrausChannel((math.sqrt(1 - p) * I2, math.sqrt(p) * SIGMA_Z))


def p_ad_from_times(t1_us: float, tr_ns: float) -> float:
    """Per-readout amplitude-damping probability, ``1 - exp(-Tr/T1)``."""
    return -math.expm1(-(tr_ns * 1e-3) / t1_us)


def p_d_from_times(t2_us: float, tr_ns: float) -> float:
    """Per-readout dephasing probability, ``1 - exp(-Tr/T2)``."""
    return -math.expm1(-(tr_ns * 1e-3) / t2_us)


@dataclass(frozen=True)
class PovmEffect:
    mat: np.ndarray
    label: int

    def __post_init__(self):
        m = as_matrix(self.mat, dims=(2,))
        if hermiticity_error(m) > HERMITIAN_TOL:
            raise ValueError("POVM effect must be Hermitian")
        ev = herm_eigen(m).eigenvalues
        if ev[0] < -COMPLETENESS_TOL or ev[-1] > 1 + COMPLETENESS_TOL:
            raise ValueError(f"POVM effect eigenvalues {ev} outside [0, 1]")
        if self.label not in (0, 1):
            raise ValueError("outcome label must be 0 or 1")
        object.__setattr__(self, "mat", _frozen(m))


def check_povm_pair(pair) -> None:
    e0, e1 = pair
    if float(np.max(np.abs(e0.mat + e1.mat - I2))) > COMPLETENESS_TOL:
        raise ValueError("POVM effects do not sum to the identity")


def noisy_z_povm(p01: float, p10: float) -> tuple[PovmEffect, PovmEffect]:
    """Readout-confused sigma_z measurement.

    ``p01`` is the chance of reading 0 after preparing |1>, ``p10`` the
    chance of reading 1 after preparing |0>.
    """
    p01 = _check_probability("p01", p01)
    p10 = _check_probability("p10", p10)
    pi0 = np.diag([1.0 - p10, p01])
    pi1 = np.eye(2) - pi0
    return PovmEffect(pi0, 0), PovmEffect(pi1, 1)


def ideal_z_povm() -> tuple[PovmEffect, PovmEffect]:
    return noisy_z_povm(0.0, 0.0)


def x_basis_povm(z_effects) -> tuple[PovmEffect, PovmEffect]:
    """Hadamard-conjugate a z-basis POVM; measuring after a Hadamard gate."""
    check_povm_pair(z_effects)
    e0 = HADAMARD @ z_effects[0].mat @ HADAMARD
    # complement keeps the pair summing to I to machine precision
    return PovmEffect(e0, 0), PovmEffect(I2 - e0, 1)


def branch_operator(joint: np.ndarray, effect: PovmEffect) -> np.ndarray:
    """Unnormalized conditional battery operator ``Tr_E[joint (I x effect)]``."""
    return partial_trace_env(joint @ kron(I2, effect.mat))


def measure_branch(joint: DensityMatrix, effect: PovmEffect) -> tuple[float, DensityMatrix]:
    if joint.dim != 4:
        raise DimensionMismatch("measure_branch needs a joint battery+ancilla state")
    unnorm = branch_operator(joint.mat, effect)
    p = clip_probability(float(np.trace(unnorm).real))
    if p <= ZERO_BRANCH_TOL:
        raise ZeroProbabilityBranch(f"outcome {effect.label} has probability {p:.3e}")
    return p, DensityMatrix(unnorm / p)
