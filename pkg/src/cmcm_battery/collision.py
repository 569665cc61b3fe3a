"""Collisional model of a driven, leaking qubit battery, with and without monitoring.

Each collision couples the battery to a fresh ancilla in |0> through
``V = exp(-i H)`` with ``H = alpha sx x I + kappa (s+ x s- + s- x s+)``. In the
noisy model the battery then suffers dephasing followed by amplitude damping,
and the ancilla is read out with a confusion-matrix POVM.

Trajectories are stored flat, in lexicographic outcome order, so the node for
outcomes ``a1 a2 ... an`` sits at ``int("a1a2...an", 2)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .battery import DEFAULT_H, BatteryHamiltonian, energy, ergotropy, ergotropy_values, extracted_work
from .errors import MissingTableEntry, OutOfRange, TreeTooLarge
from .linalg import dagger, kron, partial_trace_env, unitary_exp
from .quantum import (
    I2,
    KET0_PROJ,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    DensityMatrix,
    amplitude_damping,
    apply_kraus,
    branch_operator,
    clip_probability,
    dephasing,
    ground_state,
    ideal_z_povm,
    noisy_z_povm,
    p_ad_from_times,
    p_d_from_times,
    x_basis_povm,
)

log = logging.getLogger(__name__)

MAX_STEPS = 16
MAX_PRUNED_STEPS = 20


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    kappa: float
    steps: int = 0
    omega0: float = 1.0
    basis: str = "x"

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError(f"steps must be a non-negative integer, got {self.steps!r}")
        if self.basis not in ("x", "z"):
            raise ValueError(f"basis must be 'x' or 'z', got {self.basis!r}")
        if not (math.isfinite(self.alpha) and math.isfinite(self.kappa)):
            raise ValueError("alpha and kappa must be finite")

    @property
    def hamiltonian(self) -> BatteryHamiltonian:
        return BatteryHamiltonian(self.omega0)

    def with_steps(self, steps: int) -> "ModelParams":
        return ModelParams(self.alpha, self.kappa, steps, self.omega0, self.basis)


@dataclass(frozen=True)
class NoiseParams:
    p_ad: float = 0.0
    p_d: float = 0.0
    p01: float = 0.0
    p10: float = 0.0
    enabled: bool = True

    def __post_init__(self):
        for name in ("p_ad", "p_d", "p01", "p10"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise OutOfRange(f"{name}={p!r} is not a probability")

    @classmethod
    def none(cls) -> "NoiseParams":
        return cls(enabled=False)

    @classmethod
    def from_times(cls, t1_us: float, t2_us: float, tr_ns: float, p01: float = 0.0, p10: float = 0.0) -> "NoiseParams":
        return cls(p_ad_from_times(t1_us, tr_ns), p_d_from_times(t2_us, tr_ns), p01, p10)

    @property
    def active(self) -> bool:
        return self.enabled and any((self.p_ad, self.p_d, self.p01, self.p10))

    def effective(self) -> tuple[float, float, float, float]:
        if not self.enabled:
            return 0.0, 0.0, 0.0, 0.0
        return self.p_ad, self.p_d, self.p01, self.p10


NOISELESS = NoiseParams.none()


@dataclass(frozen=True)
class TrajectoryNode:
    outcomes: str
    prob: float
    state: DensityMatrix

    @property
    def index(self) -> int:
        return int(self.outcomes, 2) if self.outcomes else 0


@dataclass(frozen=True)
class StepReport:
    step: int
    uncond_energy: float
    uncond_ergotropy: float
    daemonic_ergotropy: float
    daemonic_work: float | None = None


def collision_hamiltonian(alpha: float, kappa: float) -> np.ndarray:
    exchange = kron(SIGMA_PLUS, SIGMA_MINUS) + kron(SIGMA_MINUS, SIGMA_PLUS)
    return alpha * kron(SIGMA_X, I2) + kappa * exchange


def collision_unitary(alpha: float, kappa: float) -> np.ndarray:
    return unitary_exp(collision_hamiltonian(alpha, kappa))


def _battery_channels(noise: NoiseParams):
    """Joint-space Kraus sets in application order (dephasing first)."""
    p_ad, p_d, _, _ = noise.effective()
    if not noise.enabled or (p_ad == 0.0 and p_d == 0.0):
        return ()
    return (dephasing(p_d).on_battery(), amplitude_damping(p_ad).on_battery())


def measurement_povm(model: ModelParams, noise: NoiseParams):
    _, _, p01, p10 = noise.effective()
    z = noisy_z_povm(p01, p10) if noise.enabled else ideal_z_povm()
    return x_basis_povm(z) if model.basis == "x" else z


class _Stepper:
    """Precomputed pieces of one collision for a fixed (model, noise)."""

    def __init__(self, model: ModelParams, noise: NoiseParams):
        self.v = collision_unitary(model.alpha, model.kappa)
        self.vd = dagger(self.v)
        self.channels = _battery_channels(noise)
        self.povm = measurement_povm(model, noise)

    def joint(self, m: np.ndarray) -> np.ndarray:
        out = self.v @ kron(m, KET0_PROJ) @ self.vd
        for ch in self.channels:
            out = apply_kraus(out, ch)
        return out

    def superoperators(self) -> np.ndarray:
        """Per-outcome linear maps on row-major vec(rho_b), shape (2, 4, 4)."""
        sup = np.zeros((2, 4, 4), dtype=np.complex128)
        for col in range(4):
            basis = np.zeros((2, 2), dtype=np.complex128)
            basis[col // 2, col % 2] = 1.0
            joint = self.joint(basis)
            for a, eff in enumerate(self.povm):
                sup[a, :, col] = branch_operator(joint, eff).reshape(4)
        return sup


def uncond_step(rho_b: DensityMatrix, model: ModelParams, noise: NoiseParams = NOISELESS) -> DensityMatrix:
    """One unmonitored collision: fresh ancilla, unitary, battery noise, discard ancilla."""
    return DensityMatrix(partial_trace_env(_Stepper(model, noise).joint(rho_b.mat)))


def evolve_uncond(model: ModelParams, noise: NoiseParams = NOISELESS) -> list[DensityMatrix]:
    """Unmonitored battery states after 0, 1, ..., ``model.steps`` collisions."""
    stepper = _Stepper(model, noise)
    states = [ground_state()]
    for _ in range(model.steps):
        states.append(DensityMatrix(partial_trace_env(stepper.joint(states[-1].mat))))
    return states


def _check_size(steps: int, max_steps: int, prune_threshold: float) -> None:
    ceiling = MAX_PRUNED_STEPS if prune_threshold > 0 else max_steps
    if steps > ceiling:
        raise TreeTooLarge(f"{steps} steps exceeds the ceiling of {ceiling}")


def iter_trajectory_levels(
    model: ModelParams,
    noise: NoiseParams = NOISELESS,
    *,
    max_steps: int = MAX_STEPS,
    prune_threshold: float = 0.0,
) -> Iterator[tuple[list[TrajectoryNode], float]]:
    """Yield ``(nodes, leaked_probability)`` after 0, 1, ..., n collisions.

    Branches are propagated with the per-outcome superoperators of a single
    step, in batch. With ``prune_threshold > 0`` branches below the threshold
    are dropped and the survivors renormalized; the dropped mass accumulates
    in ``leaked_probability``.
    """
    _check_size(model.steps, max_steps, prune_threshold)
    sup = _Stepper(model, noise).superoperators()

    outcomes = [""]
    probs = np.array([1.0])
    states = np.array([KET0_PROJ.reshape(4)])
    leaked = 0.0
    yield _make_nodes(outcomes, probs, states), leaked

    for _ in range(model.steps):
        # children ordered (node0,a=0), (node0,a=1), (node1,a=0), ...
        branched = np.einsum("aij,nj->nai", sup, states).reshape(-1, 4)
        p_branch = branched[:, 0].real + branched[:, 3].real
        p_branch = np.clip(p_branch, 0.0, None)
        new_probs = np.repeat(probs, 2) * p_branch
        safe = p_branch > 0.0
        parents = np.repeat(states, 2, axis=0)
        new_states = np.where(safe[:, None], branched / np.where(safe, p_branch, 1.0)[:, None], parents)
        outcomes = [o + b for o in outcomes for b in "01"]

        if prune_threshold > 0:
            keep = new_probs >= prune_threshold
            leaked += float(new_probs[~keep].sum())
            outcomes = [o for o, k in zip(outcomes, keep) if k]
            new_probs, new_states = new_probs[keep], new_states[keep]
            new_probs = new_probs / new_probs.sum()
        probs, states = new_probs, new_states
        yield _make_nodes(outcomes, probs, states), leaked

    if leaked > 0:
        log.info("pruning dropped %.3e of trajectory probability", leaked)


def _make_nodes(outcomes, probs, states) -> list[TrajectoryNode]:
    return [
        TrajectoryNode(o, clip_probability(float(p)), DensityMatrix(s.reshape(2, 2)))
        for o, p, s in zip(outcomes, probs, states)
    ]


def enumerate_trajectories(
    model: ModelParams,
    noise: NoiseParams = NOISELESS,
    *,
    max_steps: int = MAX_STEPS,
    prune_threshold: float = 0.0,
) -> list[TrajectoryNode]:
    """All ``2**n`` conditional battery states after ``model.steps`` monitored collisions."""
    for nodes, _ in iter_trajectory_levels(model, noise, max_steps=max_steps, prune_threshold=prune_threshold):
        pass
    return nodes


def mixture(trajs: list[TrajectoryNode]) -> np.ndarray:
    out = np.zeros((2, 2), dtype=np.complex128)
    for node in trajs:
        out = out + node.prob * node.state.mat
    return out


def daemonic_ergotropy(trajs: list[TrajectoryNode], h: BatteryHamiltonian = DEFAULT_H) -> float:
    live = [node for node in trajs if node.prob > 0.0]
    if not live:
        return 0.0
    probs = np.array([node.prob for node in live])
    values = ergotropy_values(np.stack([node.state.mat for node in live]), h)
    return float(probs @ values)


def daemonic_work_exact(trajs: list[TrajectoryNode], table, h: BatteryHamiltonian = DEFAULT_H) -> float:
    """Outcome-averaged work when branch ``a`` is discharged with ``table[a]``."""
    total = 0.0
    for node in trajs:
        u = table.lookup(node.outcomes)
        if node.prob > 0.0:
            total += node.prob * extracted_work(node.state, u, h)
    return total


def step_reports(model: ModelParams, noise: NoiseParams = NOISELESS, table_builder=None) -> list[StepReport]:
    """Theory values at each step 0..n.

    ``table_builder(nodes, step)`` may return a feedback table; the report
    then includes the exact daemonic work it achieves on the same tree.
    """
    h = model.hamiltonian
    uncond = evolve_uncond(model, noise)
    reports = []
    for k, (nodes, _) in enumerate(iter_trajectory_levels(model, noise)):
        rho = uncond[k]
        work = None
        if table_builder is not None:
            work = daemonic_work_exact(nodes, table_builder(nodes, k), h)
        reports.append(
            StepReport(
                step=k,
                uncond_energy=energy(rho, h),
                uncond_ergotropy=ergotropy(rho, h).ergotropy,
                daemonic_ergotropy=daemonic_ergotropy(nodes, h),
                daemonic_work=work,
            )
        )
    return reports


# -- continuum limit -------------------------------------------------------


def _lindblad_rhs(rho: np.ndarray, alpha_tilde: float, kappa_tilde: float) -> np.ndarray:
    sm, sp = SIGMA_MINUS, SIGMA_PLUS
    n = sp @ sm
    drive = -1j * alpha_tilde * (SIGMA_X @ rho - rho @ SIGMA_X)
    decay = kappa_tilde * (sm @ rho @ sp - 0.5 * (n @ rho + rho @ n))
    return drive + decay


def lindblad_rk4(alpha_tilde: float, kappa_tilde: float, t_final: float, dt: float, rho0: DensityMatrix | None = None) -> DensityMatrix:
    """Classical RK4 for a resonantly driven qubit decaying at rate ``kappa_tilde``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    rho = (rho0 or ground_state()).mat.copy()
    steps = int(round(t_final / dt))
    h = t_final / steps if steps else 0.0
    f = lambda r: _lindblad_rhs(r, alpha_tilde, kappa_tilde)  # noqa: E731
    for _ in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return DensityMatrix(rho)


def continuum_model(alpha_tilde: float, kappa_tilde: float, t_final: float, dt: float) -> ModelParams:
    """Per-collision constants reproducing the master equation as ``dt -> 0``."""
    steps = int(round(t_final / dt))
    if steps < 1 or abs(steps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError(f"dt={dt!r} does not divide t_final={t_final!r}")
    return ModelParams(alpha=alpha_tilde * dt, kappa=math.sqrt(kappa_tilde * dt), steps=steps)


def cm_continuum_check(alpha_tilde: float, kappa_tilde: float, t_final: float, dt: float, reference_dt: float = 1e-4) -> float:
    """Max-entry distance between the unmonitored CM and the RK4 master-equation state."""
    model = continuum_model(alpha_tilde, kappa_tilde, t_final, dt)
    rho_cm = evolve_uncond(model)[-1].mat
    rho_me = lindblad_rk4(alpha_tilde, kappa_tilde, t_final, min(reference_dt, dt)).mat
    return float(np.max(np.abs(rho_cm - rho_me)))
