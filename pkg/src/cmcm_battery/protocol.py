"""Feedback tables and the shot-by-shot virtual experiment.

Randomness: every experiment draws from a Philox counter-based generator
whose key is derived from ``(seed, purpose, step)``. Shot ``i`` always
consumes the same block of the counter stream, so splitting shots into chunks
(or running chunks concurrently) cannot change any result.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .battery import BatteryHamiltonian, ergotropy
from .collision import (
    NOISELESS,
    ModelParams,
    NoiseParams,
    TrajectoryNode,
    _battery_channels,
    collision_unitary,
    evolve_uncond,
    enumerate_trajectories,
    measurement_povm,
)
from .errors import MissingTableEntry, TableModelMismatch
from .linalg import dagger
from .quantum import I2, KET0_PROJ, noisy_z_povm

CHUNK = 65536

_PURPOSE = {"cmcm": 1, "uncond": 2, "calib0": 3, "calib1": 4}


@dataclass(frozen=True)
class FeedbackTable:
    n: int
    model_tag: str
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.complex128)
        if e.shape != (2**self.n, 2, 2):
            raise ValueError(f"expected {2**self.n} 2x2 entries, got shape {e.shape}")
        err = np.max(np.abs(e @ np.conj(np.transpose(e, (0, 2, 1))) - I2))
        if err > 1e-10:
            raise ValueError(f"table entry not unitary (err={err:.3e})")
        if self.model_tag not in ("ideal", "noisy"):
            raise ValueError(f"unknown model tag {self.model_tag!r}")
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    def lookup(self, outcomes: str) -> np.ndarray:
        if len(outcomes) != self.n:
            raise MissingTableEntry(f"table for n={self.n} has no entry for {outcomes!r}")
        return self.entries[int(outcomes, 2) if outcomes else 0]

    @classmethod
    def identity(cls, n: int, model_tag: str = "ideal") -> "FeedbackTable":
        return cls(n, model_tag, np.tile(I2, (2**n, 1, 1)))


def table_from_nodes(nodes: list[TrajectoryNode], n: int, model_tag: str, omega0: float = 1.0) -> FeedbackTable:
    """Optimal extraction unitary for each conditional state; identity where a branch was pruned."""
    h = BatteryHamiltonian(omega0)
    entries = np.tile(I2, (2**n, 1, 1))
    for node in nodes:
        entries[node.index] = ergotropy(node.state, h).optimal_unitary
    return FeedbackTable(n, model_tag, entries)


def build_feedback_table(model: ModelParams, noise: NoiseParams | None = None, n: int | None = None) -> FeedbackTable:
    noise = NOISELESS if noise is None else noise
    n = model.steps if n is None else n
    nodes = enumerate_trajectories(model.with_steps(n), noise)
    tag = "noisy" if noise.active else "ideal"
    return table_from_nodes(nodes, n, tag, model.omega0)


# -- sampling ---------------------------------------------------------------


def _philox_key(seed: int, purpose: str, step: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(_PURPOSE[purpose], int(step)))
    return ss.generate_state(2, dtype=np.uint64)


def shot_uniforms(seed: int, purpose: str, step: int, start: int, stop: int, width: int) -> np.ndarray:
    """Uniforms for shots ``start..stop-1``; row ``i`` depends only on the shot index."""
    w = 4 * math.ceil(width / 4)  # Philox emits 4 words per counter tick
    bitgen = np.random.Philox(key=_philox_key(seed, purpose, step))
    bitgen.advance(start * w // 4)
    return np.random.Generator(bitgen).random((stop - start, w))[:, :width]


def _chunks(shots: int):
    return [(s, min(s + CHUNK, shots)) for s in range(0, shots, CHUNK)]


def _map_chunks(fn, shots: int, workers: int):
    chunks = _chunks(shots)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: fn(*c), chunks))
    else:
        parts = [fn(*c) for c in chunks]
    return np.concatenate(parts) if parts else np.empty(0)


def _read_excited(p_exc: np.ndarray, u: np.ndarray, readout: tuple[float, float]) -> np.ndarray:
    """Sampled battery sigma_z readout (1 = excited), with optional confusion (p01, p10)."""
    p01, p10 = readout
    p_read1 = p_exc * (1.0 - p01) + (1.0 - p_exc) * p10
    return (u < p_read1).astype(np.float64)


def _mean_stderr(x: np.ndarray) -> tuple[float, float]:
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


@dataclass(frozen=True)
class ShotRecord:
    step: int
    shots: int
    mean_extracted_work: float
    std_error: float
    uncond_energy_est: float
    uncond_energy_stderr: float
    final_energy_est: float
    final_energy_stderr: float


@dataclass(frozen=True)
class ShotResult:
    records: list[ShotRecord]
    seed: int


@dataclass(frozen=True)
class CalibrationResult:
    p01_est: float
    p10_est: float
    shots: int


def estimate_uncond_energy(
    device_model: ModelParams,
    device_noise: NoiseParams = NOISELESS,
    shots: int = 10_000,
    seed: int = 0,
    *,
    battery_readout: tuple[float, float] = (0.0, 0.0),
    workers: int = 1,
) -> list[tuple[float, float]]:
    """Sampled ``(mean, stderr)`` of the unmonitored final energy at each step 0..n.

    Each step is a separate experiment: no extraction unitary, then one
    sigma_z readout of the battery per shot.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    n = device_model.steps
    p_exc = np.array([rho.mat[1, 1].real for rho in evolve_uncond(device_model, device_noise)])

    def run(start, stop):
        u = shot_uniforms(seed, "uncond", 0, start, stop, n + 1)
        return _read_excited(p_exc[None, :], u, battery_readout)

    bits = _map_chunks(run, shots, workers).reshape(shots, n + 1)
    w0 = device_model.omega0
    return [tuple(w0 * v for v in _mean_stderr(bits[:, k])) for k in range(n + 1)]


def _monitored_final_energies(model, noise, table, seed, start, stop, readout):
    n = model.steps
    u = shot_uniforms(seed, "cmcm", n, start, stop, n + 1)
    batch = stop - start
    v = collision_unitary(model.alpha, model.kappa)
    vd = dagger(v)
    channels = _battery_channels(noise)
    effects = [e.mat for e in measurement_povm(model, noise)]

    rho = np.broadcast_to(KET0_PROJ, (batch, 2, 2)).copy()
    index = np.zeros(batch, dtype=np.int64)
    for step in range(n):
        joint = np.einsum("ij,njk,kl->nil", v, np.einsum("nab,cd->nacbd", rho, KET0_PROJ).reshape(batch, 4, 4), vd)
        for ch in channels:
            joint = sum(np.einsum("ij,njk,lk->nil", k, joint, k.conj()) for k in ch.kraus)
        j6 = joint.reshape(batch, 2, 2, 2, 2)
        # Tr_E[joint (I x effect)] for each outcome
        branches = [np.einsum("nbecf,fe->nbc", j6, eff) for eff in effects]
        p0 = np.clip(np.einsum("nii->n", branches[0]).real, 0.0, 1.0)
        p1 = np.clip(np.einsum("nii->n", branches[1]).real, 0.0, 1.0)
        take1 = u[:, step] >= p0 / (p0 + p1)
        p_sel = np.where(take1, p1, p0)
        sel = np.where(take1[:, None, None], branches[1], branches[0])
        rho = sel / p_sel[:, None, None]
        index = 2 * index + take1
        # ancilla reset: the next step starts again from |0>

    us = table.entries[index]
    final = np.einsum("nij,njk,nlk->nil", us, rho, us.conj())
    return model.omega0 * _read_excited(final[:, 1, 1].real, u[:, n], readout)


def run_shots(
    device_model: ModelParams,
    device_noise: NoiseParams,
    table: FeedbackTable,
    shots: int = 10_000,
    seed: int = 0,
    *,
    battery_readout: tuple[float, float] = (0.0, 0.0),
    workers: int = 1,
) -> ShotResult:
    """Estimate the daemonic extracted work at ``n = device_model.steps``.

    Two experiments, as on hardware: the unmonitored energy ``E(rho_n)`` and
    the mean final energy after monitored collisions plus the table's
    feedback unitary. Their difference is the extracted work; the standard
    errors add in quadrature.
    """
    if table.n != device_model.steps:
        raise TableModelMismatch(f"table built for n={table.n}, device runs n={device_model.steps}")
    if shots < 1:
        raise ValueError("shots must be positive")
    e_unc, se_unc = estimate_uncond_energy(
        device_model, device_noise, shots, seed, battery_readout=battery_readout, workers=workers
    )[-1]
    finals = _map_chunks(
        lambda a, b: _monitored_final_energies(device_model, device_noise, table, seed, a, b, battery_readout),
        shots,
        workers,
    )
    e_fin, se_fin = _mean_stderr(finals)
    record = ShotRecord(
        step=device_model.steps,
        shots=shots,
        mean_extracted_work=e_unc - e_fin,
        std_error=math.hypot(se_unc, se_fin),
        uncond_energy_est=e_unc,
        uncond_energy_stderr=se_unc,
        final_energy_est=e_fin,
        final_energy_stderr=se_fin,
    )
    return ShotResult([record], seed)


def run_sweep(
    device_model: ModelParams,
    device_noise: NoiseParams,
    table_noise: NoiseParams | None,
    shots: int = 10_000,
    seed: int = 0,
    **kwargs,
) -> tuple[ShotResult, list[FeedbackTable]]:
    """Run the experiment once per step count 0..n, each with its own table.

    Tables are optimized for ``table_noise`` (``None`` means the noiseless model).
    """
    records, tables = [], []
    for k in range(device_model.steps + 1):
        model_k = device_model.with_steps(k)
        table = build_feedback_table(model_k, table_noise)
        records.extend(run_shots(model_k, device_noise, table, shots, seed, **kwargs).records)
        tables.append(table)
    return ShotResult(records, seed), tables


def calibrate_readout(true_noise: NoiseParams, shots: int = 10_000, seed: int = 0) -> CalibrationResult:
    """Readout confusion estimated by counting, with |0> and |1> preparations."""
    if shots < 1:
        raise ValueError("shots must be positive")
    _, _, p01, p10 = true_noise.effective()
    pi0, pi1 = noisy_z_povm(p01, p10)
    p_read1_from0 = float(np.trace(pi1.mat @ KET0_PROJ).real)
    p_read0_from1 = float(np.trace(pi0.mat @ (I2 - KET0_PROJ)).real)
    u0 = shot_uniforms(seed, "calib0", 0, 0, shots, 1)[:, 0]
    u1 = shot_uniforms(seed, "calib1", 0, 0, shots, 1)[:, 0]
    n1 = int(np.count_nonzero(u0 < p_read1_from0))
    n0 = int(np.count_nonzero(u1 < p_read0_from1))
    return CalibrationResult(p01_est=n0 / shots, p10_est=n1 / shots, shots=shots)
