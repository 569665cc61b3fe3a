"""Monitored collisional model of an open qubit battery and daemonic work extraction."""
from .battery import BatteryHamiltonian, ErgotropyResult, energy, ergotropy, extracted_work
from .collision import (
    ModelParams,
    NoiseParams,
    StepReport,
    TrajectoryNode,
    cm_continuum_check,
    collision_unitary,
    daemonic_ergotropy,
    daemonic_work_exact,
    enumerate_trajectories,
    evolve_uncond,
    lindblad_rk4,
    step_reports,
    uncond_step,
)
from .protocol import (
    CalibrationResult,
    FeedbackTable,
    ShotResult,
    build_feedback_table,
    calibrate_readout,
    estimate_uncond_energy,
    run_shots,
    run_sweep,
)
from .quantum import DensityMatrix, KrausChannel, PovmEffect

__all__ = [
    "BatteryHamiltonian",
    "CalibrationResult",
    "DensityMatrix",
    "ErgotropyResult",
    "FeedbackTable",
    "KrausChannel",
    "ModelParams",
    "NoiseParams",
    "PovmEffect",
    "ShotResult",
    "StepReport",
    "TrajectoryNode",
    "build_feedback_table",
    "calibrate_readout",
    "cm_continuum_check",
    "collision_unitary",
    "daemonic_ergotropy",
    "daemonic_work_exact",
    "energy",
    "enumerate_trajectories",
    "ergotropy",
    "estimate_uncond_energy",
    "evolve_uncond",
    "extracted_work",
    "lindblad_rk4",
    "run_shots",
    "run_sweep",
    "step_reports",
    "uncond_step",
]
