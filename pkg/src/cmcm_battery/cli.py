"""Command line entry point: ``cmcm-battery {theory,shots,calibrate,lindblad-check}``.

Every command reads a ``key = value`` config (see :mod:`cmcm_battery.config`)
and writes one CSV table. Exit status is 0 on success, 1 for configuration
problems and 2 for model/runtime failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, replace

from .collision import (
    NOISELESS,
    cm_continuum_check,
    daemonic_ergotropy,
    daemonic_work_exact,
    evolve_uncond,
    iter_trajectory_levels,
)
from .battery import energy, ergotropy
from .config import RunConfig, parse_config
from .errors import CMCMError, ConfigError
from .protocol import calibrate_readout, run_shots, table_from_nodes


@dataclass
class OutputTable:
    header: list[str]
    rows: list[list]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError(f"row of length {len(row)} under a header of {len(self.header)}")

    def column(self, name: str) -> list:
        i = self.header.index(name)
        return [row[i] for row in self.rows]


def _fmt(x) -> str:
    # repr is the shortest string that round-trips the double exactly
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return repr(float(x))


def write_csv(table: OutputTable, path=None) -> None:
    """Write ``table`` to ``path`` (stdout when None); byte-identical for identical input."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_fmt(x) for x in row])
    data = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(data)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)


def read_csv(path) -> OutputTable:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return OutputTable(rows[0], [[float(x) for x in r] for r in rows[1:]])


def _levels(cfg: RunConfig, noise):
    return iter_trajectory_levels(cfg.model, noise, prune_threshold=cfg.prune_threshold)


def cmd_theory(cfg: RunConfig) -> OutputTable:
    """Exact per-step curves: unconditional energy/ergotropy, daemonic ergotropy, exact table work.

    Unconditional columns use the noiseless model. Table work is evaluated on
    the device trajectories (noisy when noise is configured).
    """
    model, h = cfg.model, cfg.model.hamiltonian
    noisy = cfg.noise_configured
    uncond = evolve_uncond(model)
    ideal_levels = _levels(cfg, NOISELESS)
    noisy_levels = _levels(cfg, cfg.noise) if noisy else None

    header = ["step", "uncond_energy", "uncond_ergotropy", "daemonic_ergotropy_ideal"]
    if noisy:
        header.append("daemonic_ergotropy_noisy")
    header += ["exact_work_ideal_table", "exact_work_noisy_table"]

    rows = []
    for k in range(model.steps + 1):
        ideal_nodes, _ = next(ideal_levels)
        device_nodes = next(noisy_levels)[0] if noisy else ideal_nodes
        ideal_table = table_from_nodes(ideal_nodes, k, "ideal", model.omega0)
        noisy_table = table_from_nodes(device_nodes, k, "noisy" if noisy else "ideal", model.omega0)
        row = [k, energy(uncond[k], h), ergotropy(uncond[k], h).ergotropy, daemonic_ergotropy(ideal_nodes, h)]
        if noisy:
            row.append(daemonic_ergotropy(device_nodes, h))
        row += [daemonic_work_exact(device_nodes, ideal_table, h), daemonic_work_exact(device_nodes, noisy_table, h)]
        rows.append(row)
    return OutputTable(header, rows)


def cmd_shots(cfg: RunConfig) -> OutputTable:
    """Simulated experiment at every step count, next to its exact expectation."""
    model, h = cfg.model, cfg.model.hamiltonian
    table_noise = cfg.table_noise()
    device_levels = _levels(cfg, cfg.noise)
    table_levels = _levels(cfg, table_noise)
    tag = "noisy" if table_noise.enabled else "ideal"

    rows = []
    for k in range(model.steps + 1):
        device_nodes, _ = next(device_levels)
        table = table_from_nodes(next(table_levels)[0], k, tag, model.omega0)
        theory = daemonic_work_exact(device_nodes, table, h)
        rec = run_shots(
            model.with_steps(k),
            cfg.noise,
            table,
            cfg.shots,
            cfg.seed,
            battery_readout=cfg.battery_readout,
            workers=cfg.workers,
        ).records[0]
        diff = rec.mean_extracted_work - theory
        z = diff / rec.std_error if rec.std_error > 0 else 0.0
        rows.append([k, rec.mean_extracted_work, rec.std_error, theory, z])
    return OutputTable(["step", "work_mean", "work_stderr", "theory_daemonic_work", "z_score"], rows)


def cmd_calibrate(cfg: RunConfig) -> OutputTable:
    res = calibrate_readout(cfg.noise, cfg.shots, cfg.seed)
    return OutputTable(["p01_est", "p10_est", "shots"], [[res.p01_est, res.p10_est, res.shots]])


def cmd_lindblad_check(cfg: RunConfig) -> OutputTable:
    """Continuum-limit error of the unmonitored model for ``dt, dt/2, ...``.

    ``alpha`` and ``kappa`` are read as the master-equation drive and decay rate.
    """
    rows, prev = [], None
    for i in range(cfg.halvings + 1):
        dt = cfg.dt / 2**i
        err = cm_continuum_check(cfg.alpha, cfg.kappa, cfg.t_final, dt)
        rows.append([dt, err, prev / err if prev is not None and err > 0 else math.nan])
        prev = err
    return OutputTable(["dt", "error", "ratio_to_previous"], rows)


COMMANDS = {
    "theory": cmd_theory,
    "shots": cmd_shots,
    "calibrate": cmd_calibrate,
    "lindblad-check": cmd_lindblad_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmcm-battery", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--out", default=None, help="CSV output path (default: config output_path, else stdout)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)

    try:
        table = COMMANDS[args.command](cfg)
        write_csv(table, args.out or cfg.output_path)
    except (CMCMError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
