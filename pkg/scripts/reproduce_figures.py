"""Theory curves and simulated 10^4-shot experiments for both coupling settings.

For every (alpha, kappa) setting and each of its device calibration rows this
writes three CSVs into ``--out-dir``:

    theory_a{alpha}_k{kappa}_row{r}.csv        exact curves (cmd_theory)
    shots_ideal_a{alpha}_k{kappa}_row{r}.csv   noisy device, ideal-model table
    shots_noisy_a{alpha}_k{kappa}_row{r}.csv   noisy device, noisy-model table

Usage::

    python scripts/reproduce_figures.py --out-dir results --steps 8
"""
import argparse
import logging
import time
from dataclasses import replace
from pathlib import Path

from cmcm_battery.cli import cmd_shots, cmd_theory, write_csv
from cmcm_battery.config import RunConfig
from cmcm_battery.presets import RUNS_BY_COUPLING, DEVICE_CALIBRATIONS, table_noise

log = logging.getLogger("reproduce")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    parser.add_argument("--steps", type=int, default=8)
    parser.add_argument("--shots", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--rows", type=int, nargs="*", help="restrict to these 0-based calibration rows")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for (alpha, kappa), rows in RUNS_BY_COUPLING.items():
        for r in rows:
            if args.rows and r not in args.rows:
                continue
            base = RunConfig(alpha=alpha, kappa=kappa, steps=args.steps, shots=args.shots,
                             seed=args.seed, noise=table_noise(r), workers=args.workers)
            tag = f"a{alpha:g}_k{kappa:g}_row{r}"
            t0 = time.perf_counter()
            write_csv(cmd_theory(base), args.out_dir / f"theory_{tag}.csv")
            for model in ("ideal", "noisy"):
                write_csv(cmd_shots(replace(base, table_model=model)), args.out_dir / f"shots_{model}_{tag}.csv")
            log.info("%s (%s): %.1f s", tag, DEVICE_CALIBRATIONS[r]["backend"], time.perf_counter() - t0)


if __name__ == "__main__":
    main()
