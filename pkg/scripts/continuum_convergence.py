"""First-order convergence of the unmonitored collision model to its master equation.

Prints the max-entry error against an RK4 reference and the ratio between
successive dt halvings (about 2 for first-order convergence).

Usage::

    python scripts/continuum_convergence.py --alpha 1 --kappa 1 --halvings 4
"""
import argparse

from cmcm_battery.cli import cmd_lindblad_check, write_csv
from cmcm_battery.config import RunConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=1.0, help="drive rate of the master equation")
    parser.add_argument("--kappa", type=float, default=1.0, help="decay rate of the master equation")
    parser.add_argument("--t-final", type=float, default=1.0)
    parser.add_argument("--dt", type=float, default=4e-3)
    parser.add_argument("--halvings", type=int, default=3)
    args = parser.parse_args()
    cfg = RunConfig(alpha=args.alpha, kappa=args.kappa, t_final=args.t_final, dt=args.dt, halvings=args.halvings)
    write_csv(cmd_lindblad_check(cfg))


if __name__ == "__main__":
    main()
