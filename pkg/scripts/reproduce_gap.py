"""Threshold vs fixed-rate reward on Uniform[0,1] consumer surplus.

    python3 scripts/reproduce_gap.py --n-max 500 --out gap.csv
"""

import argparse

from rentmech.threshold import uniform_recurrence
from rentmech.tables import write_csv


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=500)
    p.add_argument("--out", default="gap.csv")
    args = p.parse_args()
    _, ells = uniform_recurrence(args.n_max)
    rows = [(n, n * ells[n], 0.5 * n, 2.0 * ells[n]) for n in range(1, args.n_max + 1)]
    write_csv(args.out, ("n", "R_threshold", "R_fixed_rate", "ratio"), rows)
    first = next((n for n, *_, r in rows if r > 1.9), None)
    print(f"ratio at n={args.n_max}: {rows[-1][3]:.6f}; first n with ratio > 1.9: {first}")


if __name__ == "__main__":
    main()
