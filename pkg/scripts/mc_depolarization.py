"""Convergence of the random-unitary ensemble toward the ideal depolarizer.

Prints the max deviation of the aligned single-mode Mueller block from
diag(1, 0, 0, 0) as the number of realizations grows.  The deviation
should fall roughly like 1/sqrt(n).
"""

import argparse

import numpy as np

from qpolar import ModeGrid, mueller_ensemble, random_unitary_ensemble, reduce_single_mode


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-exp", type=int, default=5, help="largest n is 10**max_exp")
    args = ap.parse_args()

    grid = ModeGrid([[0, 0, 1.0]], [1.0])
    target = np.diag([1.0, 0, 0, 0])
    print(f"{'n':>8} {'max dev':>10} {'dev*sqrt(n)':>12}")
    for e in range(1, args.max_exp + 1):
        n = 10**e
        m = reduce_single_mode(mueller_ensemble(random_unitary_ensemble(grid, n, seed=args.seed)), 0, 0)
        dev = np.max(np.abs(m - target))
        print(f"{n:>8} {dev:>10.4f} {dev * np.sqrt(n):>12.3f}")


if __name__ == "__main__":
    main()
