"""Scatter-then-measure versus measure-then-scatter on random instances.

For each trial a random state and ensemble are drawn; the two-mode Stokes
field of the scattered density matrix is compared with the Stokes field
propagated by the Mueller tensor.
"""

import argparse
import time

import numpy as np

from qpolar import apply_ensemble, mueller_ensemble, propagate_stokes, two_mode_stokes
from qpolar.sampling import random_ensemble, random_grid, random_state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--modes", type=int, default=4)
    ap.add_argument("--realizations", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    devs = []
    t0 = time.perf_counter()
    for t in range(args.trials):
        grid = random_grid(rng, int(rng.integers(1, args.modes + 1)))
        state = random_state(rng, grid)
        ens = random_ensemble(rng, grid, int(rng.integers(1, args.realizations + 1)), ("general", "unitary", "kraus")[t % 3])
        dense = two_mode_stokes(apply_ensemble(ens, state)).s
        fast = propagate_stokes(mueller_ensemble(ens), two_mode_stokes(state)).s
        devs.append(np.max(np.abs(dense - fast)))
    devs = np.asarray(devs)
    print(f"trials {args.trials}  max dev {devs.max():.3e}  median {np.median(devs):.3e}  {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
