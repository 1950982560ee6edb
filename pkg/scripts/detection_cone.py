"""Detected photon number and degree of polarization versus detector aperture.

A wave packet polarized along theta-hat (radial polarization) on a cap
grid is detected through a cone of growing half-angle.  The trace of the
correlation matrix grows monotonically toward the photon number while the
transverse degree of polarization collapses, since the radial field
averages out over each ring.
"""

import argparse

import numpy as np

from qpolar import cap_grid, correlation_matrix, frame_map, stokes_parameters, submatrix, wave_packet_state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--half-angle", type=float, default=0.6)
    ap.add_argument("--rings", type=int, default=6)
    ap.add_argument("--per-ring", type=int, default=8)
    ap.add_argument("--width", type=float, default=0.3, help="angular width of the Gaussian packet")
    args = ap.parse_args()

    grid = cap_grid(half_angle=args.half_angle, rings=args.rings, per_ring=args.per_ring)
    polar = np.arccos(np.clip(grid.modes[:, 2] / np.linalg.norm(grid.modes, axis=1), -1, 1))
    state = wave_packet_state(grid, np.exp(-((polar / args.width) ** 2) / 2), [1, 0])
    fm = frame_map(grid)
    print(f"{'cone':>6} {'modes':>5} {'tr J':>8} {'DOP(z)':>8}")
    for cone in np.linspace(0, args.half_angle, 7):
        detected = np.flatnonzero(polar <= cone + 1e-12)
        J = correlation_matrix(state, fm, detected)
        dop = stokes_parameters(submatrix(J, 3)).degree_of_polarization
        print(f"{cone:>6.3f} {len(detected):>5} {J.trace.real:>8.4f} {dop:>8.4f}")


if __name__ == "__main__":
    main()
