"""Seeded random instances: grids, states, ensembles, rotations.

All functions take a ``numpy.random.Generator`` so that a single seed fixes
a whole batch of draws.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import sqrtm
from scipy.spatial.transform import Rotation

from qpolar.grid import ModeGrid
from qpolar.scattering import ScatteringEnsemble
from qpolar.state import PhotonState


def random_vectors(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Wave vectors with isotropic directions and magnitudes in [0.5, 2) * scale."""
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * scale * rng.uniform(0.5, 2.0, size=(n, 1))


def random_grid(rng: np.random.Generator, K: int, on_axis: bool = False) -> ModeGrid:
    modes = random_vectors(rng, K)
    if on_axis:
        modes[0] = [0.0, 0.0, rng.uniform(0.5, 2.0)]
    return ModeGrid(modes, rng.uniform(0.2, 2.0, size=K))


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_state(rng: np.random.Generator, grid: ModeGrid, rank: int | None = None) -> PhotonState:
    """Unit-trace state of the given rank (random in [1, 2K] by default)."""
    n = 2 * grid.size
    if rank is None:
        rank = int(rng.integers(1, n + 1))
    g = random_complex(rng, n, rank)
    rho = g @ g.conj().T
    return PhotonState(grid, rho / np.trace(rho).real)


def random_ensemble(
    rng: np.random.Generator, grid: ModeGrid, n: int, kind: str = "general"
) -> ScatteringEnsemble:
    """Random ensemble of ``n`` realizations over the full 2K-dimensional space.

    ``kind`` is ``"general"`` (arbitrary complex operators, lossy or
    amplifying), ``"unitary"`` or ``"kraus"`` (trace preserving as a whole
    but with non-unitary members).
    """
    dim = 2 * grid.size
    probs = rng.uniform(0.1, 1.0, size=n)
    probs /= probs.sum()
    if kind == "general":
        ops = random_complex(rng, n, dim, dim) / np.sqrt(dim)
    elif kind == "unitary":
        ops = np.stack([np.linalg.qr(random_complex(rng, dim, dim))[0] for _ in range(n)])
    elif kind == "kraus":
        g = random_complex(rng, n, dim, dim)
        s = np.einsum("a,aji,ajk->ik", probs, g.conj(), g)
        ops = g @ np.linalg.inv(sqrtm(s))
    else:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    return ScatteringEnsemble(grid, probs, ops)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return Rotation.random(random_state=rng).as_matrix()
