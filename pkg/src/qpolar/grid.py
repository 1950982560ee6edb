"""Discretized momentum grids, polarization triads and frame maps.

A continuum integral over the invariant measure is replaced by a weighted
sum, ``int dk f(k) -> sum_i w_i f(k_i)``, and the singular plane-wave
normalization becomes ``<i|j> = delta_ij / w_i``.  Every (2 pi)^3 and 2 k0
factor lives inside the weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qpolar.errors import ValidationError

DUPLICATE_RTOL = 1e-9
ORTHONORMAL_TOL = 1e-12

STANDARD_BASIS = np.eye(3)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ModeGrid:
    """Finite set of wave vectors with quadrature weights.

    ``modes`` has shape (K, 3), ``weights`` shape (K,), ``detected`` is a
    boolean mask of shape (K,).
    """

    modes: np.ndarray
    weights: np.ndarray
    detected: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        modes = np.asarray(self.modes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if modes.ndim != 2 or modes.shape[1] != 3 or modes.shape[0] == 0:
            raise ValidationError("grid needs at least one 3-vector mode")
        if weights.shape != (modes.shape[0],):
            raise ValidationError("one weight per mode required")
        if not np.all(np.isfinite(modes)) or not np.all(np.isfinite(weights)):
            raise ValidationError("non-finite mode or weight")
        norms = np.linalg.norm(modes, axis=1)
        if np.any(norms <= 0):
            raise ValidationError("zero-norm wave vector")
        if np.any(weights <= 0):
            raise ValidationError("weights must be positive")
        _check_distinct(modes, norms)
        detected = self.detected
        if detected is None:
            detected = np.ones(len(modes), dtype=bool)
        detected = np.asarray(detected)
        if detected.dtype != bool:
            detected = _mask_from_indices(detected, len(modes))
        if detected.shape != (len(modes),):
            raise ValidationError("detected mask has wrong length")
        object.__setattr__(self, "modes", _frozen(modes))
        object.__setattr__(self, "weights", _frozen(weights))
        object.__setattr__(self, "detected", _frozen(detected))

    @property
    def size(self) -> int:
        return len(self.modes)

    @property
    def frequencies(self) -> np.ndarray:
        return np.linalg.norm(self.modes, axis=1)

    def with_detected(self, detected) -> "ModeGrid":
        """Copy of the grid with a new detection set (mask or index list)."""
        return ModeGrid(self.modes, self.weights, detected)

    def same_modes(self, other: "ModeGrid") -> bool:
        """True when both grids carry identical modes and weights.

        The detection mask is ignored: it selects what a detector sees, not
        which Hilbert space the state lives in.
        """
        if self is other:
            return True
        return (
            self.modes.shape == other.modes.shape
            and np.array_equal(self.modes, other.modes)
            and np.array_equal(self.weights, other.weights)
        )


def _mask_from_indices(indices, size: int) -> np.ndarray:
    mask = np.zeros(size, dtype=bool)
    for i in np.asarray(indices, dtype=int).ravel():
        if not 0 <= i < size:
            raise ValidationError(f"detected index {i} out of range for {size} modes")
        mask[i] = True
    return mask


def _check_distinct(modes: np.ndarray, norms: np.ndarray) -> None:
    diff = np.linalg.norm(modes[:, None, :] - modes[None, :, :], axis=-1)
    scale = np.maximum(norms[:, None], norms[None, :])
    close = diff < DUPLICATE_RTOL * scale
    np.fill_diagonal(close, False)
    if close.any():
        i, j = np.argwhere(close)[0]
        raise ValidationError(f"duplicate modes {i} and {j}")


def polarization_triad(k) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the real polarization triad (eps1, eps2, eps3) for wave vector k.

    eps1 is the polar unit vector theta-hat, eps2 the azimuthal phi-hat and
    eps3 = k/|k|, so eps1 x eps2 = eps3.  On the z axis phi-hat is undefined;
    there eps1 = x-hat and eps2 = +-y-hat.
    """
    k = np.asarray(k, dtype=float)
    r = float(np.linalg.norm(k))
    if not r > 0:
        raise ValidationError("polarization triad of a zero vector")
    x, y, z = k
    rho = float(np.hypot(x, y))
    if rho == 0.0:
        sign = 1.0 if z > 0 else -1.0
        return (
            np.array([1.0, 0.0, 0.0]),
            np.array([0.0, sign, 0.0]),
            np.array([0.0, 0.0, sign]),
        )
    cos_t, sin_t = z / r, rho / r
    cos_p, sin_p = x / rho, y / rho
    e1 = np.array([cos_t * cos_p, cos_t * sin_p, -sin_t])
    e2 = np.array([-sin_p, cos_p, 0.0])
    return e1, e2, k / r


def triad_matrix(k) -> np.ndarray:
    """Triad as a 3x3 matrix whose columns are eps1, eps2, eps3."""
    return np.column_stack(polarization_triad(k))


def transverse_delta(k) -> np.ndarray:
    """Projector onto the plane orthogonal to k: delta_ab - k_a k_b / |k|^2."""
    k = np.asarray(k, dtype=float)
    n2 = float(k @ k)
    if not n2 > 0:
        raise ValidationError("transverse delta of a zero vector")
    return np.eye(3) - np.outer(k, k) / n2


def check_basis(basis, tol: float = ORTHONORMAL_TOL) -> np.ndarray:
    """Validate a reference basis given as three row vectors e^(a)."""
    basis = np.asarray(basis, dtype=float)
    if basis.shape != (3, 3):
        raise ValidationError("reference basis must be three 3-vectors")
    if np.max(np.abs(basis @ basis.T - np.eye(3))) > tol:
        raise ValidationError("reference basis is not orthonormal")
    if np.max(np.abs(basis.T @ basis - np.eye(3))) > tol:
        raise ValidationError("reference basis is not complete")
    return basis


@dataclass(frozen=True, eq=False)
class FrameMap:
    """Per-mode orthogonal maps Lambda_ab(k_i) = e^(a) . eps^(b)(k_i).

    ``lam`` has shape (K, 3, 3); column b of ``lam[i]`` holds eps^(b)(k_i)
    expressed in the reference basis.
    """

    grid: ModeGrid
    lam: np.ndarray
    basis: np.ndarray

    @property
    def transverse(self) -> np.ndarray:
        """The (K, 3, 2) polarization columns of Lambda."""
        return self.lam[:, :, :2]


def frame_map(grid: ModeGrid, basis=STANDARD_BASIS) -> FrameMap:
    basis = check_basis(basis)
    triads = np.stack([triad_matrix(k) for k in grid.modes])
    lam = np.einsum("ai,kib->kab", basis, triads)
    return FrameMap(grid, _frozen(lam), _frozen(basis))


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rotation by ``angle`` about ``axis`` (Rodrigues)."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if not n > 0:
        raise ValidationError("rotation axis must be nonzero")
    ux, uy, uz = axis / n
    K = np.array([[0, -uz, uy], [uz, 0, -ux], [-uy, ux, 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


def rotated_basis(R) -> np.ndarray:
    """Reference basis whose a-th vector is column a of R."""
    return np.asarray(R, dtype=float).T.copy()


# -- grid construction -------------------------------------------------------


def explicit_grid(modes: Sequence, weights: Sequence | None = None, detected=None) -> ModeGrid:
    modes = np.asarray(modes, dtype=float).reshape(-1, 3) if len(modes) else np.zeros((0, 3))
    if weights is None:
        weights = np.ones(len(modes))
    return ModeGrid(modes, np.asarray(weights, dtype=float), detected)


def cap_grid(
    center=(0.0, 0.0, 1.0),
    k0: float = 1.0,
    half_angle: float = 0.0,
    rings: int = 1,
    per_ring: int = 6,
    total_weight: float = 1.0,
    detected=None,
) -> ModeGrid:
    """Modes on a spherical cap of radius k0 around ``center``.

    One mode sits on the axis, then ``rings`` rings at evenly spaced polar
    angles up to ``half_angle`` with ``per_ring`` modes each.  Weights are
    the solid angle of each mode's cell, scaled to sum to ``total_weight``.
    A zero half-angle collapses to the single axial mode.
    """
    if not k0 > 0:
        raise ValidationError("k0 must be positive")
    if not 0 <= half_angle <= np.pi:
        raise ValidationError("half_angle must lie in [0, pi]")
    if rings < 0 or per_ring < 1:
        raise ValidationError("rings >= 0 and per_ring >= 1 required")
    if not total_weight > 0:
        raise ValidationError("total_weight must be positive")
    u1, u2, u3 = polarization_triad(center)
    if half_angle == 0 or rings == 0:
        return ModeGrid(np.array([k0 * u3]), np.array([total_weight]), detected)

    thetas = half_angle * np.arange(1, rings + 1) / rings
    # edges[r] .. edges[r+1] bounds the cell of ring r (ring 0 is the axis)
    edges = np.concatenate([[0.0, 0.5 * thetas[0]], 0.5 * (thetas[:-1] + thetas[1:]), [half_angle]])
    modes = [k0 * u3]
    cells = [2 * np.pi * (1 - np.cos(edges[1]))]
    for r, theta in enumerate(thetas, start=1):
        band = 2 * np.pi * (np.cos(edges[r]) - np.cos(edges[r + 1]))
        for p in range(per_ring):
            phi = 2 * np.pi * p / per_ring
            d = np.sin(theta) * (np.cos(phi) * u1 + np.sin(phi) * u2) + np.cos(theta) * u3
            modes.append(k0 * d)
            cells.append(band / per_ring)
    cells = np.asarray(cells)
    return ModeGrid(np.array(modes), total_weight * cells / cells.sum(), detected)


def sphere_grid(n: int, k0: float = 1.0, total_weight: float = 1.0, detected=None) -> ModeGrid:
    """Fibonacci-lattice sampling of the full sphere with equal weights."""
    if n < 1:
        raise ValidationError("sphere grid needs n >= 1")
    if not k0 > 0 or not total_weight > 0:
        raise ValidationError("k0 and total_weight must be positive")
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    rho = np.sqrt(1 - z * z)
    phi = np.pi * (1 + 5**0.5) * i
    dirs = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    return ModeGrid(k0 * dirs, np.full(n, total_weight / n), detected)


def build_grid(spec: dict) -> ModeGrid:
    """Build a grid from a scene-file description.

    ``{"kind": "explicit", "modes": [...], "weights": [...]}``,
    ``{"kind": "cap", "center": ..., "k0": ..., "half_angle": ..., "rings": ..., "per_ring": ...}``
    or ``{"kind": "sphere", "n": ..., "k0": ...}``.  An optional
    ``"detected"`` index list applies to all kinds.
    """
    spec = dict(spec)
    kind = spec.pop("kind", "explicit")
    detected = spec.pop("detected", None)
    if kind == "explicit":
        modes = spec.get("modes") or []
        if len(modes) == 0:
            raise ValidationError("grid spec has no modes")
        return explicit_grid(modes, spec.get("weights"), detected)
    if kind == "cap":
        return cap_grid(detected=detected, **spec)
    if kind == "sphere":
        return sphere_grid(detected=detected, **spec)
    raise ValidationError(f"unknown grid kind {kind!r}")
