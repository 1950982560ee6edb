"""Polarization correlation matrix over detected modes and what derives from it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qpolar.errors import DegenerateBeamError, ValidationError
from qpolar.grid import FrameMap
from qpolar.state import PAULI, PhotonState

DEGENERATE_RTOL = 1e-12
HERMITIAN_TOL = 1e-9

# The block for axis a keeps the two other axes, ascending.
_SUBMATRIX_AXES = {1: (1, 2), 2: (0, 2), 3: (0, 1)}


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """3x3 expectation matrix with ``j[a, b] = sum_i L_al rho_ll' L_bl'``.

    ``photon_number`` is the trace of the full state, kept so that the
    degenerate-beam test can be made relative.
    """

    j: np.ndarray
    detected: np.ndarray
    photon_number: float

    @property
    def trace(self) -> float:
        return float(np.trace(self.j).real)


@dataclass(frozen=True)
class StokesVector:
    s: np.ndarray
    axis: int = 3

    @property
    def degree_of_polarization(self) -> float:
        s0 = self.s[0]
        if s0 <= 0:
            return 0.0
        return float(np.linalg.norm(self.s[1:]) / s0)


def correlation_matrix(state: PhotonState, frame: FrameMap, detected=None) -> CorrelationMatrix:
    """Expectation of the correlation operators restricted to the detected modes.

    Only the diagonal-in-momentum blocks of the kernel contribute; the
    detection set defaults to the mask carried by the state's grid.
    """
    grid = state.grid
    if not frame.grid.same_modes(grid):
        raise ValidationError("frame map was built on a different grid")
    if detected is None:
        mask = grid.detected
    else:
        mask = grid.with_detected(detected).detected
    if not mask.any():
        raise ValidationError("empty detected set")
    idx = np.flatnonzero(mask)
    blocks = state.blocks()[idx, idx]
    lam = frame.transverse[idx]
    j = np.einsum("kal,klm,kbm->ab", lam, blocks, lam)
    return CorrelationMatrix(j, mask.copy(), state.trace)


def photon_number(state: PhotonState) -> float:
    return state.trace


def submatrix(jmat: CorrelationMatrix | np.ndarray, axis: int) -> np.ndarray:
    """2x2 block of the correlation matrix transverse to reference axis ``axis`` (1..3)."""
    if axis not in _SUBMATRIX_AXES:
        raise ValidationError(f"axis must be 1, 2 or 3, got {axis!r}")
    j = jmat.j if isinstance(jmat, CorrelationMatrix) else np.asarray(jmat)
    b, c = _SUBMATRIX_AXES[axis]
    return j[np.ix_([b, c], [b, c])].copy()


def stokes_parameters(j2, axis: int = 3) -> StokesVector:
    """s_mu = Tr(sigma_mu J) for a 2x2 Hermitian block, normalized Paulis."""
    j2 = np.asarray(j2, dtype=complex)
    if j2.shape != (2, 2):
        raise ValidationError("expected a 2x2 matrix")
    if np.max(np.abs(j2 - j2.conj().T)) > HERMITIAN_TOL * max(1.0, np.linalg.norm(j2)):
        raise ValidationError("Stokes parameters need a Hermitian matrix")
    s = np.einsum("uab,ba->u", PAULI, j2).real
    return StokesVector(s, axis)


def matrix_from_stokes(s) -> np.ndarray:
    return np.einsum("u,uab->ab", np.asarray(s, dtype=complex), PAULI)


def effective_density_2x2(jmat: CorrelationMatrix) -> np.ndarray:
    j3 = submatrix(jmat, 3)
    tr = float(np.trace(j3).real)
    scale = jmat.photon_number if jmat.photon_number > 0 else jmat.trace
    if tr <= DEGENERATE_RTOL * max(scale, 0.0) or not tr > 0:
        raise DegenerateBeamError("no flux along e^(3): transverse block has zero trace")
    return j3 / tr


def effective_density_3x3(jmat: CorrelationMatrix) -> np.ndarray:
    tr = jmat.trace
    if not tr > DEGENERATE_RTOL:
        raise DegenerateBeamError("correlation matrix has zero trace")
    return jmat.j / tr
