"""Single-photon density kernels over a mode grid and their Stokes fields.

A state is stored as one dense 2K x 2K matrix in the weighted basis,
``rho_w[(i,l),(j,l')] = sqrt(w_i w_j) rho_ll'(k_i, k_j)``, with row index
``2*i + l``.  In this basis the trace is the photon number and ordinary
matrix algebra applies; kernel blocks in continuum units are recovered by
dividing out the weights.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from qpolar.errors import ValidationError
from qpolar.grid import ModeGrid

SQRT2 = np.sqrt(2.0)

# Normalized Pauli basis, Tr(s_m s_n) = delta_mn.
PAULI = (
    np.array(
        [
            [[1, 0], [0, 1]],
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )
    / SQRT2
)
PAULI.setflags(write=False)

HERMITICITY_RTOL = 1e-12
PSD_RTOL = 1e-10
TRACE_TOL = 1e-10
STOKES_SYMMETRY_TOL = 1e-9


class NonPhysicalWarning(UserWarning):
    """A kernel failed the Hermitian / positive-semidefinite check."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PhotonState:
    grid: ModeGrid
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        n = 2 * self.grid.size
        if rho.shape != (n, n):
            raise ValidationError(f"state matrix must be {n}x{n}, got {rho.shape}")
        object.__setattr__(self, "rho", _frozen(rho))

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    @property
    def is_normalized(self) -> bool:
        return abs(self.trace - 1.0) <= TRACE_TOL

    def blocks(self) -> np.ndarray:
        """Weighted-basis 2x2 blocks, shape (K, K, 2, 2)."""
        K = self.grid.size
        return self.rho.reshape(K, 2, K, 2).transpose(0, 2, 1, 3)

    def kernel(self) -> np.ndarray:
        """Continuum-unit kernel rho_ll'(k_i, k_j), shape (K, K, 2, 2)."""
        sw = np.sqrt(self.grid.weights)
        return self.blocks() / np.outer(sw, sw)[:, :, None, None]

    def scaled(self, factor: float) -> "PhotonState":
        return PhotonState(self.grid, factor * self.rho)


def state_from_kernel(grid: ModeGrid, kernel) -> PhotonState:
    """Inverse of :meth:`PhotonState.kernel`."""
    kernel = np.asarray(kernel, dtype=complex)
    K = grid.size
    if kernel.shape != (K, K, 2, 2):
        raise ValidationError(f"kernel must have shape {(K, K, 2, 2)}")
    sw = np.sqrt(grid.weights)
    blocks = kernel * np.outer(sw, sw)[:, :, None, None]
    return PhotonState(grid, blocks.transpose(0, 2, 1, 3).reshape(2 * K, 2 * K))


def _pol_vector(pol) -> np.ndarray:
    pol = np.asarray(pol, dtype=complex).ravel()
    if pol.shape != (2,):
        raise ValidationError("polarization must be a complex 2-vector")
    return pol


def plane_wave_state(grid: ModeGrid, mode: int, pol) -> PhotonState:
    """Normalized pure state occupying a single mode with Jones vector ``pol``."""
    if not 0 <= mode < grid.size:
        raise ValidationError(f"mode index {mode} out of range")
    pol = _pol_vector(pol)
    norm2 = float(np.vdot(pol, pol).real)
    if not norm2 > 0:
        raise ValidationError("zero polarization vector")
    rho = np.zeros((2 * grid.size, 2 * grid.size), dtype=complex)
    rho[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = np.outer(pol, pol.conj()) / norm2
    return PhotonState(grid, rho)


def wave_packet_state(grid: ModeGrid, amplitude, pol) -> PhotonState:
    """Normalized pure wave packet psi_l(k_i) = amplitude_i * pol_i,l.

    ``pol`` is either one Jones vector shared by all modes or one per mode.
    """
    amplitude = np.asarray(amplitude, dtype=complex).ravel()
    K = grid.size
    if amplitude.shape != (K,):
        raise ValidationError("one amplitude per mode required")
    pol = np.asarray(pol, dtype=complex)
    if pol.shape == (2,):
        pol = np.broadcast_to(pol, (K, 2))
    if pol.shape != (K, 2):
        raise ValidationError("pol must be a 2-vector or one 2-vector per mode")
    psi = (np.sqrt(grid.weights) * amplitude)[:, None] * pol
    psi = psi.ravel()
    norm2 = float(np.vdot(psi, psi).real)
    if not norm2 > 0:
        raise ValidationError("wave packet has zero norm")
    return PhotonState(grid, np.outer(psi, psi.conj()) / norm2)


def mixed_state(parts) -> PhotonState:
    """Convex combination of ``(weight, state)`` pairs, renormalized to unit trace."""
    parts = list(parts)
    if not parts:
        raise ValidationError("mixture needs at least one part")
    grid = parts[0][1].grid
    total = 0.0
    rho = np.zeros_like(parts[0][1].rho)
    for weight, state in parts:
        if weight < 0:
            raise ValidationError("mixture weights must be non-negative")
        if not state.grid.same_modes(grid):
            raise ValidationError("mixture parts live on different grids")
        rho = rho + weight * state.rho
        total += weight
    if not total > 0:
        raise ValidationError("mixture weights sum to zero")
    trace = np.trace(rho).real
    if not trace > 0:
        raise ValidationError("mixture has zero trace")
    return PhotonState(grid, rho / trace)


@dataclass(frozen=True)
class Diagnostics:
    hermiticity_defect: float
    min_eigenvalue: float
    trace: float
    norm: float

    @property
    def hermitian(self) -> bool:
        return self.hermiticity_defect <= HERMITICITY_RTOL * max(self.norm, 1e-300)

    @property
    def positive(self) -> bool:
        return self.min_eigenvalue >= -PSD_RTOL * max(abs(self.trace), 1e-300)

    @property
    def normalized(self) -> bool:
        return abs(self.trace - 1.0) <= TRACE_TOL

    @property
    def physical(self) -> bool:
        return self.hermitian and self.positive

    def as_dict(self) -> dict:
        return {
            "hermiticity_defect": self.hermiticity_defect,
            "min_eigenvalue": self.min_eigenvalue,
            "trace": self.trace,
            "hermitian": self.hermitian,
            "positive": self.positive,
            "normalized": self.normalized,
        }


def matrix_diagnostics(m: np.ndarray) -> Diagnostics:
    m = np.asarray(m, dtype=complex)
    defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    herm = 0.5 * (m + m.conj().T)
    return Diagnostics(
        hermiticity_defect=defect,
        min_eigenvalue=float(np.linalg.eigvalsh(herm)[0]),
        trace=float(np.trace(m).real),
        norm=float(np.linalg.norm(m)),
    )


def validate(state: PhotonState) -> Diagnostics:
    """Hermiticity defect, smallest eigenvalue and trace of the state matrix."""
    return matrix_diagnostics(state.rho)


@dataclass(frozen=True, eq=False)
class StokesField:
    """Two-mode Stokes parameters S_mu(k_i, k_j), array shape (K, K, 4)."""

    grid: ModeGrid
    s: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        K = self.grid.size
        if s.shape != (K, K, 4):
            raise ValidationError(f"Stokes field must have shape {(K, K, 4)}")
        object.__setattr__(self, "s", _frozen(s))

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.s - self.s.transpose(1, 0, 2).conj())))

    def diagonal(self) -> np.ndarray:
        """Real single-mode Stokes 4-vectors, shape (K, 4)."""
        return np.einsum("iiu->iu", self.s).real.copy()

    def weighted_diagonal(self) -> np.ndarray:
        """Diagonal Stokes vectors of the weighted blocks, w_i * S(k_i, k_i).

        For a plane-wave state these are the ordinary Stokes parameters of
        its polarization density matrix.
        """
        return self.grid.weights[:, None] * self.diagonal()


def two_mode_stokes(state: PhotonState) -> StokesField:
    s = np.einsum("uab,ijba->iju", PAULI, state.kernel())
    return StokesField(state.grid, s)


def state_from_stokes(field: StokesField) -> PhotonState:
    """Expand each kernel block in the normalized Pauli basis.

    Stokes fields need not describe physical states; a
    :class:`NonPhysicalWarning` is emitted when the result fails the
    positivity check.
    """
    defect = field.symmetry_defect()
    scale = max(1.0, float(np.max(np.abs(field.s))))
    if defect > STOKES_SYMMETRY_TOL * scale:
        raise ValidationError(f"Stokes field violates conjugate symmetry by {defect:.3g}")
    kernel = np.einsum("iju,uab->ijab", field.s, PAULI)
    state = state_from_kernel(field.grid, kernel)
    diag = validate(state)
    if not diag.positive:
        warnings.warn(
            f"Stokes field gives a non-positive kernel (min eigenvalue {diag.min_eigenvalue:.3g})",
            NonPhysicalWarning,
            stacklevel=2,
        )
    return state


def stokes_to_iquv(s) -> np.ndarray:
    """Map Pauli-indexed Stokes components to classical (I, Q, U, V).

    I = sqrt2 s0, Q = sqrt2 s3, U = sqrt2 s1, V = sqrt2 s2.  Display only.
    """
    s = np.asarray(s)
    return SQRT2 * s[..., [0, 3, 1, 2]]


def iquv_to_stokes(iquv) -> np.ndarray:
    iquv = np.asarray(iquv)
    return iquv[..., [0, 2, 3, 1]] / SQRT2
