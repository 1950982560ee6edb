"""Scattering ensembles, their action on states, and density Mueller matrices.

An ensemble is a list of probabilities ``p_A`` and operators ``T_A``, each a
2K x 2K matrix in the same weighted basis as the states, so that
``rho_out = sum_A p_A T_A rho T_A^dagger``.  In continuum units the block
between output mode q_i and input mode k_l is
``T_A(q_i, k_l) = T_A[(i,.),(l,.)] / sqrt(w_i w_l)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

from qpolar.errors import InconsistencyError, ValidationError
from qpolar.grid import ModeGrid
from qpolar.state import PAULI, PhotonState, StokesField

PROB_TOL = 1e-12
TRACE_PRESERVING_TOL = 1e-10
REALITY_TOL = 1e-9

PAULI_UNNORMALIZED = PAULI * np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class ScatteringEnsemble:
    grid: ModeGrid
    probs: np.ndarray
    ops: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).ravel()
        ops = np.asarray(self.ops, dtype=complex)
        n = 2 * self.grid.size
        if ops.ndim == 2:
            ops = ops[None]
        if len(probs) == 0:
            raise ValidationError("empty ensemble")
        if ops.shape != (len(probs), n, n):
            raise ValidationError(f"ensemble operators must have shape {(len(probs), n, n)}, got {ops.shape}")
        if np.any(probs < 0):
            raise ValidationError("ensemble probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValidationError(f"ensemble probabilities sum to {probs.sum()!r}, not 1")
        probs.setflags(write=False)
        ops.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "ops", ops)

    def __len__(self) -> int:
        return len(self.probs)

    def completeness_defect(self) -> float:
        """max |sum_A p_A T_A^dagger T_A - 1|."""
        s = np.einsum("a,aji,ajk->ik", self.probs, self.ops.conj(), self.ops)
        return float(np.max(np.abs(s - np.eye(s.shape[0]))))

    @property
    def trace_preserving(self) -> bool:
        return self.completeness_defect() <= TRACE_PRESERVING_TOL

    def kernel_ops(self) -> np.ndarray:
        """Continuum-unit blocks T_A(q_i, k_l), shape (n, K, K, 2, 2)."""
        K = self.grid.size
        sw = np.sqrt(self.grid.weights)
        blocks = self.ops.reshape(len(self), K, 2, K, 2).transpose(0, 1, 3, 2, 4)
        return blocks / np.outer(sw, sw)[None, :, :, None, None]

    def with_phases(self, phases) -> "ScatteringEnsemble":
        phases = np.exp(1j * np.asarray(phases, dtype=float))
        return ScatteringEnsemble(self.grid, self.probs, phases[:, None, None] * self.ops)


def apply_ensemble(ens: ScatteringEnsemble, state: PhotonState) -> PhotonState:
    if not ens.grid.same_modes(state.grid):
        raise ValidationError("ensemble and state live on different grids")
    rho = np.einsum("a,aij,jk,alk->il", ens.probs, ens.ops, state.rho, ens.ops.conj(), optimize=True)
    return PhotonState(state.grid, rho)


def compose(*ensembles: ScatteringEnsemble) -> ScatteringEnsemble:
    """Ensemble for passing through ``ensembles`` in order (first applied first)."""
    if not ensembles:
        raise ValidationError("nothing to compose")
    out = ensembles[0]
    for nxt in ensembles[1:]:
        if not nxt.grid.same_modes(out.grid):
            raise ValidationError("cannot compose ensembles on different grids")
        probs = np.outer(nxt.probs, out.probs).ravel()
        ops = np.einsum("aij,bjk->abik", nxt.ops, out.ops).reshape(len(probs), *out.ops.shape[1:])
        out = ScatteringEnsemble(out.grid, probs / probs.sum(), ops)
    return out


# -- Mueller matrices ---------------------------------------------------------


def _check_pair(grid: ModeGrid, pair: Sequence[int]) -> tuple[int, int, int, int]:
    if len(pair) != 4:
        raise ValidationError("pair-of-pairs needs four mode indices (q_i, q_j, k_l, k_m)")
    K = grid.size
    out = tuple(int(x) for x in pair)
    if any(not 0 <= x < K for x in out):
        raise ValidationError(f"mode indices {out} out of range for {K} modes")
    return out  # type: ignore[return-value]


def _mueller_from_blocks(probs, left, right) -> np.ndarray:
    """sum_A p_A Tr(s_u L_A s_v R_A^dagger) for stacks of 2x2 blocks."""
    return np.einsum("a,uxb,abc,vcd,axd->uv", probs, PAULI, left, PAULI, right.conj(), optimize=True)


def mueller_single(T, grid: ModeGrid, pair: Sequence[int]) -> np.ndarray:
    """Four-mode density Mueller matrix of one operator.

    ``T`` is a weighted-basis 2K x 2K matrix; ``pair`` is (q_i, q_j, k_l, k_m)
    and the result is m_uv = Tr(s_u T(q_i, k_l) s_v T(q_j, k_m)^dagger) in
    continuum units.
    """
    ens = ScatteringEnsemble(grid, [1.0], np.asarray(T)[None])
    return MuellerTensor(ens).block(pair)


class MuellerTensor:
    """Ensemble-averaged four-mode density Mueller matrix M_uv(q_i, q_j; k_l, k_m).

    Blocks are evaluated on request; :meth:`full` materializes all K^4
    blocks, which is only sensible for small grids.
    """

    def __init__(self, ens: ScatteringEnsemble):
        self.ensemble = ens
        self.grid = ens.grid
        self._kernel = ens.kernel_ops()
        self._full: np.ndarray | None = None

    def block(self, pair: Sequence[int]) -> np.ndarray:
        i, j, l, m = _check_pair(self.grid, pair)
        if self._full is not None:
            return self._full[i, j, l, m].copy()
        t = self._kernel
        return _mueller_from_blocks(self.ensemble.probs, t[:, i, l], t[:, j, m])

    def blocks(self, pairs: Iterable[Sequence[int]]) -> dict[tuple[int, int, int, int], np.ndarray]:
        return {_check_pair(self.grid, p): self.block(p) for p in pairs}

    def full(self) -> np.ndarray:
        """All blocks, shape (K, K, K, K, 4, 4) indexed [i, j, l, m, u, v]."""
        if self._full is None:
            t = self._kernel
            left = np.einsum("uxb,ailbc->ailuxc", PAULI, t)
            right = np.einsum("vcd,ajmxd->ajmvcx", PAULI, t.conj())
            self._full = np.einsum(
                "a,ailuxc,ajmvcx->ijlmuv", self.ensemble.probs, left, right, optimize=True
            )
            self._full.setflags(write=False)
        return self._full


def mueller_ensemble(ens: ScatteringEnsemble) -> MuellerTensor:
    return MuellerTensor(ens)


def propagate_stokes(M: MuellerTensor, field: StokesField) -> StokesField:
    """S_out(q_i, q_j) = sum_{l,m} w_l w_m M(q_i, q_j; k_l, k_m) S_in(k_l, k_m)."""
    if not M.grid.same_modes(field.grid):
        raise ValidationError("Mueller tensor and Stokes field live on different grids")
    w = M.grid.weights
    s_out = np.einsum("l,m,ijlmuv,lmv->iju", w, w, M.full(), field.s, optimize=True)
    return StokesField(field.grid, s_out)


def reduce_single_mode(M: MuellerTensor, in_mode: int, out_mode: int) -> np.ndarray:
    """Classical 4x4 Mueller matrix between a single input and output mode.

    The two weights of the discretized delta functions are folded in, so
    ``s_out = R @ s_in`` relates the Stokes vectors of the weighted 2x2
    blocks directly.
    """
    q, k = int(out_mode), int(in_mode)
    w = M.grid.weights
    block = w[q] * w[k] * M.block((q, q, k, k))
    scale = max(1.0, float(np.max(np.abs(block))))
    imag = float(np.max(np.abs(block.imag)))
    if imag > REALITY_TOL * scale:
        raise InconsistencyError(f"aligned Mueller block has imaginary part {imag:.3g}")
    return block.real.copy()


# -- element constructors -----------------------------------------------------


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise ValidationError(f"{name} must be finite")
    return value


def rotation_jones(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def polarizer_jones(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)


def retarder_jones(phase: float, angle: float) -> np.ndarray:
    r = rotation_jones(angle)
    return r @ np.diag([1.0, np.exp(1j * phase)]) @ r.T


def per_mode(grid: ModeGrid, jones) -> np.ndarray:
    """Weighted-basis operator applying the same Jones matrix on every mode."""
    jones = np.asarray(jones, dtype=complex)
    if jones.shape != (2, 2):
        raise ValidationError("Jones matrix must be 2x2")
    return np.kron(np.eye(grid.size), jones)


def jones_element(grid: ModeGrid, matrix) -> ScatteringEnsemble:
    return ScatteringEnsemble(grid, [1.0], per_mode(grid, matrix))


def identity(grid: ModeGrid) -> ScatteringEnsemble:
    return jones_element(grid, np.eye(2))


def polarizer(grid: ModeGrid, angle: float = 0.0) -> ScatteringEnsemble:
    """Ideal linear polarizer with transmission axis at ``angle`` from eps1."""
    return jones_element(grid, polarizer_jones(_finite("angle", angle)))


def retarder(grid: ModeGrid, phase: float, angle: float = 0.0) -> ScatteringEnsemble:
    """Linear retarder adding ``phase`` to the component orthogonal to the axis at ``angle``."""
    return jones_element(grid, retarder_jones(_finite("phase", phase), _finite("angle", angle)))


def rotator(grid: ModeGrid, angle: float) -> ScatteringEnsemble:
    return jones_element(grid, rotation_jones(_finite("angle", angle)))


def pauli_depolarizer(grid: ModeGrid) -> ScatteringEnsemble:
    ops = np.stack([per_mode(grid, s) for s in PAULI_UNNORMALIZED])
    return ScatteringEnsemble(grid, np.full(4, 0.25), ops)


def haar_unitaries(n: int, seed) -> np.ndarray:
    """``n`` Haar-random 2x2 unitaries from a seeded generator, shape (n, 2, 2)."""
    rng = np.random.default_rng(seed)
    u = unitary_group.rvs(2, size=n, random_state=rng)
    return np.asarray(u).reshape(n, 2, 2)


def random_unitary_ensemble(grid: ModeGrid, n: int, seed=0) -> ScatteringEnsemble:
    """Equal-weight ensemble of ``n`` Haar-random Jones matrices, same on every mode."""
    n = int(n)
    if n < 1:
        raise ValidationError("random_unitary_ensemble needs n >= 1")
    K = grid.size
    u = haar_unitaries(n, seed)
    ops = np.einsum("ij,axy->aixjy", np.eye(K), u).reshape(n, 2 * K, 2 * K)
    return ScatteringEnsemble(grid, np.full(n, 1.0 / n), ops)


def mode_coupler(grid: ModeGrid, mixing, jones=None) -> ScatteringEnsemble:
    """Single operator with block (i, l) equal to ``mixing[i, l] @ jones[l]``.

    ``jones`` is one 2x2 matrix for all modes or one per mode (default identity).
    """
    K = grid.size
    mixing = np.asarray(mixing, dtype=complex)
    if mixing.shape != (K, K):
        raise ValidationError(f"mixing matrix must be {K}x{K}")
    if jones is None:
        jones = np.eye(2)
    jones = np.asarray(jones, dtype=complex)
    if jones.shape == (2, 2):
        jones = np.broadcast_to(jones, (K, 2, 2))
    if jones.shape != (K, 2, 2):
        raise ValidationError("jones must be 2x2 or one 2x2 per mode")
    op = np.einsum("il,lxy->ixly", mixing, jones).reshape(2 * K, 2 * K)
    return ScatteringEnsemble(grid, [1.0], op)


def raw_ensemble(grid: ModeGrid, probs, ops) -> ScatteringEnsemble:
    return ScatteringEnsemble(grid, probs, ops)


ELEMENTS = {
    "identity": (identity, {}),
    "polarizer": (polarizer, {"angle": "transmission axis angle from eps1 [rad], default 0"}),
    "retarder": (retarder, {"phase": "retardance [rad]", "angle": "fast axis angle [rad], default 0"}),
    "rotator": (rotator, {"angle": "rotation angle [rad]"}),
    "pauli_depolarizer": (pauli_depolarizer, {}),
    "random_unitary": (random_unitary_ensemble, {"n": "number of Haar samples", "seed": "generator seed"}),
    "mode_coupler": (
        mode_coupler,
        {"mixing": "KxK complex matrix", "jones": "2x2 complex, default identity", "jones_per_mode": "Kx2x2 complex"},
    ),
    "jones": (jones_element, {"matrix": "2x2 complex Jones matrix applied on every mode"}),
    "raw": (raw_ensemble, {"realizations": "list of {p, matrix}; matrix is 2Kx2K in the weighted basis"}),
}
