"""Brute-force reference computations.

Everything here is written with explicit index loops over plain Python
numbers.  Nothing is imported from the fast modules: the Pauli matrices,
the polarization triad and the frame map are rebuilt from their
definitions so that an agreement between the two routes is meaningful.
Inputs may be numpy arrays; they are converted to nested lists first.
Intended for grids of at most ``MAX_MODES`` modes.
"""

from __future__ import annotations

import cmath
import math

MAX_MODES = 6

_R = 1 / math.sqrt(2)
SIGMA = [
    [[_R, 0], [0, _R]],
    [[0, _R], [_R, 0]],
    [[0, -1j * _R], [1j * _R, 0]],
    [[_R, 0], [0, -_R]],
]


def _lists(x):
    return x.tolist() if hasattr(x, "tolist") else [list(r) if isinstance(r, (list, tuple)) else r for r in x]


def _zeros(n, m):
    return [[0j for _ in range(m)] for _ in range(n)]


# -- geometry -----------------------------------------------------------------


def triad(k):
    """(eps1, eps2, eps3) from polar and azimuthal angles of k."""
    x, y, z = (float(v) for v in k)
    r = math.sqrt(x * x + y * y + z * z)
    if x == 0.0 and y == 0.0:
        s = 1.0 if z > 0 else -1.0
        return [1.0, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]
    theta = math.acos(max(-1.0, min(1.0, z / r)))
    phi = math.atan2(y, x)
    e1 = [math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)]
    e2 = [-math.sin(phi), math.cos(phi), 0.0]
    e3 = [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    return e1, e2, e3


def frame(k, basis):
    """Lambda[a][b] = e^(a) . eps^(b)(k), one dot product per entry."""
    eps = triad(k)
    basis = _lists(basis)
    lam = [[0.0] * 3 for _ in range(3)]
    for a in range(3):
        for b in range(3):
            acc = 0.0
            for i in range(3):
                acc += basis[a][i] * eps[b][i]
            lam[a][b] = acc
    return lam


def transverse_delta(k):
    k = [float(v) for v in k]
    n2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    return [[(1.0 if a == b else 0.0) - k[a] * k[b] / n2 for b in range(3)] for a in range(3)]


# -- states -------------------------------------------------------------------


def embed_3k(rho, modes):
    """Embed the 2K weighted state into 3K Cartesian components.

    Row (i, c) of the embedding carries eps^(l)_c(k_i) for polarization l,
    so the result is the density matrix over |k_i, c> states.
    """
    rho = _lists(rho)
    K = len(modes)
    eps = [triad(k) for k in modes]
    out = _zeros(3 * K, 3 * K)
    for i in range(K):
        for c in range(3):
            for j in range(K):
                for d in range(3):
                    acc = 0j
                    for l in range(2):
                        for m in range(2):
                            acc += eps[i][l][c] * rho[2 * i + l][2 * j + m] * eps[j][m][d]
                    out[3 * i + c][3 * j + d] = acc
    return out


def correlation(rho, modes, basis, detected):
    """3x3 matrix sum over detected i of <k_i, a| rho |k_i, b>, index order [a][b]."""
    basis = _lists(basis)
    dense = embed_3k(rho, modes)
    J = _zeros(3, 3)
    for i, on in enumerate(detected):
        if not on:
            continue
        for a in range(3):
            for b in range(3):
                acc = 0j
                for c in range(3):
                    for d in range(3):
                        acc += basis[a][c] * dense[3 * i + c][3 * i + d] * basis[b][d]
                J[a][b] += acc
    return J


def stokes_field(rho, weights):
    """S[i][j][mu] = Tr(sigma_mu rho(k_i, k_j)) in continuum units."""
    rho = _lists(rho)
    K = len(weights)
    S = [[[0j] * 4 for _ in range(K)] for _ in range(K)]
    for i in range(K):
        for j in range(K):
            scale = math.sqrt(weights[i] * weights[j])
            for mu in range(4):
                acc = 0j
                for a in range(2):
                    for b in range(2):
                        acc += SIGMA[mu][a][b] * rho[2 * i + b][2 * j + a]
                S[i][j][mu] = acc / scale
    return S


def state_from_stokes(S, weights):
    K = len(weights)
    rho = _zeros(2 * K, 2 * K)
    for i in range(K):
        for j in range(K):
            scale = math.sqrt(weights[i] * weights[j])
            for a in range(2):
                for b in range(2):
                    acc = 0j
                    for mu in range(4):
                        acc += S[i][j][mu] * SIGMA[mu][a][b]
                    rho[2 * i + a][2 * j + b] = acc * scale
    return rho


def stokes_2x2(m):
    return [sum(SIGMA[mu][a][b] * m[b][a] for a in range(2) for b in range(2)) for mu in range(4)]


# -- scattering ---------------------------------------------------------------


def _matmul(A, B):
    n, p, m = len(A), len(B), len(B[0])
    out = _zeros(n, m)
    for i in range(n):
        for j in range(m):
            acc = 0j
            for k in range(p):
                acc += A[i][k] * B[k][j]
            out[i][j] = acc
    return out


def _dagger(A):
    return [[complex(A[j][i]).conjugate() for j in range(len(A))] for i in range(len(A[0]))]


def channel(probs, ops, rho):
    """sum_A p_A T_A rho T_A^dagger by naive triple loops."""
    rho = _lists(rho)
    n = len(rho)
    out = _zeros(n, n)
    for p, T in zip(_lists(probs), _lists(ops)):
        term = _matmul(_matmul(T, rho), _dagger(T))
        for i in range(n):
            for j in range(n):
                out[i][j] += p * term[i][j]
    return out


def kernel_block(T, weights, i, l):
    T = _lists(T)
    scale = math.sqrt(weights[i] * weights[l])
    return [[T[2 * i + a][2 * l + b] / scale for b in range(2)] for a in range(2)]


def mueller(T, weights, pair):
    """m[mu][nu] = Tr(sigma_mu T(q_i,k_l) sigma_nu T(q_j,k_m)^dagger), traced by hand."""
    weights = _lists(weights)
    i, j, l, m = pair
    A = kernel_block(T, weights, i, l)
    B = kernel_block(T, weights, j, m)
    out = [[0j] * 4 for _ in range(4)]
    for mu in range(4):
        for nu in range(4):
            acc = 0j
            for a in range(2):
                for b in range(2):
                    for c in range(2):
                        for d in range(2):
                            acc += SIGMA[mu][a][b] * A[b][c] * SIGMA[nu][c][d] * B[a][d].conjugate()
            out[mu][nu] = acc
    return out


def ensemble_mueller(probs, ops, weights, pair):
    total = [[0j] * 4 for _ in range(4)]
    for p, T in zip(_lists(probs), _lists(ops)):
        m = mueller(T, weights, pair)
        for mu in range(4):
            for nu in range(4):
                total[mu][nu] += p * m[mu][nu]
    return total


# -- classical Mueller matrices in (I, Q, U, V) ---------------------------------


def _mm(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def classical_rotator(angle):
    c, s = math.cos(2 * angle), math.sin(2 * angle)
    return [[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]]


def classical_polarizer(angle):
    p0 = [[0.5, 0.5, 0, 0], [0.5, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    return _mm(_mm(classical_rotator(angle), p0), classical_rotator(-angle))


def classical_retarder(phase, angle):
    c, s = math.cos(phase), math.sin(phase)
    r0 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, c, -s], [0, 0, s, c]]
    return _mm(_mm(classical_rotator(angle), r0), classical_rotator(-angle))


def classical_depolarizer():
    return [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]


# Pauli index mu <- classical index: s0 = I, s1 = U, s2 = V, s3 = Q.
_IQUV_OF_PAULI = [0, 2, 3, 1]


def iquv_to_pauli(M):
    """Re-index a classical Mueller matrix into the Pauli component order."""
    return [[M[_IQUV_OF_PAULI[mu]][_IQUV_OF_PAULI[nu]] for nu in range(4)] for mu in range(4)]


# -- jones matrices for the classical checks ----------------------------------


def jones_rotator(angle):
    c, s = math.cos(angle), math.sin(angle)
    return [[c, -s], [s, c]]


def jones_polarizer(angle):
    c, s = math.cos(angle), math.sin(angle)
    return [[c * c, c * s], [s * c, s * s]]


def jones_retarder(phase, angle):
    r = jones_rotator(angle)
    rt = jones_rotator(-angle)
    d = [[1, 0], [0, cmath.exp(1j * phase)]]
    return [[sum(r[a][b] * d[b][c] * rt[c][e] for b in range(2) for c in range(2)) for e in range(2)] for a in range(2)]


def single_mode_op(jones):
    """A 1-mode, unit-weight operator is just the Jones matrix."""
    return [[complex(v) for v in row] for row in jones]


PAULI_JONES = [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]]
