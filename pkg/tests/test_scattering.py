import numpy as np
import pytest

from qpolar import oracle
from qpolar.errors import ValidationError
from qpolar.grid import ModeGrid
from qpolar.sampling import random_complex, random_ensemble, random_grid, random_state
from qpolar.scattering import (
    PAULI_UNNORMALIZED,
    ScatteringEnsemble,
    apply_ensemble,
    compose,
    identity,
    mode_coupler,
    mueller_ensemble,
    mueller_single,
    pauli_depolarizer,
    polarizer,
    propagate_stokes,
    random_unitary_ensemble,
    reduce_single_mode,
    retarder,
    rotation_jones,
    rotator,
)
from qpolar.state import PhotonState, plane_wave_state, two_mode_stokes, validate

POLARIZER_M = np.zeros((4, 4))
POLARIZER_M[np.ix_([0, 3], [0, 3])] = 0.5


def test_identity_leaves_state(rng):
    g = random_grid(rng, 3)
    st = random_state(rng, g)
    np.testing.assert_allclose(apply_ensemble(identity(g), st).rho, st.rho, atol=1e-15)


def test_polarizer_on_circular(zgrid):
    st = plane_wave_state(zgrid, 0, [1, 1j])
    out = apply_ensemble(polarizer(zgrid), st)
    np.testing.assert_allclose(out.rho, np.diag([0.5, 0]), atol=1e-15)
    assert out.trace == pytest.approx(0.5)
    np.testing.assert_allclose(out.rho, oracle.channel([1.0], polarizer(zgrid).ops, st.rho), atol=1e-15)


def test_pauli_twirl_identity(rng):
    # sum_A s_A X s_A = 2 Tr(X) I, checked by brute force on random matrices
    for _ in range(10):
        x = random_complex(rng, 2, 2)
        total = sum(np.array(oracle._matmul(oracle._matmul(p, x.tolist()), p)) for p in oracle.PAULI_JONES)
        np.testing.assert_allclose(total, 2 * np.trace(x) * np.eye(2), atol=1e-13)


def test_depolarizer_on_single_mode(rng, zgrid):
    st = random_state(rng, zgrid).scaled(0.8)
    out = apply_ensemble(pauli_depolarizer(zgrid), st)
    np.testing.assert_allclose(out.rho, 0.8 * np.eye(2) / 2, atol=1e-15)


def test_channel_matches_oracle(rng):
    for _ in range(20):
        g = random_grid(rng, int(rng.integers(1, 5)))
        st = random_state(rng, g)
        ens = random_ensemble(rng, g, int(rng.integers(1, 6)))
        np.testing.assert_allclose(apply_ensemble(ens, st).rho, oracle.channel(ens.probs, ens.ops, st.rho), atol=1e-13)


def test_ensemble_validation(zgrid):
    with pytest.raises(ValidationError):
        ScatteringEnsemble(zgrid, [], np.zeros((0, 2, 2)))
    with pytest.raises(ValidationError):
        ScatteringEnsemble(zgrid, [0.5], np.eye(2)[None])
    with pytest.raises(ValidationError):
        ScatteringEnsemble(zgrid, [1.5, -0.5], np.stack([np.eye(2)] * 2))
    with pytest.raises(ValidationError):
        ScatteringEnsemble(zgrid, [1.0], np.eye(4)[None])


def test_apply_grid_mismatch(zgrid, xyz_grid):
    with pytest.raises(ValidationError):
        apply_ensemble(identity(xyz_grid), plane_wave_state(zgrid, 0, [1, 0]))


def test_trace_preserving_flag(rng, zgrid):
    g = random_grid(rng, 2)
    assert identity(g).trace_preserving
    assert rotator(g, 0.3).trace_preserving
    assert retarder(g, 1.0, 0.2).trace_preserving
    assert pauli_depolarizer(g).trace_preserving
    assert random_unitary_ensemble(g, 5, seed=1).trace_preserving
    assert random_ensemble(rng, g, 4, "kraus").trace_preserving
    assert not polarizer(g).trace_preserving
    assert not random_ensemble(rng, g, 4, "general").trace_preserving


def test_mueller_identity(rng):
    g = random_grid(rng, 2)
    m = mueller_single(np.eye(4), ModeGrid(g.modes, [1.0, 1.0]), (1, 1, 1, 1))
    np.testing.assert_allclose(m, np.eye(4), atol=1e-15)


def test_mueller_identity_weighted():
    g = ModeGrid([[0, 0, 1], [1, 0, 0]], [0.5, 2.0])
    # identity kernel is delta/w, so the aligned block is I/w^2
    np.testing.assert_allclose(mueller_single(np.eye(4), g, (1, 1, 1, 1)), np.eye(4) / 4, atol=1e-15)
    np.testing.assert_allclose(mueller_single(np.eye(4), g, (0, 1, 0, 1)), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(mueller_single(np.eye(4), g, (0, 1, 1, 0)), 0, atol=1e-15)


def test_mueller_polarizer(zgrid):
    T = polarizer(zgrid).ops[0]
    np.testing.assert_allclose(np.array(oracle.mueller(T, [1.0], (0, 0, 0, 0))), POLARIZER_M, atol=1e-15)
    np.testing.assert_allclose(mueller_single(T, zgrid, (0, 0, 0, 0)), POLARIZER_M, atol=1e-15)


def test_mueller_global_phase(rng, zgrid):
    m = mueller_single(np.exp(1j * 0.73) * np.eye(2), zgrid, (0, 0, 0, 0))
    np.testing.assert_allclose(m, np.eye(4), atol=1e-15)


def test_mueller_matches_oracle(rng):
    for _ in range(30):
        g = random_grid(rng, int(rng.integers(1, 4)))
        T = random_complex(rng, 2 * g.size, 2 * g.size)
        pair = tuple(int(x) for x in rng.integers(0, g.size, 4))
        np.testing.assert_allclose(mueller_single(T, g, pair), oracle.mueller(T, g.weights.tolist(), pair), atol=1e-12)


def test_mueller_bad_pair(zgrid):
    with pytest.raises(ValidationError):
        mueller_single(np.eye(2), zgrid, (0, 0, 0, 1))
    with pytest.raises(ValidationError):
        mueller_single(np.eye(2), zgrid, (0, 0, 0))


def test_mueller_ensemble_singleton(rng):
    g = random_grid(rng, 2)
    ens = random_ensemble(rng, g, 1)
    full = mueller_ensemble(ens).full()
    for pair in np.ndindex(2, 2, 2, 2):
        np.testing.assert_allclose(full[pair], mueller_single(ens.ops[0], g, pair), atol=1e-13)


def test_mueller_ensemble_convexity(rng):
    g = random_grid(rng, 2)
    ens = random_ensemble(rng, g, 5)
    pair = (0, 1, 1, 0)
    avg = sum(p * mueller_single(T, g, pair) for p, T in zip(ens.probs, ens.ops))
    np.testing.assert_allclose(mueller_ensemble(ens).block(pair), avg, atol=1e-12)


def test_lazy_block_equals_full(rng):
    g = random_grid(rng, 3)
    ens = random_ensemble(rng, g, 3)
    lazy = mueller_ensemble(ens)
    blocks = {p: lazy.block(p) for p in [(0, 1, 2, 0), (2, 2, 1, 1)]}
    full = mueller_ensemble(ens).full()
    for p, b in blocks.items():
        np.testing.assert_allclose(full[p], b, atol=1e-13)


def test_depolarizer_mueller(zgrid):
    M = mueller_ensemble(pauli_depolarizer(zgrid)).block((0, 0, 0, 0))
    np.testing.assert_allclose(M, np.diag([1, 0, 0, 0]), atol=1e-15)


def test_aligned_blocks_real(rng):
    g = random_grid(rng, 3)
    full = mueller_ensemble(random_ensemble(rng, g, 4)).full()
    for q in range(3):
        for k in range(3):
            assert np.max(np.abs(full[q, q, k, k].imag)) <= 1e-12 * max(1, np.abs(full[q, q, k, k]).max())


def test_propagate_identity(rng):
    g = random_grid(rng, 3)
    f = two_mode_stokes(random_state(rng, g))
    np.testing.assert_allclose(propagate_stokes(mueller_ensemble(identity(g)), f).s, f.s, atol=1e-13)


def test_propagate_single_mode_random(rng, zgrid):
    st = random_state(rng, zgrid)
    ens = random_ensemble(rng, zgrid, 2)
    lhs = propagate_stokes(mueller_ensemble(ens), two_mode_stokes(st)).s
    rhs = two_mode_stokes(apply_ensemble(ens, st)).s
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_propagate_mode_coupling(rng):
    g = random_grid(rng, 3)
    st = random_state(rng, g)
    U = np.linalg.qr(random_complex(rng, 3, 3))[0]
    ens = mode_coupler(g, U, [rotation_jones(a) for a in (0.1, 0.5, 1.3)])
    assert ens.trace_preserving
    lhs = propagate_stokes(mueller_ensemble(ens), two_mode_stokes(st)).s
    rhs = two_mode_stokes(apply_ensemble(ens, st)).s
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)
    rhs_oracle = oracle.stokes_field(oracle.channel(ens.probs, ens.ops, st.rho), g.weights.tolist())
    np.testing.assert_allclose(lhs, rhs_oracle, atol=1e-10)


def test_reduce_identity(rng):
    g = random_grid(rng, 2)
    np.testing.assert_allclose(reduce_single_mode(mueller_ensemble(identity(g)), 1, 1), np.eye(4), atol=1e-14)


def test_reduce_polarizer_matches_classical(rng):
    g = random_grid(rng, 2)
    R = reduce_single_mode(mueller_ensemble(polarizer(g)), 0, 0)
    np.testing.assert_allclose(R, POLARIZER_M, atol=1e-14)
    classical = np.array(oracle.iquv_to_pauli(oracle.classical_polarizer(0.0)))
    np.testing.assert_allclose(R, classical, atol=1e-14)


@pytest.mark.parametrize("phi", np.linspace(-np.pi, np.pi, 13))
def test_reduce_rotator(phi, zgrid):
    R = reduce_single_mode(mueller_ensemble(rotator(zgrid, phi)), 0, 0)
    # brute force: conjugate each basis matrix and read its Stokes vector
    J = rotation_jones(phi)
    direct = np.zeros((4, 4))
    for nu, sig in enumerate(oracle.SIGMA):
        out = J @ np.array(sig) @ J.conj().T
        direct[:, nu] = np.real(oracle.stokes_2x2(out.tolist()))
    np.testing.assert_allclose(R, direct, atol=1e-14)
    # s0 and the circular component s2 are untouched; (s3, s1) turn by 2 phi
    c, s = np.cos(2 * phi), np.sin(2 * phi)
    np.testing.assert_allclose(R[np.ix_([0, 2], [0, 2])], np.eye(2), atol=1e-14)
    np.testing.assert_allclose(R[np.ix_([3, 1], [3, 1])], [[c, -s], [s, c]], atol=1e-14)


def test_reduce_matches_propagate(rng):
    g = random_grid(rng, 3)
    ens = random_ensemble(rng, g, 4)
    M = mueller_ensemble(ens)
    for k in range(3):
        st = plane_wave_state(g, k, random_complex(rng, 2))
        s_in = two_mode_stokes(st).weighted_diagonal()[k]
        s_out = propagate_stokes(M, two_mode_stokes(st)).weighted_diagonal()
        for q in range(3):
            np.testing.assert_allclose(reduce_single_mode(M, k, q) @ s_in, s_out[q], atol=1e-12)


def test_retarder_zero_is_identity(rng):
    g = random_grid(rng, 2)
    np.testing.assert_allclose(retarder(g, 0.0, 0.4).ops, identity(g).ops, atol=1e-15)


def test_rotator_inverse(rng):
    g = random_grid(rng, 2)
    both = compose(rotator(g, 0.37), rotator(g, -0.37))
    np.testing.assert_allclose(both.ops[0], np.eye(4), atol=1e-12)


def test_compose_order(zgrid):
    # polarizer at 0 then rotate by pi/2: light ends up along y
    ens = compose(polarizer(zgrid, 0.0), rotator(zgrid, np.pi / 2))
    out = apply_ensemble(ens, plane_wave_state(zgrid, 0, [1, 0]))
    np.testing.assert_allclose(out.rho, np.diag([0, 1]), atol=1e-15)


def test_global_phase_invariance(rng):
    g = random_grid(rng, 2)
    st = random_state(rng, g)
    ens = random_ensemble(rng, g, 3)
    shifted = ens.with_phases(rng.uniform(0, 2 * np.pi, 3))
    np.testing.assert_allclose(apply_ensemble(shifted, st).rho, apply_ensemble(ens, st).rho, atol=1e-12)
    np.testing.assert_allclose(mueller_ensemble(shifted).full(), mueller_ensemble(ens).full(), atol=1e-12)


def test_random_unitary_seeded(zgrid):
    a = random_unitary_ensemble(zgrid, 20, seed=7)
    b = random_unitary_ensemble(zgrid, 20, seed=7)
    c = random_unitary_ensemble(zgrid, 20, seed=8)
    assert a.ops.tobytes() == b.ops.tobytes()
    assert a.ops.tobytes() != c.ops.tobytes()
    assert random_unitary_ensemble(zgrid, 1, seed=0).ops.shape == (1, 2, 2)


def test_random_unitary_converges(zgrid):
    target = np.diag([1, 0, 0, 0])
    errs = []
    for n in (100, 2500):
        M = reduce_single_mode(mueller_ensemble(random_unitary_ensemble(zgrid, n, seed=3)), 0, 0)
        errs.append(np.max(np.abs(M - target)))
    assert errs[1] < errs[0]
    assert errs[1] < 0.1


def test_constructor_errors(zgrid):
    with pytest.raises(ValidationError):
        random_unitary_ensemble(zgrid, 0)
    with pytest.raises(ValidationError):
        polarizer(zgrid, np.nan)
    with pytest.raises(ValidationError):
        mode_coupler(zgrid, np.eye(2))


def test_unnormalized_output_is_physical(rng):
    g = random_grid(rng, 3)
    out = apply_ensemble(random_ensemble(rng, g, 5, "general"), random_state(rng, g))
    d = validate(out)
    assert d.positive and d.hermitian
    assert isinstance(out, PhotonState)


def test_pauli_constants():
    np.testing.assert_allclose(PAULI_UNNORMALIZED[2], [[0, -1j], [1j, 0]])
