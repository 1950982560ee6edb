"""Acceptance criteria, each at its stated tolerance and runtime budget."""

import json
import time

import numpy as np
import pytest

from qpolar import oracle
from qpolar.cli import main
from qpolar.correlation import correlation_matrix, matrix_from_stokes, stokes_parameters, submatrix
from qpolar.grid import ModeGrid, frame_map, transverse_delta
from qpolar.sampling import random_ensemble, random_grid, random_state, random_vectors
from qpolar.scattering import (
    apply_ensemble,
    mueller_ensemble,
    pauli_depolarizer,
    polarizer,
    propagate_stokes,
    random_unitary_ensemble,
    reduce_single_mode,
    retarder,
    rotator,
)
from qpolar.state import state_from_stokes, two_mode_stokes, validate

SEED = 2024


def _rng(offset=0):
    return np.random.default_rng(SEED + offset)


def test_c1_frame_map(acceptance_log):
    rng = _rng(1)
    t0 = time.perf_counter()
    ks = random_vectors(rng, 1000)
    lam = frame_map(ModeGrid(ks, np.ones(len(ks)))).lam
    worst = 0.0
    for k, L in zip(ks, lam):
        worst = max(worst, np.max(np.abs(L.T @ L - np.eye(3))))
        worst = max(worst, np.max(np.abs(L[:, :2] @ L[:, :2].T - transverse_delta(k))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    acceptance_log(1, ok, f"frame map max dev {worst:.2e} (tol 1e-12), {elapsed:.3f}s (< 1s)")
    assert worst <= 1e-12
    assert elapsed < 1.0


def test_c2_povm_trace(acceptance_log):
    rng = _rng(2)
    t0 = time.perf_counter()
    worst_trace, worst_drop = 0.0, 0.0
    for _ in range(100):
        K = int(rng.integers(1, 5))
        g = random_grid(rng, K)
        st = random_state(rng, g)
        fm = frame_map(g)
        worst_trace = max(worst_trace, abs(correlation_matrix(st, fm).trace - 1.0))
        order = rng.permutation(K)
        prev = 0.0
        for n in range(1, K + 1):
            tr = correlation_matrix(st, fm, order[:n]).trace
            worst_drop = max(worst_drop, prev - tr)
            prev = tr
    elapsed = time.perf_counter() - t0
    ok = worst_trace <= 1e-10 and worst_drop <= 0.0 and elapsed < 5.0
    acceptance_log(2, ok, f"|tr J - 1| max {worst_trace:.2e} (tol 1e-10), max trace drop {worst_drop:.2e}, {elapsed:.3f}s (< 5s)")
    assert worst_trace <= 1e-10
    assert worst_drop <= 0.0
    assert elapsed < 5.0


def test_c3_stokes_round_trip(acceptance_log):
    rng = _rng(3)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        g = random_grid(rng, int(rng.integers(1, 5)), on_axis=True)
        st = random_state(rng, g)
        j3 = submatrix(correlation_matrix(st, frame_map(g)), 3)
        worst = max(worst, np.max(np.abs(matrix_from_stokes(stokes_parameters(j3).s) - j3)))
        worst = max(worst, np.max(np.abs(state_from_stokes(two_mode_stokes(st)).rho - st.rho)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    acceptance_log(3, ok, f"Stokes reconstruction/inversion max dev {worst:.2e} (tol 1e-12), {elapsed:.3f}s (< 1s)")
    assert worst <= 1e-12
    assert elapsed < 1.0


def test_c4_channel_stokes_commutation(acceptance_log):
    rng = _rng(4)
    kinds = ("general", "unitary", "kraus")
    t0 = time.perf_counter()
    worst = 0.0
    for t in range(100):
        g = random_grid(rng, int(rng.integers(1, 5)))
        st = random_state(rng, g)
        ens = random_ensemble(rng, g, int(rng.integers(1, 17)), kinds[t % 3])
        density = two_mode_stokes(apply_ensemble(ens, st)).s
        stokes = propagate_stokes(mueller_ensemble(ens), two_mode_stokes(st)).s
        worst = max(worst, np.max(np.abs(density - stokes)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 30.0
    acceptance_log(4, ok, f"Stokes-space vs density-space max dev {worst:.2e} (tol 1e-10), {elapsed:.3f}s (< 30s)")
    assert worst <= 1e-10
    assert elapsed < 30.0


def _classical_reference(classical, jones, *args):
    """Analytic classical matrix, re-indexed, cross-checked via the oracle's Jones traces."""
    expected = np.array(oracle.iquv_to_pauli(classical(*args)), dtype=float)
    traced = np.array(oracle.ensemble_mueller([1.0], [oracle.single_mode_op(jones(*args))], [1.0], (0, 0, 0, 0)))
    assert np.max(np.abs(traced - expected)) <= 1e-12
    return expected


def test_c5_classical_reduction(acceptance_log):
    rng = _rng(5)
    g = ModeGrid([[0, 0, 1.0], [0.3, 0.1, 1.0]], rng.uniform(0.2, 2.0, size=2))
    worst = 0.0
    cases = [(polarizer, oracle.classical_polarizer, oracle.jones_polarizer, (a,)) for a in (0.0, 0.4, np.pi / 4, 2.0)]
    cases += [(rotator, oracle.classical_rotator, oracle.jones_rotator, (a,)) for a in np.arange(12) * np.pi / 12]
    cases += [
        (retarder, oracle.classical_retarder, oracle.jones_retarder, (d, a))
        for d in (np.pi / 2, np.pi, 1.3)
        for a in (0.0, np.pi / 8, 0.9)
    ]
    for element, classical, jones, args in cases:
        expected = _classical_reference(classical, jones, *args)
        for mode in (0, 1):
            got = reduce_single_mode(mueller_ensemble(element(g, *args)), mode, mode)
            worst = max(worst, np.max(np.abs(got - expected)))
    depol = reduce_single_mode(mueller_ensemble(pauli_depolarizer(g)), 1, 1)
    depol_dev = np.max(np.abs(depol - np.diag([1, 0, 0, 0])))
    ok = worst <= 1e-10 and depol_dev <= 1e-12
    acceptance_log(
        5, ok, f"{len(cases)} element cases max dev {worst:.2e} (tol 1e-10); depolarizer dev {depol_dev:.2e} (tol 1e-12)"
    )
    assert worst <= 1e-10
    assert depol_dev <= 1e-12


def test_c6_physicality(acceptance_log):
    rng = _rng(6)
    kinds = ("general", "unitary", "kraus")
    worst_herm = worst_psd = worst_trace = 0.0
    flag_mismatch = 0
    for t in range(1000):
        g = random_grid(rng, int(rng.integers(1, 5)))
        st = random_state(rng, g)
        kind = kinds[t % 3]
        ens = random_ensemble(rng, g, int(rng.integers(1, 17)), kind)
        out = apply_ensemble(ens, st)
        d = validate(out)
        worst_herm = max(worst_herm, d.hermiticity_defect / d.norm)
        worst_psd = max(worst_psd, -d.min_eigenvalue / d.trace)
        delta = abs(d.trace - st.trace)
        if ens.trace_preserving:
            worst_trace = max(worst_trace, delta)
            flag_mismatch += kind == "general"
        else:
            flag_mismatch += kind != "general" or delta <= 1e-10
    ok = worst_herm <= 1e-12 and worst_psd <= 1e-10 and worst_trace <= 1e-10 and flag_mismatch == 0
    acceptance_log(
        6,
        ok,
        f"hermiticity {worst_herm:.2e}, -min eig/tr {worst_psd:.2e} (tol 1e-10), "
        f"Kraus trace dev {worst_trace:.2e} (tol 1e-10), flag mismatches {flag_mismatch}",
    )
    assert worst_herm <= 1e-12
    assert worst_psd <= 1e-10
    assert worst_trace <= 1e-10
    assert flag_mismatch == 0


def test_c7_monte_carlo_depolarization(acceptance_log):
    g = ModeGrid([[0, 0, 1.0]], [1.0])
    t0 = time.perf_counter()
    a = reduce_single_mode(mueller_ensemble(random_unitary_ensemble(g, 10_000, seed=SEED)), 0, 0)
    elapsed = time.perf_counter() - t0
    b = reduce_single_mode(mueller_ensemble(random_unitary_ensemble(g, 10_000, seed=SEED)), 0, 0)
    dev = np.max(np.abs(a - np.diag([1, 0, 0, 0])))
    deterministic = a.tobytes() == b.tobytes()
    ok = dev <= 0.05 and deterministic and elapsed < 60.0
    acceptance_log(7, ok, f"n=1e4 aligned block dev {dev:.3e} (tol 0.05), deterministic={deterministic}, {elapsed:.3f}s (< 60s)")
    assert dev <= 0.05
    assert deterministic
    assert elapsed < 60.0


def test_c8_oracle_subcommand(acceptance_log, tmp_path):
    out = tmp_path / "oracle.json"
    code = main(["oracle", "--trials", "100", "--seed", "0", "--out", str(out)])
    report = json.loads(out.read_text())
    failing = [c["name"] for c in report["checks"] if not c["passed"]]
    acceptance_log(8, code == 0, f"oracle suite: {len(report['checks'])} checks, failing {failing or 'none'}")
    assert code == 0
    assert report["passed"]
