"""Cross-checks of the fast numerical paths against the brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qpolar import oracle
from qpolar.config import Tolerances
from qpolar.correlation import correlation_matrix, matrix_from_stokes, stokes_parameters, submatrix
from qpolar.grid import ModeGrid, frame_map, rotated_basis, transverse_delta
from qpolar.sampling import random_ensemble, random_grid, random_rotation, random_state, random_vectors
from qpolar.scattering import (
    apply_ensemble,
    mueller_ensemble,
    mueller_single,
    pauli_depolarizer,
    polarizer,
    propagate_stokes,
    reduce_single_mode,
    retarder,
    rotator,
)
from qpolar.state import PhotonState, state_from_stokes, two_mode_stokes

ROTATOR_SWEEP = np.arange(12) * np.pi / 12
POLARIZER_ANGLES = np.arange(6) * np.pi / 6
RETARDER_CASES = [(d, a) for d in (np.pi / 2, np.pi, 0.7) for a in (0.0, np.pi / 8, np.pi / 4, 1.1)]


@dataclass
class CheckResult:
    name: str
    tolerance: float
    trials: int = 0
    max_deviation: float = 0.0
    worst_trial: int | None = None

    def record(self, trial: int, deviation: float) -> None:
        self.trials += 1
        deviation = float(deviation)
        if np.isnan(deviation):
            deviation = np.inf
        if self.worst_trial is None or deviation > self.max_deviation:
            self.max_deviation = deviation
            self.worst_trial = trial

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "max_deviation": self.max_deviation,
            "worst_trial": self.worst_trial,
        }


@dataclass
class Report:
    seed: int
    trials: int
    tolerances: Tolerances
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def worst(self) -> CheckResult | None:
        failing = [c for c in self.checks if not c.passed]
        if not failing:
            return None
        return max(failing, key=lambda c: c.max_deviation / c.tolerance if c.tolerance > 0 else np.inf)

    def as_dict(self) -> dict:
        worst = self.worst()
        return {
            "passed": self.passed,
            "seed": self.seed,
            "trials": self.trials,
            "tolerances": self.tolerances.as_dict(),
            "checks": [c.as_dict() for c in self.checks],
            "worst_offender": worst.as_dict() if worst else None,
        }


def _dev(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex))))


def _rand_K(rng, max_modes: int) -> int:
    return int(rng.integers(1, max_modes + 1))


def check_frames(rng, trials: int, tol: Tolerances) -> list[CheckResult]:
    orth = CheckResult("frame.orthogonality", tol.frame)
    trans = CheckResult("frame.transverse_delta", tol.frame)
    agree = CheckResult("frame.oracle_agreement", tol.frame)
    for t in range(trials):
        ks = random_vectors(rng, 10)
        basis = rotated_basis(random_rotation(rng)) if t % 2 else np.eye(3)
        fm = frame_map(ModeGrid(ks, np.ones(len(ks))), basis)
        for k, lam in zip(ks, fm.lam):
            orth.record(t, _dev(lam.T @ lam, np.eye(3)))
            lt = lam[:, :2]
            # the transverse symbol is basis-covariant: compare in the rotated frame
            delta = basis @ np.array(oracle.transverse_delta(k)) @ basis.T
            trans.record(t, _dev(lt @ lt.T, delta))
            agree.record(t, _dev(lam, oracle.frame(k, basis)))
    return [orth, trans, agree]


def check_povm(rng, trials: int, tol: Tolerances, max_modes: int = 4) -> list[CheckResult]:
    trace = CheckResult("povm.trace", tol.trace)
    agree = CheckResult("povm.oracle_agreement", tol.correlation)
    mono = CheckResult("povm.monotonic_detection", tol.trace)
    for t in range(trials):
        grid = random_grid(rng, _rand_K(rng, max_modes))
        state = random_state(rng, grid)
        basis = rotated_basis(random_rotation(rng))
        fm = frame_map(grid, basis)
        modes, K = grid.modes.tolist(), grid.size
        J_oracle = oracle.correlation(state.rho, modes, basis, [True] * K)
        trace.record(t, abs(sum(J_oracle[a][a] for a in range(3)) - 1.0))
        agree.record(t, _dev(correlation_matrix(state, fm).j, J_oracle))
        order = rng.permutation(K)
        prev = 0.0
        worst = 0.0
        for n in range(1, K + 1):
            mask = np.zeros(K, dtype=bool)
            mask[order[:n]] = True
            J = oracle.correlation(state.rho, modes, basis, mask.tolist())
            tr = sum(J[a][a] for a in range(3)).real
            worst = max(worst, prev - tr)
            prev = tr
        mono.record(t, max(worst, 0.0))
    return [trace, agree, mono]


def check_stokes(rng, trials: int, tol: Tolerances, max_modes: int = 4) -> list[CheckResult]:
    agree = CheckResult("stokes.oracle_agreement", tol.stokes)
    roundtrip = CheckResult("stokes.round_trip", tol.stokes)
    recon = CheckResult("stokes.reconstruction", tol.stokes)
    for t in range(trials):
        grid = random_grid(rng, _rand_K(rng, max_modes))
        state = random_state(rng, grid)
        w = grid.weights.tolist()
        field_ = two_mode_stokes(state)
        agree.record(t, _dev(field_.s, oracle.stokes_field(state.rho, w)))
        back = oracle.state_from_stokes(field_.s.tolist(), w)
        roundtrip.record(t, max(_dev(back, state.rho), _dev(state_from_stokes(field_).rho, state.rho)))
        j3 = submatrix(correlation_matrix(state, frame_map(grid)), 3)
        s = stokes_parameters(j3).s
        recon.record(t, max(_dev(matrix_from_stokes(s), j3), _dev(s, oracle.stokes_2x2(j3.tolist()))))
    return [agree, roundtrip, recon]


def check_commutation(rng, trials: int, tol: Tolerances, max_modes: int = 4, max_realizations: int = 16):
    comm = CheckResult("commutation.stokes_vs_density", tol.commutation)
    mueller = CheckResult("commutation.mueller_oracle_agreement", tol.mueller)
    kinds = ("general", "unitary", "kraus")
    for t in range(trials):
        grid = random_grid(rng, _rand_K(rng, max_modes))
        state = random_state(rng, grid)
        ens = random_ensemble(rng, grid, int(rng.integers(1, max_realizations + 1)), kinds[t % 3])
        w = grid.weights.tolist()
        dense = oracle.stokes_field(oracle.channel(ens.probs, ens.ops, state.rho), w)
        fast = propagate_stokes(mueller_ensemble(ens), two_mode_stokes(state))
        comm.record(t, _dev(fast.s, dense))
        pair = tuple(int(x) for x in rng.integers(0, grid.size, size=4))
        mueller.record(t, _dev(mueller_single(ens.ops[0], grid, pair), oracle.mueller(ens.ops[0], w, pair)))
    return [comm, mueller]


def _single_mode_ref(jones) -> np.ndarray:
    return np.real(np.array(oracle.ensemble_mueller([1.0], [oracle.single_mode_op(jones)], [1.0], (0, 0, 0, 0))))


def check_classical(rng, tol: Tolerances) -> list[CheckResult]:
    """Reduced Mueller matrices of standard elements against classical forms.

    Each element is evaluated both by the oracle (hand-traced Jones algebra)
    and by the fast path on a two-mode grid with random weights.
    """
    grid = ModeGrid([[0, 0, 1.0], [1.0, 0, 0]], rng.uniform(0.2, 2.0, size=2))
    results = []

    def run(name, cases, classical, jones, element):
        res = CheckResult(f"classical.{name}", tol.classical)
        for t, args in enumerate(cases):
            expected = np.array(oracle.iquv_to_pauli(classical(*args)), dtype=float)
            ref = _single_mode_ref(jones(*args))
            fast = reduce_single_mode(mueller_ensemble(element(grid, *args)), 1, 1)
            res.record(t, max(_dev(ref, expected), _dev(fast, expected)))
        results.append(res)

    run("polarizer", [(a,) for a in POLARIZER_ANGLES], oracle.classical_polarizer, oracle.jones_polarizer, polarizer)
    run("rotator", [(a,) for a in ROTATOR_SWEEP], oracle.classical_rotator, oracle.jones_rotator, rotator)
    run("retarder", RETARDER_CASES, oracle.classical_retarder, oracle.jones_retarder, retarder)

    depol = CheckResult("classical.depolarizer", tol.depolarizer)
    expected = np.array(oracle.iquv_to_pauli(oracle.classical_depolarizer()), dtype=float)
    ref = np.real(
        np.array(
            oracle.ensemble_mueller([0.25] * 4, [oracle.single_mode_op(p) for p in oracle.PAULI_JONES], [1.0], (0, 0, 0, 0))
        )
    )
    fast = reduce_single_mode(mueller_ensemble(pauli_depolarizer(grid)), 0, 0)
    depol.record(0, max(_dev(ref, expected), _dev(fast, expected)))
    results.append(depol)
    return results


def check_physicality(rng, trials: int, tol: Tolerances, max_modes: int = 4, max_realizations: int = 16):
    herm = CheckResult("physicality.hermitian", tol.stokes)
    psd = CheckResult("physicality.positive", tol.positivity)
    trace = CheckResult("physicality.trace_preserved", tol.trace)
    iff = CheckResult("physicality.trace_flag_consistent", 0.0)
    agree = CheckResult("physicality.oracle_agreement", tol.channel)
    kinds = ("general", "unitary", "kraus")
    for t in range(trials):
        grid = random_grid(rng, _rand_K(rng, max_modes))
        state = random_state(rng, grid)
        kind = kinds[t % 3]
        ens = random_ensemble(rng, grid, int(rng.integers(1, max_realizations + 1)), kind)
        out = oracle.channel(ens.probs, ens.ops, state.rho)
        arr = np.array(out)
        agree.record(t, _dev(apply_ensemble(ens, state).rho, arr))
        herm.record(t, _dev(arr, arr.conj().T) / max(np.linalg.norm(arr), 1e-300))
        tr = float(np.trace(arr).real)
        lo = float(np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))[0])
        psd.record(t, max(0.0, -lo / tr))
        delta = abs(tr - state.trace)
        if kind == "general":
            # a random non-unitary ensemble must be flagged lossy and actually change the trace
            iff.record(t, 0.0 if (not ens.trace_preserving and delta > tol.trace) else np.inf)
        else:
            trace.record(t, delta)
            iff.record(t, 0.0 if ens.trace_preserving else np.inf)
    return [herm, psd, trace, iff, agree]


def run_suite(trials: int = 100, seed: int = 0, tolerances: Tolerances | None = None, max_modes: int = 4) -> Report:
    """Run every oracle cross-check; ``trials=0`` yields an empty passing report."""
    tol = tolerances or Tolerances()
    if max_modes > oracle.MAX_MODES:
        raise ValueError(f"oracle suite supports at most {oracle.MAX_MODES} modes")
    report = Report(seed, trials, tol)
    if trials <= 0:
        return report
    rng = np.random.default_rng(seed)
    report.checks += check_frames(rng, trials, tol)
    report.checks += check_povm(rng, trials, tol, max_modes)
    report.checks += check_stokes(rng, trials, tol, max_modes)
    report.checks += check_commutation(rng, trials, tol, max_modes)
    report.checks += check_classical(rng, tol)
    report.checks += check_physicality(rng, trials, tol, max_modes)
    return report
