"""Scene files in, result documents out.

A scene is a JSON document::

    {
      "schema": "qpolar-scene/1",
      "seed": 0,
      "grid": {"kind": "explicit", "modes": [[0, 0, 1]], "weights": [1]},
      "basis": {"rotation": {"axis": [0, 0, 1], "angle": 0.0}},
      "states": {"psi": {"kind": "plane_wave", "mode": 0, "pol": [1, 0]}},
      "ensembles": {"pol": {"kind": "polarizer", "angle": 0.0}},
      "outputs": [{"kind": "rho_eff", "state": "psi"}]
    }

Complex numbers are written as ``[re, im]`` pairs; plain numbers are read
as real.  States and ensembles may refer to earlier entries by name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from qpolar import __version__
from qpolar.correlation import (
    correlation_matrix,
    effective_density_2x2,
    effective_density_3x3,
    stokes_parameters,
    submatrix,
)
from qpolar.errors import SceneParseError, ValidationError
from qpolar.grid import ModeGrid, build_grid, check_basis, frame_map, rotated_basis, rotation_matrix
from qpolar.scattering import (
    ELEMENTS,
    ScatteringEnsemble,
    apply_ensemble,
    compose,
    mueller_ensemble,
    reduce_single_mode,
)
from qpolar.state import (
    PhotonState,
    StokesField,
    mixed_state,
    plane_wave_state,
    state_from_stokes,
    stokes_to_iquv,
    two_mode_stokes,
    validate,
    wave_packet_state,
)

SCENE_SCHEMA = "qpolar-scene/1"
RESULT_SCHEMA = "qpolar-result/1"
STATE_SCHEMA = "qpolar-state/1"

OUTPUT_KINDS = ("stokes", "correlation", "rho_eff", "rho3", "mueller", "reduced_mueller", "scatter", "state")

CONVENTIONS = {
    "pauli": "sigma_(mu) = sigma_mu / sqrt(2); sigma_0 = I, sigma_1 = [[0,1],[1,0]], "
    "sigma_2 = [[0,-i],[i,0]], sigma_3 = diag(1,-1); Tr(sigma_(mu) sigma_(nu)) = delta",
    "triad": "eps1 = theta-hat, eps2 = phi-hat, eps3 = k/|k|; on +-z: eps1 = x, eps2 = +-y",
    "stokes_relabeling": "(I, Q, U, V) = sqrt(2) * (s0, s3, s1, s2)",
    "weighted_basis": "rho_w[(i,l),(j,l')] = sqrt(w_i w_j) rho_ll'(k_i,k_j); row index 2*i + l",
    "complex_encoding": "[re, im]",
}


# -- complex JSON encoding ----------------------------------------------------


def encode_complex(a) -> Any:
    """Nested lists with every entry as an [re, im] pair of floats."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [encode_complex(x) for x in a]


def encode_real(a) -> Any:
    return np.asarray(a, dtype=float).tolist()


def decode_array(obj, ndim: int, what: str = "value") -> np.ndarray:
    """Read an ``ndim``-dimensional array of reals or ``[re, im]`` pairs."""
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SceneParseError(f"{what}: not a rectangular numeric array") from exc
    if arr.ndim == ndim:
        return arr.astype(complex)
    if arr.ndim == ndim + 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    raise SceneParseError(f"{what}: expected a {ndim}-d array of reals or [re, im] pairs")


# -- serialization of library objects ------------------------------------------


def grid_to_json(grid: ModeGrid) -> dict:
    return {
        "modes": encode_real(grid.modes),
        "weights": encode_real(grid.weights),
        "detected": [int(i) for i in np.flatnonzero(grid.detected)],
    }


def grid_from_json(obj: dict) -> ModeGrid:
    return ModeGrid(np.asarray(obj["modes"], dtype=float), np.asarray(obj["weights"], dtype=float), obj.get("detected"))


def state_to_json(state: PhotonState) -> dict:
    return {"schema": STATE_SCHEMA, "grid": grid_to_json(state.grid), "matrix": encode_complex(state.rho)}


def state_from_json(obj: dict, grid: ModeGrid | None = None) -> PhotonState:
    if grid is None:
        grid = grid_from_json(obj["grid"])
    return PhotonState(grid, decode_array(obj["matrix"], 2, "state matrix"))


def stokes_field_to_json(field_: StokesField) -> dict:
    return {"grid": grid_to_json(field_.grid), "s": encode_complex(field_.s)}


# -- scene model --------------------------------------------------------------


@dataclass
class Scene:
    grid: ModeGrid
    basis: np.ndarray
    seed: int
    states: dict[str, PhotonState] = field(default_factory=dict)
    ensembles: dict[str, ScatteringEnsemble] = field(default_factory=dict)
    outputs: list[dict] = field(default_factory=list)


def parse_basis(spec) -> np.ndarray:
    if spec is None:
        return np.eye(3)
    if isinstance(spec, dict):
        if "rotation" in spec:
            rot = spec["rotation"]
            return rotated_basis(rotation_matrix(rot["axis"], float(rot["angle"])))
        if "vectors" in spec:
            return check_basis(spec["vectors"])
        raise SceneParseError("basis needs 'rotation' or 'vectors'")
    return check_basis(spec)


def load_scene_file(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SceneParseError(f"cannot read scene {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"invalid JSON in {path}: {exc}") from exc


def _require(spec: dict, key: str, where: str):
    if key not in spec:
        raise SceneParseError(f"{where}: missing '{key}'")
    return spec[key]


def _build_state(name: str, spec: dict, scene: Scene) -> PhotonState:
    kind = _require(spec, "kind", f"state {name}")
    grid = scene.grid
    where = f"state {name}"
    if kind == "plane_wave":
        return plane_wave_state(grid, int(_require(spec, "mode", where)), decode_array(_require(spec, "pol", where), 1, where))
    if kind == "wave_packet":
        amp = decode_array(_require(spec, "amplitude", where), 1, where)
        if "pols" in spec:
            pol = decode_array(spec["pols"], 2, where)
        else:
            pol = decode_array(_require(spec, "pol", where), 1, where)
        return wave_packet_state(grid, amp, pol)
    if kind == "mixture":
        parts = [(float(w), _lookup(scene.states, ref, "state")) for w, ref in _require(spec, "parts", where)]
        return mixed_state(parts)
    if kind == "kernel":
        return PhotonState(grid, decode_array(_require(spec, "matrix", where), 2, where))
    if kind == "stokes":
        field_ = StokesField(grid, decode_array(_require(spec, "field", where), 3, where))
        return state_from_stokes(field_)
    if kind == "scattered":
        ens = _lookup(scene.ensembles, _require(spec, "ensemble", where), "ensemble")
        return apply_ensemble(ens, _lookup(scene.states, _require(spec, "state", where), "state"))
    raise SceneParseError(f"{where}: unknown kind {kind!r}")


def _lookup(table: dict, ref, what: str):
    if ref not in table:
        raise ValidationError(f"unknown {what} {ref!r}")
    return table[ref]


def _build_ensemble(name: str, spec: dict, scene: Scene) -> ScatteringEnsemble:
    spec = dict(spec)
    kind = spec.pop("kind", None)
    where = f"ensemble {name}"
    grid = scene.grid
    if kind is None:
        raise SceneParseError(f"{where}: missing 'kind'")
    if kind == "sequence":
        return compose(*[_lookup(scene.ensembles, ref, "ensemble") for ref in _require(spec, "elements", where)])
    if kind not in ELEMENTS:
        raise SceneParseError(f"{where}: unknown element {kind!r}")
    if kind == "raw":
        reals = _require(spec, "realizations", where)
        probs = [float(_require(r, "p", where)) for r in reals]
        ops = [decode_array(_require(r, "matrix", where), 2, where) for r in reals]
        return ScatteringEnsemble(grid, probs, np.stack(ops) if ops else np.zeros((0, 2 * grid.size, 2 * grid.size)))
    if kind == "jones":
        return ELEMENTS[kind][0](grid, decode_array(_require(spec, "matrix", where), 2, where))
    if kind == "mode_coupler":
        mixing = decode_array(_require(spec, "mixing", where), 2, where)
        jones = None
        if "jones_per_mode" in spec:
            jones = decode_array(spec["jones_per_mode"], 3, where)
        elif "jones" in spec:
            jones = decode_array(spec["jones"], 2, where)
        return ELEMENTS[kind][0](grid, mixing, jones)
    if kind == "random_unitary":
        spec.setdefault("seed", scene.seed)
    func = ELEMENTS[kind][0]
    try:
        return func(grid, **spec)
    except TypeError as exc:
        raise SceneParseError(f"{where}: bad parameters ({exc})") from exc


def build_scene(doc: dict, seed: int | None = None) -> Scene:
    if not isinstance(doc, dict):
        raise SceneParseError("scene must be a JSON object")
    schema = doc.get("schema", SCENE_SCHEMA)
    if schema != SCENE_SCHEMA:
        raise SceneParseError(f"unsupported scene schema {schema!r}")
    grid_spec = _require(doc, "grid", "scene")
    if not isinstance(grid_spec, dict):
        raise SceneParseError("exactly one grid object required")
    try:
        grid = build_grid(grid_spec)
    except TypeError as exc:
        raise SceneParseError(f"grid: bad parameters ({exc})") from exc
    scene = Scene(
        grid=grid,
        basis=parse_basis(doc.get("basis")),
        seed=int(doc.get("seed", 0) if seed is None else seed),
    )
    # ensembles first so that "scattered" states can use them
    for name, spec in (doc.get("ensembles") or {}).items():
        scene.ensembles[name] = _build_ensemble(name, spec, scene)
    for name, spec in (doc.get("states") or {}).items():
        scene.states[name] = _build_state(name, spec, scene)
    outputs = doc.get("outputs") or []
    for out in outputs:
        kind = _require(out, "kind", "output")
        if kind not in OUTPUT_KINDS:
            raise SceneParseError(f"unknown output kind {kind!r}")
        for key, table in (("state", scene.states), ("ensemble", scene.ensembles)):
            if key in out:
                _lookup(table, out[key], key)
    scene.outputs = list(outputs)
    return scene


def parse_pairs(text: str) -> list[tuple[int, int, int, int]]:
    """``"0,0,0,0;1,1,0,0"`` -> [(0, 0, 0, 0), (1, 1, 0, 0)]."""
    pairs = []
    for chunk in text.replace(" ", ";").split(";"):
        if not chunk:
            continue
        idx = tuple(int(x) for x in chunk.split(","))
        if len(idx) != 4:
            raise SceneParseError(f"pair selector {chunk!r} needs four indices")
        pairs.append(idx)
    return pairs


def parse_indices(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# -- evaluation ---------------------------------------------------------------


def _output_name(i: int, out: dict) -> str:
    return out.get("name", f"{out['kind']}_{i}")


def evaluate(scene: Scene, pairs=None, detected=None) -> tuple[dict, dict]:
    """Compute every requested output.

    Returns the result document and the real-valued tables (Stokes vectors,
    reduced Mueller matrices) available for CSV export.
    """
    results = []
    tables: dict[str, list] = {"stokes": [], "reduced_mueller": []}
    for i, out in enumerate(scene.outputs):
        name = _output_name(i, out)
        entry = {"name": name, "kind": out["kind"]}
        entry.update(_evaluate_one(scene, out, pairs, detected))
        results.append(entry)
        if out["kind"] == "stokes":
            tables["stokes"].append((name, entry["axis"], entry["s"]))
        elif out["kind"] == "reduced_mueller":
            tables["reduced_mueller"].append((name, entry["matrix"]))
    doc = {
        "schema": RESULT_SCHEMA,
        "version": __version__,
        "seed": scene.seed,
        "conventions": CONVENTIONS,
        "grid": grid_to_json(scene.grid),
        "states": {name: validate(s).as_dict() for name, s in scene.states.items()},
        "ensembles": {
            name: {
                "realizations": len(e),
                "trace_preserving": e.trace_preserving,
                "completeness_defect": e.completeness_defect(),
            }
            for name, e in scene.ensembles.items()
        },
        "outputs": results,
    }
    return doc, tables


def _frame(scene: Scene, out: dict):
    basis = parse_basis(out["basis"]) if "basis" in out else scene.basis
    return frame_map(scene.grid, basis)


def _correlation(scene: Scene, out: dict, detected):
    state = scene.states[_require(out, "state", "output")]
    mask = out.get("detected", detected)
    return correlation_matrix(state, _frame(scene, out), mask)


def _evaluate_one(scene: Scene, out: dict, pairs, detected) -> dict:
    kind = out["kind"]
    if kind == "correlation":
        jm = _correlation(scene, out, detected)
        return {
            "matrix": encode_complex(jm.j),
            "trace": jm.trace,
            "photon_number": jm.photon_number,
            "detected": [int(i) for i in np.flatnonzero(jm.detected)],
        }
    if kind == "stokes":
        if out.get("two_mode"):
            state = scene.states[out["state"]]
            return {"axis": None, "s": None, "field": stokes_field_to_json(two_mode_stokes(state))}
        axis = int(out.get("axis", 3))
        sv = stokes_parameters(submatrix(_correlation(scene, out, detected), axis), axis)
        return {
            "axis": axis,
            "s": encode_real(sv.s),
            "iquv": encode_real(stokes_to_iquv(sv.s)),
            "degree_of_polarization": sv.degree_of_polarization,
        }
    if kind == "rho_eff":
        return {"matrix": encode_complex(effective_density_2x2(_correlation(scene, out, detected)))}
    if kind == "rho3":
        return {"matrix": encode_complex(effective_density_3x3(_correlation(scene, out, detected)))}
    if kind == "state":
        return {"state": state_to_json(scene.states[_require(out, "state", "output")])}
    ens = scene.ensembles[_require(out, "ensemble", f"{kind} output")]
    if kind == "scatter":
        state = scene.states[_require(out, "state", "scatter output")]
        result = apply_ensemble(ens, state)
        return {
            "trace": result.trace,
            "trace_in": state.trace,
            "diagnostics": validate(result).as_dict(),
            "state": state_to_json(result),
        }
    M = mueller_ensemble(ens)
    if kind == "mueller":
        sel = out.get("pairs")
        sel = [tuple(p) for p in sel] if sel is not None else pairs
        if sel is None:
            K = scene.grid.size
            sel = [(q, q, k, k) for q in range(K) for k in range(K)]
        return {"blocks": [{"pair": list(p), "matrix": encode_complex(m)} for p, m in M.blocks(sel).items()]}
    if kind == "reduced_mueller":
        in_mode = int(out.get("in_mode", 0))
        out_mode = int(out.get("out_mode", in_mode))
        return {"in_mode": in_mode, "out_mode": out_mode, "matrix": encode_real(reduce_single_mode(M, in_mode, out_mode))}
    raise SceneParseError(f"unknown output kind {kind!r}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
