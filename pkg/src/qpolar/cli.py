"""Command-line front end.

    qpolar run --scene scene.json [--out result.json] [--seed N] [--pairs ...] [--detected ...] [--csv DIR]
    qpolar validate --scene scene.json
    qpolar oracle [--scene scene.json] [--trials N] [--seed N] [--tol X] [--out report.json]
    qpolar elements list

Errors go to stderr as a JSON object; exit status 2 parse, 3 validation,
4 degenerate beam, 5 internal inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from qpolar.checks import run_suite
from qpolar.config import Tolerances
from qpolar.errors import QpolarError, SceneParseError
from qpolar.oracle import MAX_MODES
from qpolar.scattering import ELEMENTS
from qpolar.scene import build_scene, dumps, evaluate, load_scene_file, parse_indices, parse_pairs
from qpolar.state import validate

log = logging.getLogger("qpolar")


def _emit_error(exc: QpolarError) -> int:
    err = {"error": {"type": type(exc).__name__, "exit_code": exc.exit_code, "message": str(exc)}}
    sys.stderr.write(json.dumps(err) + "\n")
    return exc.exit_code


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _write_csv(tables: dict, directory: str) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    if tables["stokes"]:
        with open(d / "stokes.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["name", "axis", "s0", "s1", "s2", "s3"])
            for name, axis, s in tables["stokes"]:
                w.writerow([name, axis, *(repr(float(x)) for x in s)])
    for name, matrix in tables["reduced_mueller"]:
        with open(d / f"{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "m0", "m1", "m2", "m3"])
            for i, row in enumerate(matrix):
                w.writerow([i, *(repr(float(x)) for x in row)])


def cmd_run(args) -> int:
    doc = load_scene_file(args.scene)
    scene = build_scene(doc, seed=args.seed)
    pairs = parse_pairs(args.pairs) if args.pairs else None
    detected = parse_indices(args.detected) if args.detected else None
    result, tables = evaluate(scene, pairs=pairs, detected=detected)
    _write(dumps(result), args.out)
    if args.csv:
        _write_csv(tables, args.csv)
    return 0


def cmd_validate(args) -> int:
    scene = build_scene(load_scene_file(args.scene), seed=args.seed)
    report = {
        "valid": True,
        "modes": scene.grid.size,
        "states": {n: validate(s).as_dict() for n, s in scene.states.items()},
        "ensembles": {
            n: {"realizations": len(e), "trace_preserving": e.trace_preserving} for n, e in scene.ensembles.items()
        },
        "outputs": len(scene.outputs),
    }
    sys.stdout.write(dumps(report))
    return 0


def cmd_oracle(args) -> int:
    max_modes = 4
    seed = args.seed
    if args.scene:
        scene = build_scene(load_scene_file(args.scene))
        if scene.grid.size > MAX_MODES:
            raise SceneParseError(f"oracle runs on grids of at most {MAX_MODES} modes")
        max_modes = scene.grid.size
        if seed is None:
            seed = scene.seed
    tol = Tolerances.from_env()
    if args.tol is not None:
        tol = tol.all_set_to(args.tol)
    report = run_suite(trials=args.trials, seed=0 if seed is None else seed, tolerances=tol, max_modes=max_modes)
    _write(dumps(report.as_dict()), args.out)
    for c in report.checks:
        log.info("%s %-40s max dev %.3e (tol %.1e)", "PASS" if c.passed else "FAIL", c.name, c.max_deviation, c.tolerance)
    return 0 if report.passed else 1


def cmd_elements(args) -> int:
    listing = {name: params for name, (_, params) in ELEMENTS.items()}
    listing["sequence"] = {"elements": "names of earlier ensembles, applied in order"}
    sys.stdout.write(dumps(listing))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpolar", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a scene file")
    run.add_argument("--scene", required=True)
    run.add_argument("--out", default=None, help="result path (default stdout)")
    run.add_argument("--seed", type=int, default=None, help="override the scene seed")
    run.add_argument("--pairs", default=None, help="Mueller pair selectors, e.g. '0,0,0,0;1,1,0,0'")
    run.add_argument("--detected", default=None, help="detected mode indices, e.g. '0,2'")
    run.add_argument("--csv", default=None, metavar="DIR", help="also write real-valued tables as CSV")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="parse and check a scene without computing outputs")
    val.add_argument("--scene", required=True)
    val.add_argument("--seed", type=int, default=None)
    val.set_defaults(func=cmd_validate)

    orc = sub.add_parser("oracle", help="cross-check fast paths against brute force")
    orc.add_argument("--scene", default=None)
    orc.add_argument("--trials", type=int, default=100)
    orc.add_argument("--seed", type=int, default=None)
    orc.add_argument("--tol", type=float, default=None, help="override every tolerance")
    orc.add_argument("--out", default=None)
    orc.set_defaults(func=cmd_oracle)

    el = sub.add_parser("elements", help="scattering element constructors")
    el_sub = el.add_subparsers(dest="elements_command", required=True)
    el_list = el_sub.add_parser("list")
    el_list.set_defaults(func=cmd_elements)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except QpolarError as exc:
        return _emit_error(exc)
    except (KeyError, TypeError, ValueError) as exc:
        # malformed but syntactically valid JSON surfaces here
        return _emit_error(SceneParseError(f"{type(exc).__name__}: {exc}"))


if __name__ == "__main__":
    sys.exit(main())
