"""
Command-line front end.

Examples
--------
  rotsym validate --profile well.json
  rotsym compare --profile well.json --A1 201.06 --D 1 --csv embed.csv
  rotsym compare --n 3 --A0 50.27 --A1 201.06 --L 10 --delta 0.05 --D 1
  rotsym sweep --n 3 --A0 50.27 --A1 201.06 --L 10 --D 1 --sweep 0.1,0.01,0.001 --csv sweep.csv
  rotsym example deep-well --n 3 --A0 50.27 --A1 201.06 --L 20 --delta 0.02 --out well.json
  rotsym example sharp-turn --n 3 --A0 50.27 --slopes 10,100,1000

Exit status is 0 on success, 1 for a domain error (invalid profile,
infeasible parameters, delta out of range, ...) and 2 for usage, I/O or
malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import comparison
from .distances import tube_comparison
from .errors import MalformedPieces, RotSymError
from .geometry import EMBEDDING_COLUMNS, RotSymManifold
from .profiles import (
    areal_radius,
    deep_well_profile,
    dump_profile,
    load_profile,
    sharp_turn_sequence,
    validate_profile,
    well_separation_bound,
)

log = logging.getLogger("rotsym")

SWEEP_COLUMNS = ("delta", "depth", "lip_bound", "ifd_sorwen", "ifd_lakzian",
                 "D1", "D2", "V1", "V2", "A1", "A2", "max_ratio", "error")


class UsageError(Exception):
    pass


def _float_list(text):
    text = text.strip()
    if not text:
        return []
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def build_parser():
    ap = argparse.ArgumentParser(prog="rotsym", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, generator=True):
        p.add_argument("--profile", type=Path, help="profile JSON file")
        p.add_argument("--tol", type=float, default=1e-10, help="relative quadrature tolerance")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, help="write the main output here instead of stdout")
        if generator:
            p.add_argument("--n", type=int, default=3, help="dimension")
            p.add_argument("--A0", type=float, help="boundary area")
            p.add_argument("--A1", type=float, help="area of the outer sphere")
            p.add_argument("--L", type=float, help="deep-well separation")
            p.add_argument("--delta", type=float, help="mass excess of the deep well")
            p.add_argument("--D", type=float, help="tube radius for distance bounds")
            p.add_argument("--rdelta-exponent", type=float, default=0.5)

    p = sub.add_parser("validate", help="check admissibility of a profile file")
    common(p, generator=False)

    p = sub.add_parser("compare", help="distortion report and distance bounds")
    common(p)
    p.add_argument("--csv", type=Path, help="embedding CSV of M; the model goes to *_model.csv")

    p = sub.add_parser("sweep", help="deep-well family over a grid of delta")
    common(p)
    p.add_argument("--sweep", type=_float_list, required=True, metavar="d1,d2,...")
    p.add_argument("--csv", type=Path, help="sweep CSV (default: stdout)")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("example", help="generate an example profile")
    p.add_argument("kind", choices=["deep-well", "sharp-turn"])
    common(p)
    p.add_argument("--slopes", type=_float_list, default=[10.0, 100.0, 1000.0])
    return ap


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")


def _profile_from_args(args):
    generator = args.delta is not None
    if (args.profile is None) == (not generator):
        raise UsageError("give exactly one input source: --profile or --delta with generator options")
    if args.profile is not None:
        return load_profile(args.profile)
    _require(args, "A0", "A1", "L")
    return deep_well_profile(args.n, args.A0, args.A1, args.L, args.delta)


def write_embedding_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EMBEDDING_COLUMNS)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


def _model_path(path):
    path = Path(path)
    return path.with_name(f"{path.stem}_model{path.suffix or '.csv'}")


def cmd_validate(args):
    if args.profile is None:
        raise UsageError("validate needs --profile")
    report = validate_profile(load_profile(args.profile))
    _emit(_dumps(report.to_dict()), args.out)
    return 0 if report.valid else 1


def compare_report(M, A1=None, D=None, exponent=0.5, seed=0):
    C = comparison.setup(M, exponent)
    report = comparison.certify(C, seed=seed).to_dict()
    report.update(n=M.n, r0=M.r0, m0=C.m0, r_delta=C.r_delta, A_delta=C.A_delta)
    if A1 is not None and D is not None:
        report["bounds"] = tube_comparison(M, None, A1, D, C=C).to_dict()
    return C, report


def cmd_compare(args):
    M = RotSymManifold(_profile_from_args(args), quad_tol=args.tol)
    C, report = compare_report(M, args.A1, args.D, args.rdelta_exponent, args.seed)
    if args.csv is not None:
        write_embedding_csv(M.embedding_rows(z_offset=C.z_anchor), args.csv)
        write_embedding_csv(C.model.embedding_rows(), _model_path(args.csv))
    _emit(_dumps(report), args.out)
    return 0


def sweep_row(n, A0, A1, L, D, delta, tol=1e-10, exponent=0.5, seed=0):
    """One row of the deep-well sweep; failures are recorded, not raised."""
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row["delta"] = delta
    try:
        M = RotSymManifold(deep_well_profile(n, A0, A1, L, delta), quad_tol=tol)
        C = comparison.setup(M, exponent)
        rep = comparison.certify(C, seed=seed)
        b = tube_comparison(M, A0, A1, D, C=C)
    except (RotSymError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    for key in ("depth", "lip_bound", "ifd_sorwen", "ifd_lakzian", "D1", "D2", "V1", "V2", "A1", "A2"):
        row[key] = getattr(b, key)
    row["max_ratio"] = rep.max_ratio
    return row


def _sweep_task(packed):
    return sweep_row(*packed)


def sweep_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in (row[c] for c in SWEEP_COLUMNS)])
    return buf.getvalue()


def cmd_sweep(args):
    _require(args, "A0", "A1", "L", "D")
    tasks = [(args.n, args.A0, args.A1, args.L, args.D, d, args.tol, args.rdelta_exponent, args.seed)
             for d in args.sweep]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(t) for t in tasks]
    for row in rows:
        if row["error"]:
            log.warning("delta=%r failed: %s", row["delta"], row["error"])
    _emit(sweep_csv(rows), args.csv if args.csv is not None else args.out)
    return 0


def _example_deep_well(args):
    _require(args, "A0", "A1", "L", "delta")
    profile = deep_well_profile(args.n, args.A0, args.A1, args.L, args.delta)
    M = RotSymManifold(profile, quad_tol=args.tol)
    eps = profile.pieces[1].epsilon
    separation = M.sphere_distance(M.boundary_area, args.A1)
    summary = {
        "kind": "deep-well", "n": args.n, "delta": args.delta, "L": args.L,
        "epsilon": eps, "r0": profile.r0,
        "separation": separation,
        "separation_lower_bound": well_separation_bound(profile.r0, args.n, args.delta, eps),
        "separation_exceeds_L": separation > args.L,
    }
    if args.out is not None:
        dump_profile(profile, args.out)
    return summary


def _example_sharp_turn(args):
    _require(args, "A0")
    k = args.n - 2
    m0 = 0.5 * areal_radius(args.A0, args.n) ** k
    rows = []
    profiles = sharp_turn_sequence(args.n, m0, args.slopes)
    for j, (slope, profile) in enumerate(zip(args.slopes, profiles)):
        M = RotSymManifold(profile, quad_tol=args.tol)
        C = comparison.setup(M, args.rdelta_exponent)
        rep = comparison.certify(C, seed=args.seed)
        rows.append({
            "slope": slope, "m_adm": profile.adm_mass, "delta": C.delta,
            "sup_abs_R": M.sup_abs_curvature(), "max_ratio": rep.max_ratio,
            "lip_bound": rep.lip_bound, "depth": C.depth,
        })
        if args.out is not None:
            out = Path(args.out)
            dump_profile(profile, out.with_name(f"{out.stem}_{j}{out.suffix or '.json'}"))
    return {"kind": "sharp-turn", "n": args.n, "m0": m0, "sequence": rows}


def cmd_example(args):
    if args.kind == "deep-well":
        summary = _example_deep_well(args)
    else:
        summary = _example_sharp_turn(args)
    sys.stdout.write(_dumps(summary))
    return 0


COMMANDS = {"validate": cmd_validate, "compare": cmd_compare, "sweep": cmd_sweep, "example": cmd_example}


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except MalformedPieces as exc:
        log.error("malformed input: %s", exc)
        return 2
    except RotSymError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1
    except (UsageError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
