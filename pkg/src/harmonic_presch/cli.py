"""``presch`` command line: eval, norm, profile, witness, check and report.

Exit codes: 0 success or pass, 1 a check failed (or no witness found),
2 usage, domain or singularity error (including malformed numbers and JSON).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .errors import PreschError
from .norms import GridSpec, divergence_witness, norm_estimate, profile_csv, radial_profile, weighted_modulus
from .presch import pre_schwarzian
from .registry import format_complex, parse_complex, parse_domain, parse_map
from .report import CHECKS, jsonable, run_check, run_report

log = logging.getLogger("harmonic_presch")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class PreschErrorUsage(PreschError):
    """Malformed command-line input that argparse cannot catch."""


def _emit(obj, out=None):
    text = json.dumps(jsonable(obj), indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _domain(args, f):
    return parse_domain(args.domain) if args.domain else f.domain


def _grid_spec(args) -> GridSpec:
    return GridSpec(args.n_theta, args.n_r, args.margin, args.rounds, args.outer_radius)


def _radii(text: str) -> list[float]:
    """``r1,r2,...`` or ``start:stop:count`` (inclusive linspace)."""
    if text.count(":") == 2:
        a, b, n = text.split(":")
        return list(np.linspace(float(a), float(b), int(n)))
    return [float(x) for x in text.split(",") if x]


def cmd_eval(args) -> int:
    f = parse_map(args.map)
    z = parse_complex(args.z)
    v = pre_schwarzian(f, z)
    out = {"J": v.jacobian}
    if v.omega is not None:
        out["omega"] = format_complex(v.omega)
    out["P"] = format_complex(v.p)
    if args.domain:
        out["weighted"] = weighted_modulus(f, parse_domain(args.domain), z, args.weight)
    _emit(out)
    return EXIT_OK


def cmd_norm(args) -> int:
    f = parse_map(args.map)
    est = norm_estimate(f, _domain(args, f), _grid_spec(args), args.weight)
    _emit(est, args.out)
    return EXIT_OK


def cmd_profile(args) -> int:
    f = parse_map(args.map)
    rows = radial_profile(f, _domain(args, f), args.theta, _radii(args.radii), args.weight)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            profile_csv(rows, args.theta, fh)
    else:
        sys.stdout.write(profile_csv(rows, args.theta))
    return EXIT_OK


def cmd_witness(args) -> int:
    f = parse_map(args.map)
    D = _domain(args, f)
    weight = args.weight or ("exterior_weight" if D.id == "exterior" else "inv_density")
    w = divergence_witness(f, D, args.threshold, weight)
    if w is None:
        _emit({"found": False, "threshold": args.threshold, "weight": weight})
        return EXIT_FAIL
    _emit({"found": True, "point": w.point, "value": w.value, "weight": w.weight, "threshold": args.threshold})
    return EXIT_OK


def _json_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_check(args) -> int:
    params = {}
    for key in ("alpha0", "alpha", "bound", "expected", "threshold", "mode", "family", "closed_form", "expect"):
        v = getattr(args, key)
        if v is not None:
            params[key] = v
    for key in ("eps", "eps2", "b1"):
        v = getattr(args, key)
        if v is not None:
            params[key] = v.split(",") if "," in v else v
    if args.weight != "inv_density":
        params["weight"] = args.weight
    for item in args.param or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise PreschErrorUsage(f"--param expects key=value, got {item!r}")
        params[key] = _json_value(value)
    entry = {"id": args.id, "params": params}
    if args.map:
        entry["map"] = args.map
    if args.domain:
        entry["domain"] = args.domain
    res = run_check(entry)
    _emit(res, args.out)
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_report(args) -> int:
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
        if not isinstance(config, dict) or not isinstance(config.get("checks", []), list):
            raise PreschErrorUsage("config must be a JSON object with a 'checks' list")
    else:
        config = None
    rep = run_report(config)
    _emit(rep, args.out)
    return EXIT_OK if rep["summary"]["failed"] == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="presch", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log skipped samples and refinement")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_map=True):
        sp.add_argument("--map", required=need_map, help="map id, e.g. koebe, k-alpha:2, f-k:0.7:2.5")
        sp.add_argument("--domain", help="domain id (default: the map's own domain)")
        sp.add_argument("--weight", choices=("inv_density", "exterior_weight"), default="inv_density")

    def grid(sp):
        d = GridSpec()
        sp.add_argument("--n-theta", type=int, default=d.n_theta)
        sp.add_argument("--n-r", type=int, default=d.n_r)
        sp.add_argument("--margin", type=float, default=d.boundary_margin)
        sp.add_argument("--rounds", type=int, default=d.refine_rounds)
        sp.add_argument("--outer-radius", type=float, default=d.outer_radius)

    sp = sub.add_parser("eval", help="Jacobian, dilatation and pre-Schwarzian at a point")
    common(sp)
    sp.add_argument("--z", required=True, help="point in a+bi form")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("norm", help="estimate the weighted pre-Schwarzian norm")
    common(sp)
    grid(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("profile", help="weighted modulus along a chart ray, as CSV")
    common(sp)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--radii", default="0:0.999:200", help="r1,r2,... or start:stop:count")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_profile)

    sp = sub.add_parser("witness", help="search for a point exceeding a threshold")
    common(sp)
    # on the exterior disk the divergent functional is the cubic exterior weight
    sp.set_defaults(weight=None)
    sp.add_argument("--threshold", type=float, required=True)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("check", help="run one verification check")
    sp.add_argument("--id", required=True, choices=sorted(CHECKS))
    common(sp, need_map=False)
    for name in ("alpha0", "alpha", "bound", "expected", "threshold"):
        sp.add_argument(f"--{name}", type=float)
    for name in ("eps", "eps2", "b1"):
        sp.add_argument(f"--{name}", help="complex a+bi, or a comma-separated list")
    sp.add_argument("--mode", choices=("single", "pair", "unit"))
    sp.add_argument("--family")
    sp.add_argument("--closed-form", dest="closed_form", choices=("convex", "close-to-convex"))
    sp.add_argument("--expect", choices=("bounded", "to-zero"))
    sp.add_argument("--param", action="append", help="extra key=value (value parsed as JSON when possible)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("report", help="run a batch of checks from a JSON config")
    sp.add_argument("--config", help="JSON file with checks: [{id, map, domain, params}] (default: built-in suite)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (PreschError, ValueError, TypeError, OSError) as exc:
        print(f"presch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
