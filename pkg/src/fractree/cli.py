"""Command-line front end.

Every subcommand reads an optional JSON config with keys
``theta_deg, E, G, L, I, A, A_star, a, u, v, P`` (figure parameters with
P = 8 when omitted), writes CSV with a header row or a JSON report, and exits
with 0 on success, 1 on invalid input, 2 on divergence and 3 when a
verification run fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import closedform, dimension, fractals, limits, mechanics, verify
from .errors import DivergentParameters, FractreeError, ValidationError
from .model import FIGURE_PARAMS, TreeParams, iter_nodes, node_coordinates, validate

EXIT_OK, EXIT_INVALID, EXIT_DIVERGENT, EXIT_VERIFY = 0, 1, 2, 3

CONFIG_KEYS = ("theta_deg", "E", "G", "L", "I", "A", "A_star", "a", "u", "v", "P")
_FIELD_OF = {"theta_deg": "theta", "A_star": "Astar"}


@dataclass
class RunConfig:
    params: TreeParams | None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        bad = []
        n = self.options.get("n")
        if n is not None and n < 2:
            bad.append(("TooFewSamples", "n"))
        tol = self.options.get("tol")
        if tol is not None and not tol > 0:
            bad.append(("NonPositive", "tol"))
        if bad:
            raise ValidationError(bad)


def default_config() -> dict:
    cfg = {_key: FIGURE_PARAMS[_FIELD_OF.get(_key, _key)] for _key in CONFIG_KEYS
           if _key not in ("theta_deg", "P")}
    cfg["theta_deg"] = math.degrees(FIGURE_PARAMS["theta"])
    cfg["P"] = 8
    return cfg


def params_from_config(cfg: dict) -> TreeParams:
    """Map a config document to validated TreeParams (degrees -> radians)."""
    unknown = sorted(set(cfg) - set(CONFIG_KEYS))
    if unknown:
        raise ValidationError([("UnknownKey", k) for k in unknown])
    missing = sorted(set(CONFIG_KEYS) - set(cfg))
    if missing:
        raise ValidationError([("Missing", k) for k in missing])
    kw = {_FIELD_OF.get(k, k): v for k, v in cfg.items()}
    theta_deg = kw.pop("theta")
    try:
        kw["theta"] = math.radians(float(theta_deg))
    except (TypeError, ValueError):
        raise ValidationError([("AngleOutOfRange", "theta_deg")]) from None
    return validate(kw)


def load_config(path: str | None, overrides: dict) -> TreeParams:
    cfg = default_config()
    if path:
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError([("Unreadable", str(path))]) from exc
        if not isinstance(cfg, dict):
            raise ValidationError([("NotAnObject", str(path))])
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return params_from_config(cfg)


# -- output ---------------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(header, rows, out) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    _emit(buf.getvalue(), out)


def write_json(obj, out) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", out)


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# -- commands -------------------------------------------------------------------


def _profile_rows(prof: closedform.Profile):
    for k in range(len(prof)):
        yield (k + 1, prof.abscissae[k], prof.total[k], prof.bending[k],
               prof.axial[k], prof.shear[k])


def _cmd_displacement(args, kind: str) -> int:
    params = _params(args)
    if args.level is not None:
        # nodes of level i behave as the end nodes of an i-level tree
        closedform.displacement_at_level(params, args.level, 1, kind)
        params = params.with_levels(args.level)
    prof = closedform.profile(params, kind)
    xname = "z" if kind == "vertical" else "zstar"
    write_csv(["w", xname, "total", "bending", "axial", "shear"], _profile_rows(prof),
              args.output)
    return EXIT_OK


def cmd_vertical(args) -> int:
    return _cmd_displacement(args, "vertical")


def cmd_horizontal(args) -> int:
    return _cmd_displacement(args, "horizontal")


def _divergence_report(params: TreeParams, regime=None) -> dict | None:
    reasons = limits.divergence_reasons(params, regime)
    if reasons:
        return {"status": "divergent", "reasons": list(reasons)}
    return None


def cmd_limit(args) -> int:
    params = _params(args)
    RunConfig(params, {"n": args.n, "tol": args.tol})
    if args.regime is not None:
        if args.kind != "horizontal":
            raise ValidationError([("RegimeNeedsHorizontal", "regime")])
        limits.check_regime(params, args.regime)
    report = _divergence_report(params, args.regime if args.kind == "horizontal" else None)
    if report is not None:
        write_json(report, args.output)
        return EXIT_DIVERGENT
    kind = f"{args.kind}_limit"
    samples = fractals.sample_curve(kind, args.n, tree=params, tol=args.tol,
                                    regime=args.regime)
    xname = "z" if args.kind == "vertical" else "zstar"
    write_csv([xname, "value"], zip(samples.abscissae, samples.values), args.output)
    return EXIT_OK


def cmd_curve(args) -> int:
    needs_tree = args.kind in ("vertical_limit", "horizontal_limit",
                               "vertical_iteration", "horizontal_iteration")
    tree = _params(args) if needs_tree else None
    RunConfig(tree, {"n": args.n, "tol": args.tol})
    levels = args.level or [None]
    if len(levels) > 1 and (args.output is None or "{level}" not in args.output):
        raise ValidationError([("NeedsLevelPlaceholder", "output")])
    for level in levels:
        samples = fractals.sample_curve(args.kind, args.n, r=args.r, t=args.t,
                                        P=args.levels, tree=tree, level=level,
                                        tol=args.tol, regime=args.regime)
        out = args.output.format(level=level) if args.output else None
        write_csv(["x", "value"], zip(samples.abscissae, samples.values), out)
    return EXIT_OK


def cmd_dimension(args) -> int:
    a = args.a
    report = {
        "a": a,
        "D_psi": dimension.takagi_dimension(a),
        "D_c": dimension.cantor_inverse_dimension(a / 16),
        "relation": dimension.dimension_relation(a),
    }
    m = args.log2_samples
    if args.empirical == "graph":
        samples = fractals.sample_curve("takagi_limit", 2**m + 1, r=a / 16)
        est = dimension.box_count_graph(samples, analytic=report["D_psi"])
        report["empirical"] = {"mode": "graph", **est.to_json()}
    elif args.empirical == "image":
        nums = np.arange(2**m, dtype=np.int64)
        values = fractals.c_partial_grid(nums, 2**m, a / 16, m)
        est = dimension.box_count_image(values, analytic=report["D_c"])
        report["empirical"] = {"mode": "image", **est.to_json()}
    write_json(report, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify.run_verification(seed=args.seed, draws=args.draws, p_min=args.p_min,
                                     p_max=args.p_max, stiffness=not args.no_stiffness)
    write_json(report, args.output)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_geometry(args) -> int:
    params = _params(args)
    disp = mechanics.stiffness_solve(params)
    rows = []
    for node in iter_nodes(params.P):
        x, y = node_coordinates(params, node)
        ux, uy = disp[node]
        rows.append((node.level, node.index, x, y, ux, uy))
    write_csv(["level", "index", "x", "y", "ux", "uy"], rows, args.output)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _params(args) -> TreeParams:
    return load_config(args.config, {"P": args.P})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractree", description="Displacements of self-similar binary-tree frames.")
    sub = parser.add_subparsers(dest="command", required=True)

    def tree_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON parameter file (figure parameters if omitted)")
        p.add_argument("--P", type=int, help="override the number of levels")
        p.add_argument("-o", "--output", help="output path (stdout if omitted)")
        return p

    for name, fn in (("vertical", cmd_vertical), ("horizontal", cmd_horizontal)):
        p = tree_cmd(name, f"{name} end-node displacements")
        p.add_argument("--level", type=int, help="report the nodes of this level")
        p.set_defaults(func=fn)

    p = tree_cmd("limit", "displacements of the infinite tree on a uniform grid")
    p.add_argument("--kind", choices=("vertical", "horizontal"), default="vertical")
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--tol", type=float, default=limits.DEFAULT_TOL)
    p.add_argument("--regime", choices=limits.REGIMES)
    p.set_defaults(func=cmd_limit)

    p = tree_cmd("curve", "sample a Takagi, digit-sum or displacement curve")
    p.add_argument("--kind", choices=fractals.CURVE_KINDS, required=True)
    p.add_argument("--n", type=int, default=1025)
    p.add_argument("--r", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--levels", type=int, help="truncation depth of partial sums")
    p.add_argument("--level", type=int, action="append",
                   help="tree level for iteration kinds (repeatable; use {level} in -o)")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--regime", choices=limits.REGIMES)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("dimension", help="analytic and box-counting dimensions")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--empirical", choices=("graph", "image"))
    p.add_argument("--log2-samples", type=int, default=18)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("verify", help="cross-check closed forms against both oracles")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--draws", type=int, default=50)
    p.add_argument("--p-min", type=int, default=1)
    p.add_argument("--p-max", type=int, default=10)
    p.add_argument("--no-stiffness", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = tree_cmd("geometry", "node coordinates and frame displacements")
    p.set_defaults(func=cmd_geometry)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergentParameters as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except (FractreeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
