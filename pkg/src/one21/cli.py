"""Command-line entry point: ``one21 <subcommand> [flags]``.

Distances are in arbitrary length units, gamma is dimensionless and every
capacity is reported in bits per channel use.  Exit codes: 0 success,
1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys

from .analysis import DomainError, cstar, hypothesis_holds, symmetric_closed_form
from .capacity import approx_capacity_p1, build_p1
from .experiments import (
    EPS_REL,
    ExperimentConfig,
    beta_summary,
    beta_sweep,
    distance_summary,
    distance_sweep_compare,
    monte_carlo,
    render_csv,
    render_json,
    write_outputs,
)
from .model import (
    Mode,
    ParameterError,
    PropagationParams,
    Topology,
    gain_matrix,
    make_theorem_topology,
    symmetric_geometry,
)
from .verify import SUITES, format_checks, run_suite

# per-subcommand defaults: (gamma, distance)
DEFAULTS = {
    "capacity": (1e6, 100.0),
    "optimal": (1e6, 100.0),
    "sweep-beta": (1e6, 200.0 * math.sqrt(2.0)),
    "compare-line": (1e6, None),
    "monte-carlo": (1e7, 600.0 * math.sqrt(2.0)),
    "verify": (1e6, 100.0),
}


class UsageError(Exception):
    pass


def _relay(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise argparse.ArgumentTypeError(f"non-finite relay position {text!r}")
    return x, y


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _seed(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="one21", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=float,
                        help="dimensionless SNR scale (default 1e7 for monte-carlo, else 1e6)")
    common.add_argument("--alpha", type=float, default=2.0, help="path-loss exponent a > 1 (default 2)")
    common.add_argument("--mode", choices=[m.value for m in Mode], default="approx",
                        help="link model: approx=log2(gamma/d^a), exact=log2(1+gamma/d^a)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", parents=[common], help="capacity of one topology (JSON)")
    p.add_argument("--dist", type=float, help="source-destination distance (default 100)")
    p.add_argument("--relay", type=_relay, action="append", default=[], metavar="X,Y",
                   help="relay position, repeatable; source at (0,0), destination at (dist,0)")
    p.add_argument("--dump-lp", action="store_true", help="also print the flow LP to stderr")

    p = sub.add_parser("optimal", parents=[common], help="edge placement capacity and C* (JSON)")
    p.add_argument("--dist", type=float, help="source-destination distance (default 100)")
    p.add_argument("--eps-rel", type=float, default=EPS_REL,
                   help="relay offset from the end points as a fraction of dist (default 1e-6)")

    p = sub.add_parser("sweep-beta", parents=[common], help="symmetric placement vs beta (CSV)")
    p.add_argument("--dist", type=float, help="source-destination distance (default 200*sqrt(2))")
    p.add_argument("--grid", type=_positive_int, default=99, help="number of beta points (default 99)")
    p.add_argument("--out", help="write <out>.csv and <out>.json instead of printing CSV")

    p = sub.add_parser("compare-line", parents=[common],
                       help="edge placement vs equally spaced line over distance (CSV)")
    p.add_argument("--grid", type=_positive_int, default=23,
                   help="number of distances in [50, 600] (default 23)")
    p.add_argument("--eps-rel", type=float, default=EPS_REL)
    p.add_argument("--out")

    p = sub.add_parser("monte-carlo", parents=[common], help="random relay placements (CSV)")
    p.add_argument("--dist", type=float, help="source-destination distance (default 600*sqrt(2))")
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--eps-rel", type=float, default=EPS_REL)
    p.add_argument("--out")

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--dist", type=float, help="source-destination distance (default 100)")
    p.add_argument("--grid", type=_positive_int, help="points per sweep (suite default if omitted)")
    p.add_argument("--seed", type=_seed, default=0)
    return parser


def _params(args) -> PropagationParams:
    gamma = DEFAULTS[args.command][0] if args.gamma is None else args.gamma
    return PropagationParams(gamma, args.alpha, Mode(args.mode))


def _dist(args) -> float:
    d = DEFAULTS[args.command][1] if getattr(args, "dist", None) is None else args.dist
    if not (math.isfinite(d) and d > 0):
        raise UsageError(f"--dist must be positive, got {d}")
    return d


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(rows, summary, config, out, stdout) -> None:
    if out:
        paths = write_outputs(rows, summary, out, config)
        stdout.write(_dumps({"written": [str(p) for p in paths], "summary": summary}))
    else:
        stdout.write(render_csv(rows))


def _cmd_capacity(args, stdout, stderr) -> int:
    params, d = _params(args), _dist(args)
    topo = Topology((0.0, 0.0), (d, 0.0), tuple(args.relay))
    gm = gain_matrix(topo, params)
    if args.dump_lp:
        stderr.write(build_p1(gm).lp.dump() + "\n")
    res = approx_capacity_p1(gm)
    doc = res.to_dict()
    doc.update({"gamma": params.gamma, "a": params.a, "mode": params.mode.value, "dist": d,
                "relays": [list(r) for r in topo.relays], "all_links_valid": gm.all_valid()})
    stdout.write(_dumps(doc))
    return 0


def _cmd_optimal(args, stdout, stderr) -> int:
    params, d = _params(args), _dist(args)
    topo = make_theorem_topology(d, args.eps_rel)
    cap = approx_capacity_p1(gain_matrix(topo, params)).capacity
    doc = {
        "gamma": params.gamma, "a": params.a, "mode": params.mode.value, "dist": d,
        "eps_rel": args.eps_rel,
        "cstar_bits": cstar(params.with_mode(Mode.APPROX), d),
        "eps_topology_capacity_bits": cap,
        "hypothesis_holds": hypothesis_holds(params, d),
        "relays": [list(r) for r in topo.relays],
    }
    if params.mode is Mode.APPROX:
        doc["closed_form_bits"] = symmetric_closed_form(symmetric_geometry(args.eps_rel, d, params))
    stdout.write(_dumps(doc))
    return 0


def _cmd_sweep_beta(args, stdout, stderr) -> int:
    cfg = ExperimentConfig(_params(args), _dist(args), beta_grid_size=args.grid)
    rows = beta_sweep(cfg)
    _emit(rows, beta_summary(cfg, rows), cfg, args.out, stdout)
    return 0


def _cmd_compare_line(args, stdout, stderr) -> int:
    params = _params(args)
    cfg = ExperimentConfig(params, 600.0, eps_rel=args.eps_rel, d_grid_size=args.grid)
    rows = distance_sweep_compare(cfg)
    _emit(rows, distance_summary(cfg, rows), cfg, args.out, stdout)
    return 0


def _cmd_monte_carlo(args, stdout, stderr) -> int:
    cfg = ExperimentConfig(_params(args), _dist(args), seed=args.seed, samples=args.samples,
                           eps_rel=args.eps_rel)
    rows, summary = monte_carlo(cfg)
    if args.out:
        _emit(rows, summary, cfg, args.out, stdout)
    else:
        stdout.write(render_csv(rows))
        stderr.write(render_json(summary))
    return 0


def _cmd_verify(args, stdout, stderr) -> int:
    checks = run_suite(args.suite, _params(args), _dist(args), n=args.grid, seed=args.seed)
    stdout.write(format_checks(args.suite, checks))
    return 0 if all(c.passed for c in checks) else 1


COMMANDS = {
    "capacity": _cmd_capacity,
    "optimal": _cmd_optimal,
    "sweep-beta": _cmd_sweep_beta,
    "compare-line": _cmd_compare_line,
    "monte-carlo": _cmd_monte_carlo,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(stderr), contextlib.redirect_stdout(stdout):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, stdout, stderr)
    except (UsageError, ParameterError, DomainError, ValueError, OSError) as exc:
        stderr.write(f"one21 {args.command}: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
