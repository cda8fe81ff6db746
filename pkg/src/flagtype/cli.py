"""Command-line front end: decompose, estimate, sl2-cone.

Exit codes: 0 success, 2 parse failure, 3 validation failure,
4 estimation finished with at least one inconclusive root, 5 numeric
failure (including violated hard bounds).
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .config import parse_config_file
from .errors import (
    ConfigError,
    DimensionMismatch,
    FlagTypeError,
    ValidationError,
)
from .estimator import INCONCLUSIVE, estimate_flag_type
from .group import iwasawa_decompose, standard_flag
from .cocycles import rho_log
from .reports import render_json, report_payload, write_report
from .roots import RootDatum
from . import sl2demo

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INCONCLUSIVE = 4
EXIT_NUMERIC = 5


def _say(args, *parts):
    if not args.quiet:
        print(*parts)


def _read_matrix_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read %s: %s" % (path, exc))
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.replace(",", " ").split()
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            raise ConfigError("matrix row is not numeric: %r" % line, lineno)
    if not rows:
        raise ConfigError("no matrix rows in %s" % path)
    widths = {len(r) for r in rows}
    if len(widths) != 1 or len(rows) != widths.pop():
        raise ConfigError("matrix in %s is not square" % path)
    return np.asarray(rows)


def _fmt_matrix(m):
    return "\n".join(
        "  " + " ".join("% .12f" % v for v in row) for row in np.asarray(m)
    )


def cmd_decompose(args):
    m = _read_matrix_file(args.matrix)
    factors = iwasawa_decompose(m)
    residual = factors.residual(m)
    _say(args, "k =")
    _say(args, _fmt_matrix(factors.k))
    _say(args, "H =")
    _say(args, "  " + " ".join("%.17g" % v for v in factors.H))
    _say(args, "n_u =")
    _say(args, _fmt_matrix(factors.n_u))
    print("reconstruction residual = %.3e" % residual)
    return EXIT_OK


def cmd_estimate(args):
    cfg = parse_config_file(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.samples is not None:
        cfg.sampling = replace(cfg.sampling, samples_per_length=args.samples)
    spec = cfg.to_spec()
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(out_dir, "%s_report.json" % cfg.out_stem)
    csv_path = os.path.join(out_dir, "%s_curves.csv" % cfg.out_stem)
    try:
        report = estimate_flag_type(
            spec, cfg.sampling, cfg.seed, cfg.thresholds
        )
    except FlagTypeError as exc:
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(render_json({"error": str(exc), "tool": "flagtype"}))
        raise
    write_report(report, json_path, csv_path, cfg, __version__)
    names = ", ".join("alpha_%d" % i for i in sorted(report.theta_hat.indices))
    print("theta_hat = {%s}" % names)
    for i in sorted(report.decisions):
        _say(
            args,
            "  alpha_%d: %s (slope %.3g, final %.3g)"
            % (
                i,
                report.decisions[i],
                report.stats[i].get("slope", float("nan")),
                report.stats[i].get("final_min", float("nan")),
            ),
        )
    _say(args, "report: %s" % json_path)
    _say(args, "curves: %s" % csv_path)
    if report.inconclusive_roots():
        print(
            "inconclusive roots: %s"
            % ", ".join("alpha_%d" % i for i in report.inconclusive_roots())
        )
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_sl2_cone(args):
    t_values = [float(t) for t in args.t_values.split(",") if t.strip()]
    members = sl2demo.sample_members(args.samples, args.seed)
    norms = sl2demo.first_column_norms(members)
    mn = float(norms.min())
    print(
        "min ||g(1,0)|| over %d members = %.12f (bound 0.5)" % (len(norms), mn)
    )
    if mn < 0.5 - 1e-12:
        print("HARD BOUND VIOLATED")
        return EXIT_NUMERIC
    datum = RootDatum(2)
    mu1 = datum.fundamental_weight(1)
    distances = [0.3, 0.1, 0.03, 0.01, 0.003, 0.001]
    rows = []
    _say(args, "")
    _say(args, "%8s %10s %18s %18s" % ("t", "distance", "value", "exp(-2t)"))
    worst_formula = 0.0
    for t in t_values:
        g = sl2demo.h_t(t)
        limit = float(np.exp(-2.0 * t))
        for d in distances:
            z = sl2demo.boundary_line_flag(d)
            value = float(np.exp(2.0 * rho_log(mu1, g, z)))
            formula = sl2demo.alpha_value_along_h(t, z)
            worst_formula = max(worst_formula, abs(value - formula))
            rows.append((t, d, value, limit))
            _say(args, "%8.3f %10.4g %18.12f %18.12f" % (t, d, value, limit))
    print("max |value - closed form| = %.3e" % worst_formula)
    ut = sl2demo.sample_upper_triangular_members(10000, args.seed + 1)
    x0 = standard_flag(2)
    ut_logs = np.array([rho_log(mu1, g, x0) for g in ut])
    print(
        "fixer bound: min log rho_mu1 over %d upper-triangular members = %.3e"
        % (len(ut), float(ut_logs.min()))
    )
    if ut_logs.min() < -1e-12:
        print("HARD BOUND VIOLATED")
        return EXIT_NUMERIC
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        path = os.path.join(args.out_dir, "sl2_cone_table.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,distance,value,limit\n")
            for t, d, v, lim in rows:
                fh.write("%.17g,%.17g,%.17g,%.17g\n" % (t, d, v, lim))
        _say(args, "table: %s" % path)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="flagtype",
        description="Iwasawa cocycles and empirical flag types for SL(n,R) semigroups",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="print the KAN factors of a matrix file")
    p.add_argument("matrix", help="text file, one matrix row per line")
    p.add_argument("--quiet", "-q", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("estimate", help="estimate the flag type from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument(
        "--samples", type=int, default=None, help="override samples_per_length"
    )
    p.add_argument("--out-dir", default=None)
    p.add_argument("--quiet", "-q", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser(
        "sl2-cone", help="run the rank-one cone worked example end to end"
    )
    p.add_argument("--t-values", default="0.5,1,2")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--quiet", "-q", action="store_true")
    p.set_defaults(func=cmd_sl2_cone)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except (DimensionMismatch, ValidationError) as exc:
        print("validation error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except FlagTypeError as exc:
        print("numeric failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
