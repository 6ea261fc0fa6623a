"""Command-line interface.

Subcommands: chain, moments, ladder, identity, zeros, zeta-eval.  Common
flags override the config file; the config file mirrors RunConfig field
names (unknown keys are errors).
"""

import argparse
import dataclasses
import json
import sys

import numpy as np

from zetalab.config import RunConfig, load_config
from zetalab.errors import ZetalabError
from zetalab.experiment import (run_chain_experiment, run_identity_sweep,
                                run_moment_check, run_rate_ladder,
                                write_chain_csv, write_gnuplot_script,
                                write_identity_csv)
from zetalab.zeta import EMConfig, SPoint, find_zeros, zeta


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="config file path")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")
    common.add_argument("--samples", type=int, default=None, help="sample count")
    common.add_argument("--t", type=float, default=None, help="base height T")
    common.add_argument("--out", type=str, default=None, help="output path")
    common.add_argument("--threads", type=int, default=None, help="worker threads")
    common.add_argument("--normalization", choices=("paper", "variance"), default=None)
    common.add_argument("--plot", action="store_true", help="emit a gnuplot script")

    parser = argparse.ArgumentParser(
        prog="zetalab",
        description="Desk-scale measurements of the Gaussian approximation "
                    "chain for log|zeta(1/2+it)|")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("chain", parents=[common], help="run the five-stage chain experiment")
    sub.add_parser("moments", parents=[common], help="three-way moment comparison")
    ladder = sub.add_parser("ladder", parents=[common], help="chain experiment over a T ladder")
    ladder.add_argument("--t-values", type=str, default=None,
                        help="comma-separated T values")
    identity = sub.add_parser("identity", parents=[common],
                              help="identity residual sweep + off-axis mean")
    zeros = sub.add_parser("zeros", parents=[common], help="critical-line zero scan")
    zeros.add_argument("--t-min", type=float, required=True)
    zeros.add_argument("--t-max", type=float, required=True)
    zeros.add_argument("--resolution", type=float, default=None)
    ze = sub.add_parser("zeta-eval", parents=[common], help="evaluate zeta at one point")
    ze.add_argument("--sigma", type=float, required=True)
    ze.add_argument("--terms", type=int, default=0)
    ze.add_argument("--order", type=int, default=12)
    return parser


def _load(args):
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.samples is not None:
        overrides["samples"] = args.samples
    if args.t is not None and args.command != "zeta-eval":
        overrides["T"] = args.t
    if args.out is not None:
        overrides["out"] = args.out
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.normalization is not None:
        overrides["normalization"] = args.normalization
    if args.plot:
        overrides["plot"] = True
    if getattr(args, "resolution", None) is not None:
        overrides["zero_resolution"] = args.resolution
    if getattr(args, "t_values", None) is not None:
        overrides["t_values"] = tuple(float(v) for v in args.t_values.split(","))
    return dataclasses.replace(config, **overrides)


def _cmd_chain(config):
    report = run_chain_experiment(config)
    out = config.out or "chain.csv"
    write_chain_csv([report], out)
    with open(out + ".json", "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
    if config.plot:
        write_gnuplot_script(out, "chain")
    print(f"chain: {config.samples} samples at T={config.T:g} -> {out}")
    print(f"  d(P12,Z)={report.d_p12_z:.6f}  d(V,Z)={report.d_v_z_direct:.6f}  "
          f"sum={report.d_sum:.6f}  status={report.status}")
    return 0


def _cmd_moments(config):
    result = run_moment_check(config)
    out = config.out or "moments.json"
    with open(out, "w") as fh:
        json.dump(result.to_json_dict(), fh, indent=2)
    for r in result.reports:
        flag = "  [regime flagged]" if r.regime_flag else ""
        print(f"k={r.k}: closed={r.closed_form:.6g} phase={r.random_phase:.6g} "
              f"empirical={r.empirical:.6g} gap={r.gap_cf_emp:.3%}{flag}")
    print(f"moments -> {out}")
    return 0


def _cmd_ladder(config):
    reports, diagnostics = run_rate_ladder(config)
    out = config.out or "ladder.csv"
    write_chain_csv(reports, out)
    if config.plot:
        write_gnuplot_script(out, "ladder")
    print(f"ladder: {diagnostics['ok_rows']}/{diagnostics['rows']} rows ok -> {out}")
    print(f"  spearman sign d(P12,Z) vs cutoff: "
          f"{diagnostics['gaussian_stage_vs_cutoff_spearman_sign']}")
    return 0


def _cmd_identity(config):
    result = run_identity_sweep(config)
    out = config.out or "identity.csv"
    write_identity_csv(result, out)
    if config.plot:
        write_gnuplot_script(out, "identity")
    print(f"identity: max residual {result.max_residual:.6g} over "
          f"{result.ts.size} points -> {out}")
    print(f"  off-axis mean {result.off_axis_mean:.6g} "
          f"(reference {result.off_axis_reference:.6g}, "
          f"excluded {result.off_axis_excluded}/{result.samples})")
    return 0


def _cmd_zeros(config, args):
    cfg = EMConfig(terms=config.em_terms, bernoulli_order=config.bernoulli_order,
                   error_budget=config.error_budget)
    zl = find_zeros(args.t_min, args.t_max, cfg, resolution=config.zero_resolution)
    out = config.out or "zeros.txt"
    zl.save(out)
    print(f"zeros: {zl.ordinates.size} ordinates in ({args.t_min:g}, {args.t_max:g}) "
          f"-> {out} (count check {'ok' if zl.count_ok else 'FLAGGED'}, "
          f"expected {zl.expected_count:.2f})")
    return 0


def _cmd_zeta_eval(config, args):
    cfg = EMConfig(terms=args.terms, bernoulli_order=args.order,
                   error_budget=config.error_budget)
    t = args.t if args.t is not None else 0.0
    val = zeta(SPoint(args.sigma, t), cfg)
    print(f"zeta({args.sigma:g} + {t:g}i) = {val.value.real:.12g} "
          f"{'+' if val.value.imag >= 0 else '-'} {abs(val.value.imag):.12g}i "
          f"(bound {val.bound:.3g})")
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "zeta-eval":
            config = load_config(args.config) if args.config else RunConfig()
            return _cmd_zeta_eval(config, args)
        config = _load(args)
        if args.command == "chain":
            return _cmd_chain(config)
        if args.command == "moments":
            return _cmd_moments(config)
        if args.command == "ladder":
            return _cmd_ladder(config)
        if args.command == "identity":
            return _cmd_identity(config)
        if args.command == "zeros":
            return _cmd_zeros(config, args)
    except ZetalabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
