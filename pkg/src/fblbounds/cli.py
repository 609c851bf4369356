"""Command line front end.

Every subcommand writes one table, CSV by default or JSON with
--format json, to stdout or to the path given by --out.  Numeric
columns carry their unit in the header (``_bits``, ``_nats``, ``_db``,
plain counts).  Output is deterministic for a fixed argv and seed; the
default seed is taken from the FBLBOUNDS_SEED environment variable when
set.

Exit codes: 0 on success, 1 on a validation error (bad flags or bad
input files), 2 on a numerical failure (bracket or quantile search did
not converge, Monte-Carlo estimate not certifiable).
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import awgn, bounds, expnoise, mimo, nptest
from .dispersion import (dispersion, gaussian_noise, laplace_noise,
                         load_tabulated_noise, student_t_noise,
                         uniform_noise)
from .numerics import QuantileError

LOG2 = math.log(2.0)
SEED_ENV = "FBLBOUNDS_SEED"


class CliParser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; we want 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _emit(columns, rows, args):
    if args.format == "json":
        records = [{c: (None if isinstance(r.get(c), float)
                        and math.isnan(r.get(c)) else r.get(c))
                    for c in columns} for r in rows]
        text = json.dumps(records, indent=2, sort_keys=False) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_fmt(r.get(c)) for c in columns])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_io_flags(p):
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv",
                   help="output format (default csv)")


def _add_seed_flag(p):
    env = os.environ.get(SEED_ENV)
    default = int(env) if env else 0
    p.add_argument("--seed", type=int, default=default,
                   help=f"RNG seed (default {default}; env {SEED_ENV})")


def _unit_flag(p):
    p.add_argument("--unit", choices=["bits", "nats"], default="bits",
                   help="unit for rate columns (default bits)")


def _conv(nats, unit):
    return nats / LOG2 if unit == "bits" else nats


def _parse_n_list(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"bad blocklength list {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise ValueError("blocklengths must be positive integers")
    return vals


def _load_discrete(args):
    channel = nptest.load_channel(args.channel)
    if args.input:
        p_x = nptest.load_dist(args.input)
    else:
        p_x = nptest.DiscreteDist(
            np.full(channel.n_inputs, 1.0 / channel.n_inputs))
    if args.qy:
        q_y = nptest.load_dist(args.qy)
    else:
        q_y = channel.output_dist(p_x)
    return channel, p_x, q_y


def _cmd_discrete_bb(args):
    channel, p_x, q_y = _load_discrete(args)
    res = bounds.bb_achievability(channel, p_x, q_y, args.eps)
    u = args.unit
    cols = ["eps", f"log_m_{u}", f"rate_{u}_per_use", "tau"]
    rows = [{"eps": args.eps, f"log_m_{u}": _conv(res.log_m, u),
             f"rate_{u}_per_use": _conv(res.rate, u), "tau": res.param}]
    return cols, rows


def _cmd_discrete_converse(args):
    channel, p_x, q_y = _load_discrete(args)
    res = bounds.bb_converse(channel, p_x, q_y, args.eps)
    u = args.unit
    cols = ["eps", f"log_m_{u}", f"rate_{u}_per_use", "delta"]
    rows = [{"eps": args.eps, f"log_m_{u}": _conv(res.log_m, u),
             f"rate_{u}_per_use": _conv(res.rate, u), "delta": res.param}]
    return cols, rows


def _cmd_verify_code(args):
    channel, p_x, q_y = _load_discrete(args)
    tau = args.tau if args.tau is not None else args.eps / 2.0
    trial = bounds.verify_code_existence(channel, p_x, q_y, args.eps, tau,
                                         trials=args.trials, seed=args.seed)
    cols = ["eps", "tau", "size_codewords", "avg_error_prob",
            "trials_used", "found"]
    rows = [{"eps": args.eps, "tau": tau, "size_codewords": trial.m,
             "avg_error_prob": trial.avg_error,
             "trials_used": trial.trials_used, "found": trial.found}]
    return cols, rows


def _cmd_awgn_rate(args):
    if args.power is not None:
        p = args.power
    else:
        p = 10.0 ** (args.snr_db / 10.0)
    u = args.unit
    cols = ["n_uses", "snr_db", "eps", f"rate_ach_{u}_per_use",
            "tau", f"rate_conv_{u}_per_use", "alpha"]
    rows = []
    for n in _parse_n_list(args.n):
        spec = awgn.AwgnSpec(n=n, p=p, eps=args.eps)
        r_ach, tau = awgn.bb_rate_achievability(
            spec, schedule=args.schedule, reference=args.reference)
        r_conv, alpha = awgn.bb_rate_converse(
            spec, schedule=args.schedule, reference=args.reference)
        rows.append({"n_uses": n, "snr_db": 10.0 * math.log10(p),
                     "eps": args.eps,
                     f"rate_ach_{u}_per_use": _conv(r_ach, u), "tau": tau,
                     f"rate_conv_{u}_per_use": _conv(r_conv, u),
                     "alpha": alpha})
    return cols, rows


def _cmd_eb_curves(args):
    if not 0 < args.r_min <= args.r_max:
        raise ValueError("need 0 < r-min <= r-max")
    grid = np.geomspace(args.r_min, args.r_max, args.points)
    recs = awgn.eb_curves(args.k, args.eps, grid, tau_points=args.tau_points)
    cols = ["r_bits_per_use", "n_uses", "eb_ach_db", "eb_conv_db",
            "eb_approx_db"]
    rows = [{"r_bits_per_use": r["r_bits"], "n_uses": args.k / r["r_bits"],
             "eb_ach_db": r["eb_ach_db"], "eb_conv_db": r["eb_conv_db"],
             "eb_approx_db": r["eb_approx_db"]} for r in recs]
    return cols, rows


def _cmd_exp_rate(args):
    u = args.unit
    recs = expnoise.rate_table(args.sigma, args.eps, _parse_n_list(args.n))
    cols = ["n_uses", "sigma", "eps", f"rate_ach_{u}_per_use",
            f"rate_normal_approx_{u}_per_use", f"capacity_{u}_per_use"]
    rows = [{"n_uses": r["n"], "sigma": args.sigma, "eps": args.eps,
             f"rate_ach_{u}_per_use": _conv(r["rate_ach"], u),
             f"rate_normal_approx_{u}_per_use":
                 _conv(r["rate_normal_approx"], u),
             f"capacity_{u}_per_use": _conv(r["capacity"], u)}
            for r in recs]
    return cols, rows


_BUILTIN_NOISE = {
    "gaussian": gaussian_noise,
    "laplace": laplace_noise,
    "uniform": uniform_noise,
    "student-t": student_t_noise,
}


def _cmd_dispersion(args):
    if args.noise in _BUILTIN_NOISE:
        noise = _BUILTIN_NOISE[args.noise]()
    elif os.path.exists(args.noise):
        noise = load_tabulated_noise(args.noise)
    else:
        raise ValueError(
            f"unknown noise {args.noise!r}: expected one of "
            f"{sorted(_BUILTIN_NOISE)} or a path to a tabulated density")
    rep = dispersion(noise, args.power,
                              mc_samples=args.samples, seed=args.seed)
    u = args.unit
    scale = 1.0 / LOG2 if u == "bits" else 1.0
    cols = ["noise", "power", f"mutual_info_{u}_per_use",
            f"dispersion_{u}2_per_use", f"mc_std_err_{u}2_per_use",
            f"correction_c_{u}", "mmse_power", "samples"]
    rows = [{"noise": noise.name, "power": args.power,
             f"mutual_info_{u}_per_use": rep.i_nats * scale,
             f"dispersion_{u}2_per_use": rep.v_nats2 * scale ** 2,
             f"mc_std_err_{u}2_per_use": rep.se_v * scale ** 2,
             f"correction_c_{u}": rep.c * scale,
             "mmse_power": rep.mmse, "samples": rep.samples}]
    return cols, rows


def _cmd_mimo_rate(args):
    rho = 10.0 ** (args.snr_db / 10.0)
    recs = mimo.rate_curve(args.mt, args.mr, args.nc, rho, args.eps,
                           args.n_max, samples=args.samples, seed=args.seed,
                           confidence=args.confidence, tau_points=args.taus)
    u = args.unit
    s = 1.0 if u == "bits" else LOG2
    cols = ["n_uses", f"rate_lower_{u}_per_use", f"ci_radius_{u}_per_use",
            f"rate_point_{u}_per_use", f"normal_approx_{u}_per_use", "tau"]
    rows = [{"n_uses": r["n"],
             f"rate_lower_{u}_per_use": r["rate_bits_lower"] * s,
             f"ci_radius_{u}_per_use": r["ci_radius_bits"] * s,
             f"rate_point_{u}_per_use": r["rate_bits_point"] * s,
             f"normal_approx_{u}_per_use": r["normal_approx_bits"] * s,
             "tau": r["tau"]} for r in recs]
    return cols, rows


def _cmd_props_check(args):
    recs = nptest.run_property_trials(args.trials, args.seed)
    cols = ["property", "trials", "violations", "min_slack"]
    bad = sum(r["violations"] for r in recs)
    if bad:
        raise ValueError(f"{bad} property violations detected")
    return cols, recs


def build_parser():
    parser = CliParser(prog="fblbounds",
                       description="Finite-blocklength channel-coding "
                                   "bounds from ratios of hypothesis-"
                                   "testing error curves.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=CliParser)

    def discrete_common(p):
        p.add_argument("--channel", required=True,
                       help="path to a channel matrix, one row per input")
        p.add_argument("--input", default=None,
                       help="path to input distribution (default uniform)")
        p.add_argument("--qy", default=None,
                       help="path to auxiliary output distribution "
                            "(default induced output)")
        p.add_argument("--eps", type=float, required=True,
                       help="error probability in (0,1)")

    p = sub.add_parser("discrete-bb",
                       help="two-beta achievability on a finite channel")
    discrete_common(p)
    _unit_flag(p)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_discrete_bb)

    p = sub.add_parser("discrete-converse",
                       help="meta-converse on a finite channel")
    discrete_common(p)
    _unit_flag(p)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_discrete_converse)

    p = sub.add_parser("verify-code",
                       help="search random codebooks at the guaranteed size")
    discrete_common(p)
    p.add_argument("--tau", type=float, default=None,
                   help="threshold split in (0, eps) (default eps/2)")
    p.add_argument("--trials", type=int, default=200)
    _add_seed_flag(p)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_verify_code)

    p = sub.add_parser("awgn-rate",
                       help="AWGN achievability and converse rates")
    p.add_argument("--n", required=True,
                   help="comma-separated blocklengths")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--snr-db", type=float, help="SNR in dB")
    g.add_argument("--power", type=float, help="SNR as a linear ratio")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--schedule", action="store_true",
                   help="use the fixed blocklength-dependent tau instead of "
                        "a grid search")
    p.add_argument("--reference", choices=["capacity", "noise"],
                   default="capacity",
                   help="output reference distribution: the capacity-"
                        "achieving output law or the pure noise law")
    _unit_flag(p)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_awgn_rate)

    p = sub.add_parser("eb-curves",
                       help="minimum energy per bit versus rate")
    p.add_argument("--k", type=float, required=True,
                   help="information payload in bits")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--r-min", type=float, required=True,
                   help="smallest rate, bits per use")
    p.add_argument("--r-max", type=float, required=True,
                   help="largest rate, bits per use")
    p.add_argument("--points", type=int, default=12)
    p.add_argument("--tau-points", type=int, default=8)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_eb_curves)

    p = sub.add_parser("exp-rate",
                       help="exponential-noise channel exact bounds")
    p.add_argument("--sigma", type=float, required=True,
                   help="input power constraint (mean amplitude)")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n", required=True, help="comma-separated blocklengths")
    _unit_flag(p)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_exp_rate)

    p = sub.add_parser("dispersion",
                       help="mutual information and dispersion of an "
                            "additive-noise channel")
    p.add_argument("--noise", required=True,
                   help="gaussian | laplace | uniform | student-t | path "
                        "to a tabulated density")
    p.add_argument("--power", type=float, required=True)
    p.add_argument("--samples", type=int, default=10 ** 6)
    _add_seed_flag(p)
    _unit_flag(p)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("mimo-rate",
                       help="Monte-Carlo achievable rates for MIMO block "
                            "fading with receiver side information")
    p.add_argument("--mt", type=int, required=True, help="transmit antennas")
    p.add_argument("--mr", type=int, required=True, help="receive antennas")
    p.add_argument("--nc", type=int, required=True,
                   help="coherence interval in channel uses")
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True,
                   help="largest total blocklength")
    p.add_argument("--samples", type=int, default=10 ** 6)
    p.add_argument("--confidence", type=float, default=0.999)
    p.add_argument("--taus", type=int, default=16,
                   help="size of the threshold-split search grid")
    _add_seed_flag(p)
    _unit_flag(p)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_mimo_rate)

    p = sub.add_parser("props-check",
                       help="randomized checks of the beta inequalities")
    p.add_argument("--trials", type=int, default=1000)
    _add_seed_flag(p)
    _add_io_flags(p)
    p.set_defaults(func=_cmd_props_check)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cols, rows = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"fblbounds: error: {exc}", file=sys.stderr)
        return 1
    except (QuantileError, awgn.BracketError, mimo.EstimateError,
            FloatingPointError) as exc:
        print(f"fblbounds: numerical failure: {exc}", file=sys.stderr)
        return 2
    _emit(cols, rows, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
