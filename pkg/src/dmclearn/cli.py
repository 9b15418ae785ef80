"""Command-line surface: every calculator and experiment, CSV + manifest out.

Channel files are UTF-8 JSON objects {x_labels, y_labels, p, w}; metric
files are {k}.  Every command that writes outputs also writes a
<output>.manifest.json sufficient to reproduce the run bit-exactly.

Exit codes: 0 success, 2 validation/parse error, 3 solver non-certification,
4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import __version__, example_channel
from .core import Channel, DecodingMetric, Pmf, ValidationError
from .infotheory import mutual_information
from .lmrate import SolveStatus, SolverConfig, lm_rate
from .learners import (
    adversarial_channel,
    optimal_alpha,
    plug_in,
    plugin_zero_rate_bound,
    virtual_sample,
    vsa_sample_size,
)
from .exactdist import composition_count, exact_rate_pmf
from .montecarlo import (
    DEFAULT_EXACT_CAP,
    RNG_ALGORITHM,
    ExperimentSpec,
    run_vsa_sweep,
    run_vsee_trials,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NOT_CERTIFIED = 3
EXIT_CAP = 4

BUILTIN_CHANNEL = "example-2x3"

SWEEP_ALPHAS = [0.5, 0.5325, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95]


class CliError(Exception):
    def __init__(self, message, code=EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    """Rates and probabilities with 9 significant digits, '.' separator."""
    return format(float(x), ".9g")


def load_channel(spec: str) -> tuple[Pmf, Channel]:
    if spec == BUILTIN_CHANNEL:
        return example_channel()
    try:
        with open(spec, encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise CliError(f"cannot read channel file {spec}: {e}")
    except json.JSONDecodeError as e:
        raise CliError(f"{spec}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    try:
        p = Pmf.from_probs(doc["p"])
        w = Channel.from_rows(doc["w"])
    except KeyError as e:
        raise CliError(f"{spec}: missing field {e}")
    except ValidationError as e:
        raise CliError(f"{spec}: {e}")
    if p.alphabet.size != w.input.size:
        raise CliError(f"{spec}: p has {p.alphabet.size} entries but w has {w.input.size} rows")
    return p, w


def load_metric(spec: str, w: Channel) -> DecodingMetric:
    if spec == "ml":
        return DecodingMetric(w.input, w.output, np.array(w.rows))
    try:
        with open(spec, encoding="utf-8") as f:
            doc = json.load(f)
        return DecodingMetric.from_values(doc["k"])
    except OSError as e:
        raise CliError(f"cannot read metric file {spec}: {e}")
    except json.JSONDecodeError as e:
        raise CliError(f"{spec}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    except KeyError as e:
        raise CliError(f"{spec}: missing field {e}")
    except ValidationError as e:
        raise CliError(f"{spec}: {e}")


def parse_learner(spec: str):
    """'plugin' or 'vsa:ALPHA' -> (name, exchangeable learner callable)."""
    if spec == "plugin":
        return spec, plug_in
    if spec.startswith("vsa:"):
        try:
            alpha = float(spec.split(":", 1)[1])
        except ValueError:
            raise CliError(f"bad learner spec {spec!r}: expected vsa:<alpha>")
        return spec, lambda s: virtual_sample(s, alpha)
    raise CliError(f"unknown learner {spec!r}: expected 'plugin' or 'vsa:<alpha>'")


def write_manifest(out_path: str, args: argparse.Namespace, started: float, extra=None):
    doc = {
        "command": args.command,
        "parameters": {
            k: v for k, v in sorted(vars(args).items()) if k not in ("command", "func")
        },
        "rng_algorithm": RNG_ALGORITHM,
        "tool_version": __version__,
        "wall_time_seconds": round(time.time() - started, 3),
    }
    if extra:
        doc.update(extra)
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def write_csv(path: str, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_lmrate(args) -> int:
    p, w = load_channel(args.channel)
    k = load_metric(args.metric, w)
    cfg = SolverConfig(gap_tol=args.gap_tol, feas_tol=args.feas_tol, max_iter=args.max_iter)
    cert = lm_rate(p, w, k, cfg)
    print(f"lm_rate_bits   {fmt(cert.value)}")
    print(f"dual_bound_bits {fmt(cert.dual_value)}")
    print(f"gap_bits       {fmt(cert.gap)}")
    print(f"status         {cert.status.value}")
    return EXIT_OK if cert.status is not SolveStatus.ITERATION_LIMIT else EXIT_NOT_CERTIFIED


def cmd_exact_cdf(args) -> int:
    started = time.time()
    p, w = load_channel(args.channel)
    j = p.alphabet.size * w.output.size
    count = composition_count(args.n, j)
    if count > args.cap:
        raise CliError(
            f"{count} count tables exceed the cap of {args.cap}; "
            f"raise --cap or lower --n",
            code=EXIT_CAP,
        )
    _, learner = parse_learner(args.learner)
    pmf = exact_rate_pmf(learner, p, w, args.n)
    cum = 0.0
    rows = []
    for rate, prob in zip(pmf.rates, pmf.probs):
        cum += prob
        rows.append([fmt(rate), fmt(prob), fmt(cum)])
    write_csv(args.out, ["rate_bits", "prob", "cdf"], rows)
    write_manifest(
        args.out, args, started,
        {"mutual_information_bits": fmt(mutual_information(p, w)),
         "uncertified_prob": fmt(pmf.failed_prob)},
    )
    print(f"wrote {args.out} ({len(rows)} atoms over {count} count tables)")
    return EXIT_OK if pmf.failed_prob == 0.0 else EXIT_NOT_CERTIFIED


def cmd_alpha_sweep(args) -> int:
    started = time.time()
    p, w = load_channel(args.channel)
    alphas = [float(a) for a in args.alphas.split(",")] if args.alphas else SWEEP_ALPHAS
    spec = ExperimentSpec(
        p=p, w=w, n=args.n, trials=args.trials, seed=args.seed, epsilon=args.epsilon
    )
    points = run_vsa_sweep(spec, alphas, exact_cap=args.cap)
    write_csv(
        args.out,
        ["alpha", "success_prob", "mode", "std_error"],
        [[fmt(pt.alpha), fmt(pt.success_prob), pt.mode, fmt(pt.std_error)] for pt in points],
    )
    write_manifest(
        args.out, args, started,
        {"mutual_information_bits": fmt(mutual_information(p, w))},
    )
    print(f"wrote {args.out} ({len(points)} alphas)")
    return EXIT_OK


def cmd_vsee_mc(args) -> int:
    started = time.time()
    p, w = load_channel(args.channel)
    spec = ExperimentSpec(
        p=p, w=w, n=args.n, trials=args.trials, seed=args.seed,
        epsilon=args.epsilon, alpha=args.alpha, beta=args.beta,
    )
    records = run_vsee_trials(spec)
    write_csv(
        args.out,
        ["trial", "lm_rate_bits", "R_bits", "success", "certified"],
        [
            [r.trial, fmt(r.lm_rate), fmt(r.rate), int(r.success), int(r.certified)]
            for r in records
        ],
    )
    mi = mutual_information(p, w)
    successes = sum(r.success for r in records)
    uncertified = sum(not r.certified for r in records)
    write_manifest(
        args.out, args, started,
        {
            "mutual_information_bits": fmt(mi),
            "success_threshold_bits": fmt(mi - args.epsilon),
            "success_fraction": fmt(successes / len(records)),
            "uncertified_trials": uncertified,
        },
    )
    print(f"wrote {args.out}: {successes}/{len(records)} successes, {uncertified} uncertified")
    return EXIT_OK if uncertified == 0 else EXIT_NOT_CERTIFIED


def cmd_sample_size(args) -> int:
    try:
        alpha, nu = optimal_alpha(args.epsilon, args.delta, args.x_size, args.y_size)
    except ValidationError as e:
        raise CliError(str(e))
    j = args.x_size * args.y_size
    zeta = math.log(j / (args.epsilon * math.log(2)))
    eta = math.log(0.5 * math.log(j / args.delta))
    print(f"zeta           {fmt(zeta)}")
    print(f"eta            {fmt(eta)}")
    print(f"alpha_star     {fmt(alpha)}")
    print(f"nu_alpha       {fmt(nu)}")
    print(f"sample_size    {vsa_sample_size(alpha, args.epsilon, args.delta, args.x_size, args.y_size)}")
    return EXIT_OK


def cmd_adversary(args) -> int:
    try:
        p, w, tau = adversarial_channel(args.epsilon, args.delta, args.n)
    except ValidationError as e:
        raise CliError(str(e))
    bound = plugin_zero_rate_bound(p.prob[0], tau, args.n)
    print(f"tau            {fmt(tau)}")
    print(f"p              {[fmt(v) for v in p.prob]}")
    for x in range(w.input.size):
        print(f"w[{x}]           {[fmt(v) for v in w.rows[x]]}")
    print(f"mutual_information_bits {fmt(mutual_information(p, w))}")
    print(f"plugin_zero_rate_bound  {fmt(bound)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmclearn",
        description="Learn decoding metrics and code rates for unknown DMCs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_channel(sp):
        sp.add_argument(
            "--channel",
            default=BUILTIN_CHANNEL,
            help=f"channel JSON file or the built-in '{BUILTIN_CHANNEL}'",
        )

    sp = sub.add_parser("lmrate", help="certified LM rate of a channel/metric pair")
    add_channel(sp)
    sp.add_argument("--metric", default="ml", help="metric JSON file or 'ml'")
    sp.add_argument("--gap-tol", type=float, default=1e-6)
    sp.add_argument("--feas-tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=10000)
    sp.set_defaults(func=cmd_lmrate)

    sp = sub.add_parser("exact-cdf", help="exact CDF of the LM rate of a learner")
    add_channel(sp)
    sp.add_argument("--learner", required=True, help="'plugin' or 'vsa:<alpha>'")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--cap", type=int, default=DEFAULT_EXACT_CAP)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_exact_cdf)

    sp = sub.add_parser("alpha-sweep", help="success probability per smoothing exponent")
    add_channel(sp)
    sp.add_argument("--n", type=int, default=12)
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--alphas", default="", help="comma-separated; default standard grid")
    sp.add_argument("--trials", type=int, default=10000, help="Monte Carlo trials above cap")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--cap", type=int, default=DEFAULT_EXACT_CAP)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_alpha_sweep)

    sp = sub.add_parser("vsee-mc", help="Monte Carlo VSEE trials (metric + rate)")
    add_channel(sp)
    sp.add_argument("--n", type=int, default=3500)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--alpha", type=float, default=0.5325)
    sp.add_argument("--beta", type=float, default=0.45)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_vsee_mc)

    sp = sub.add_parser("sample-size", help="worst-case sample size rule of thumb")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--x-size", type=int, required=True)
    sp.add_argument("--y-size", type=int, required=True)
    sp.set_defaults(func=cmd_sample_size)

    sp = sub.add_parser("adversary", help="channel on which plug-in learners fail")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_adversary)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
