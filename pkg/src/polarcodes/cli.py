"""Command-line front end.

Subcommands: ``construct``, ``simulate``, ``verify`` and ``codec``.

Exit codes: 0 success, 1 usage error, 2 contract violation (bad parameters,
size limits, mismatched files), 3 failed verification.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import construct as cons
from .channel import bhattacharyya, channel_from_arg
from .degrade import DEFAULT_BINS, BinningConfig, estimate_all_subchannels
from .errors import InvalidParameterError, PolarError

EXIT_OK, EXIT_USAGE, EXIT_CONTRACT, EXIT_VERIFY = 0, 1, 2, 3
SUITES = ("constants", "contraction", "scaling")
SCALING_GAPS = (0.2, 0.1, 0.05, 0.025)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which collides with our contract code
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def parse_theory_params(text: str) -> cons.TheoryParams:
    """``"rho=0.9,beta=0.3,m=4"``; ``delta`` may replace ``m``."""
    vals: dict[str, str] = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"bad --theory-params entry {part!r}; expected key=value")
        vals[key.strip()] = value.strip()
    unknown = set(vals) - {"rho", "beta", "delta", "m"}
    if unknown or not {"rho", "beta"} <= set(vals):
        raise UsageError("--theory-params takes rho, beta and one of m or delta")
    try:
        return cons.TheoryParams(
            rho=float(vals["rho"]),
            beta=float(vals["beta"]),
            delta=float(vals["delta"]) if "delta" in vals else None,
            m=int(vals["m"]) if "m" in vals else None,
        )
    except ValueError as exc:
        raise UsageError(f"bad --theory-params value: {exc}") from None


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# construct


def cmd_construct(args) -> int:
    ch = channel_from_arg(args.channel)
    cfg = BinningConfig(args.bins)
    n = args.n
    if n < 0:
        raise InvalidParameterError("--n must be non-negative")
    if args.mode == "two-step":
        if args.theory_params is None:
            raise UsageError("--mode two-step needs --theory-params")
        params = parse_theory_params(args.theory_params)
        rp = params.resolve(n)
        if rp.rough_threshold >= 1.0:
            print(f"note: rough threshold 3*rho^m = {rp.rough_threshold:.3g} >= 1 keeps every rough index",
                  file=sys.stderr)
        stats = estimate_all_subchannels(ch, rp.m, cfg)
        spec = cons.construct_two_step(ch, n, params, cfg, stats=stats)
        z_profile = cons.two_step_z_bounds(stats, rp)
    else:
        if args.rate is None:
            raise UsageError(f"--mode {args.mode} needs --rate")
        if args.mode == "bec-exact":
            if not cons.is_erasure_channel(ch):
                raise InvalidParameterError("--mode bec-exact needs an erasure channel")
            stats = cons.bec_exact_stats(bhattacharyya(ch), n)
            spec = cons.construct_bec_exact(bhattacharyya(ch), n, args.rate)
        else:
            stats = cons.sort_stats_for(ch, n, cfg)
            spec = cons.construct_by_sort(stats, args.rate, ch.name)
        z_profile = stats.z_hat
    spec.write(args.out)
    stats_path = args.stats_out or f"{args.out}.stats.csv"
    stats.write_csv(stats_path)
    print(f"code={args.out}")
    print(f"stats={stats_path}")
    print(f"mode={spec.mode}")
    print(f"N={spec.length}")
    print(f"K={spec.dimension}")
    print(f"rate={spec.rate!r}")
    print(f"z_bound={spec.z_bound!r}")
    if args.mode != "two-step":
        # Z_hat of a binned channel need not bound the true Z; sqrt(H_hat) does
        print(f"sqrt_h_bound={float(stats.z_from_entropy[spec.info_indices].sum())!r}")
    if args.figure:
        from .plotting import plot_subchannel_profile

        plot_subchannel_profile(z_profile, spec.info_indices, args.figure, f"{ch.name or args.channel}, n={n}")
        print(f"figure={args.figure}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    from .simulate import simulate

    spec = cons.CodeSpec.read(args.code)
    chan_arg = args.channel or spec.channel
    if not chan_arg:
        raise UsageError("the code file names no channel; pass --channel")
    ch = channel_from_arg(chan_arg)
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    report = simulate(
        spec, ch, args.trials, seed=args.seed, workers=args.workers, chunk=args.chunk,
        allow_mismatch=args.allow_mismatch, record_time=args.timing,
    )
    _emit(report.to_json(), args.out)
    if args.check_bound and args.trials and not report.within_bound:
        print("measured BLER exceeds z_bound + 3 sigma", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _suite_reports(suite: str, args):
    from . import theory

    if suite == "constants":
        return [
            theory.minimize_upsilon(args.grid),
            theory.verify_sqrt3_bound(args.grid + 1),
            theory.verify_entropy_sandwich(args.grid),
            theory.verify_upsilon_regimes(0.1, args.grid),
        ], None
    if suite == "contraction":
        return [
            theory.estimate_contraction(args.samples, seed=args.seed),
            theory.check_entropy_martingale(seed=args.seed + 2),
            theory.rough_polarization_fraction(),
        ], None
    fit = theory.fit_scaling_exponent(channel_from_arg("bec:0.5"), SCALING_GAPS, target_bler=1e-3)
    report = theory.BoundReport(
        "scaling_exponent",
        "informational: slope of log2 N against log2(1/gap)",
        float("nan") if fit.slope is None else fit.slope,
        f"BEC(0.5), gaps {list(SCALING_GAPS)}, target 1e-3",
        True,
        {"informational": True, "complete": fit.complete,
         "table": [[r.epsilon, r.n, r.N] for r in fit.rows]},
    )
    return [report], fit


def cmd_verify(args) -> int:
    suites = args.suite or list(SUITES)
    lines, failed = [], False
    if args.figures:
        Path(args.figures).mkdir(parents=True, exist_ok=True)
    for suite in dict.fromkeys(suites):
        reports, fit = _suite_reports(suite, args)
        for r in reports:
            lines.append(r.to_json())
            failed |= not r.passed
        if fit is not None:
            if args.scaling_csv:
                Path(args.scaling_csv).write_text(fit.to_csv(), encoding="utf-8")
            if args.figures:
                from .plotting import plot_scaling

                plot_scaling(fit, Path(args.figures) / "scaling.png")
    if args.figures and "constants" in suites:
        from .plotting import plot_upsilon

        plot_upsilon(Path(args.figures) / "upsilon.png")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_VERIFY if failed else EXIT_OK


# ---------------------------------------------------------------------------
# codec


def cmd_codec(args) -> int:
    from . import framing

    spec = cons.CodeSpec.read(args.code)
    data = Path(args.input).read_bytes()
    if args.encode:
        out = framing.encode_file(spec, data)
    else:
        chan_arg = args.channel or spec.channel
        if not chan_arg:
            raise UsageError("--channel is required to decode or transmit")
        ch = channel_from_arg(chan_arg)
        if args.transmit:
            out = framing.transmit_file(spec, ch, data, args.seed)
        else:
            out = framing.decode_file(spec, ch, data, args.allow_mismatch)
    Path(args.output).write_bytes(out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polarcodes", description="Polar code construction, simulation and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="choose a frozen set")
    c.add_argument("--channel", required=True, help="bec:p, bsc:p or a channel file")
    c.add_argument("--n", type=int, required=True, help="log2 of the block length")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--rate", type=float)
    g.add_argument("--theory-params", help="rho=..,beta=..,m=.. (or delta=..)")
    c.add_argument("--bins", type=int, default=DEFAULT_BINS)
    c.add_argument("--mode", choices=("sort", "two-step", "bec-exact"), default="sort")
    c.add_argument("--out", default="code.txt")
    c.add_argument("--stats-out", help="defaults to <out>.stats.csv")
    c.add_argument("--figure", help="write the per-index Z profile to this image")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("simulate", help="Monte Carlo block error rate")
    s.add_argument("--code", required=True)
    s.add_argument("--channel", help="defaults to the code's design channel")
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--chunk", type=int, default=2000, help="trials per decoding batch")
    s.add_argument("--out", help="JSON report path (stdout by default)")
    s.add_argument("--allow-mismatch", action="store_true")
    s.add_argument("--timing", action="store_true", help="include wall time in the report")
    s.add_argument("--check-bound", action="store_true", help="exit 3 if BLER > z_bound + 3 sigma")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="numerical checks of the polarization bounds")
    v.add_argument("--suite", action="append", choices=SUITES, help="repeatable; all suites by default")
    v.add_argument("--grid", type=int, default=10**5)
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="JSON lines path (stdout by default)")
    v.add_argument("--scaling-csv")
    v.add_argument("--figures", help="directory for figures")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("codec", help="encode, transmit or decode files")
    mode = k.add_mutually_exclusive_group(required=True)
    mode.add_argument("--encode", action="store_true")
    mode.add_argument("--transmit", action="store_true")
    mode.add_argument("--decode", action="store_true")
    k.add_argument("--code", required=True)
    k.add_argument("--channel")
    k.add_argument("--input", required=True)
    k.add_argument("--output", required=True)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--allow-mismatch", action="store_true")
    k.set_defaults(func=cmd_codec)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"polarcodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PolarError, OSError) as exc:
        print(f"polarcodes: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
