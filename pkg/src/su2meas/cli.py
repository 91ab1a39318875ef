"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 I/O error. Every number printed comes straight from the library.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys

from . import measure, radial, sampler, stats
from .errors import BothZero, ProfileFormatError, SU2MeasError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

SEED_ENV = "SU2MEAS_SEED"

PROFILE_HELP = "radial profile: gaussian | exponential:<rate> | ball:<R> | tabulated:<path> (default: gaussian)"


class _UsageError(Exception):
    pass


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return 0
    try:
        seed = int(env, 0)
    except ValueError:
        raise _UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    if not 0 <= seed < 2**64:
        raise _UsageError(f"{SEED_ENV}={env!r} is not an unsigned 64-bit integer")
    return seed


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _count(text: str) -> int:
    try:
        value = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("count must be at least 1")
    return value


def _measure(profile: str) -> measure.InvariantMeasure:
    # ProfileFormatError and OSError propagate to main
    try:
        prof = radial.parse_profile(profile)
    except ProfileFormatError:
        raise
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    return measure.InvariantMeasure(prof)


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", newline="") as fh:
        yield fh


def _common(p: argparse.ArgumentParser, n_default: int | None) -> None:
    p.add_argument("--profile", default="gaussian", help=PROFILE_HELP)
    p.add_argument("--n", type=_count, default=n_default, help=f"number of points (default: {n_default})")
    p.add_argument("--seed", type=_u64, default=None, help=f"64-bit seed (default: ${SEED_ENV}, else 0)")
    p.add_argument("--out", default=None, help="output path (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="su2meas",
        description="SU(2)-invariant probability measures on C^2: sampling, closed forms and verification.",
        epilog="Exit codes: 0 ok, 1 verification failure, 2 usage/input error, 3 I/O error. Angles in radians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw points from an invariant measure")
    _common(p, 1000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--direct", action="store_true", help="use four independent N(0,1) coordinates instead of --profile")

    p = sub.add_parser("cone", help="probability of the cone psi_lo <= psi <= psi_hi")
    p.add_argument("psi_lo", type=float)
    p.add_argument("psi_hi", type=float)

    p = sub.add_parser("born", help="Born probability a^2/(a^2+b^2) of a|alpha| >= b|beta|")
    p.add_argument("a", type=float)
    p.add_argument("b", type=float)
    p.add_argument("--mc", action="store_true", help="also estimate by Monte Carlo")
    _common(p, 1_000_000)

    p = sub.add_parser("verify", help="run the verification suite, JSON-lines reports")
    _common(p, 100_000)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def cmd_sample(args) -> int:
    seed = _seed(args.seed)
    if args.direct:
        chunks = sampler.iter_gaussian_direct(args.n, seed)
        profile_id = "gaussian-direct"
    else:
        m = _measure(args.profile)
        chunks = sampler.iter_invariant(m, args.n, seed)
        profile_id = m.label()
    with _output(args.out) as out:
        if args.format == "csv":
            sampler.write_csv(chunks, out)
        else:
            pts = [row for chunk in chunks for row in chunk.tolist()]
            doc = {"seed": seed, "profile": profile_id, "generator": sampler.GENERATOR, "points": pts}
            out.write(stats.dumps(doc) + "\n")
    return EXIT_OK


def cmd_cone(args) -> int:
    try:
        psi_set = measure.AngleSet.interval(args.psi_lo, args.psi_hi)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    print(stats.dumps({"measure": measure.cone_measure(None, psi_set)}))
    return EXIT_OK


def cmd_born(args) -> int:
    try:
        p = measure.born_probability(args.a, args.b)
    except (BothZero, ValueError) as exc:
        raise _UsageError(str(exc)) from None
    doc = {"closed_form": p}
    if args.mc:
        seed = _seed(args.seed)
        batch = sampler.sample_invariant(_measure(args.profile), args.n, seed)
        report = stats.estimator_report("born", stats.estimate_born(batch, args.a, args.b), p, args.n)
        doc.update(
            estimate=report.estimate,
            difference=report.statistic,
            threshold=report.threshold,
            n=args.n,
            seed=seed,
            profile=batch.profile_id,
        )
        doc["pass"] = report.passed
    with _output(args.out) as out:
        out.write(stats.dumps(doc) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = _seed(args.seed)
    reports = stats.run_suite(_measure(args.profile), args.n, seed)
    with _output(args.out) as out:
        if args.format == "json":
            stats.write_reports(reports, out)
        else:
            out.write("name,n,statistic,threshold,estimate,target,pass\n")
            for r in reports:
                d = r.to_dict()
                cells = [d["name"], str(d["n"])] + [
                    "" if d[k] is None else format(d[k], ".17g") for k in ("statistic", "threshold", "estimate", "target")
                ]
                out.write(",".join(cells + [str(r.passed).lower()]) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


COMMANDS = {"sample": cmd_sample, "cone": cmd_cone, "born": cmd_born, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except ProfileFormatError as exc:
        print(f"su2meas: bad profile file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (_UsageError, SU2MeasError) as exc:
        print(f"su2meas: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"su2meas: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
