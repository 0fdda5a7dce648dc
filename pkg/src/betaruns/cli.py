"""Batch command-line surface.

Commands are deterministic given their flags: seeds default to 0, never to
wall-clock entropy, and repeated runs produce byte-identical output.  Exit
codes: 0 all checks pass, 2 a check failed, 3 the schedule search was
infeasible, 4 an enumeration or size budget was exceeded, 5 usage or parse
error.

Reports are written as CSV (header row) or JSON (stable key order); the
optional --plot flag renders a PNG figure next to the delimited output.
Digit streams are written as framed binary chunks of 2**20 digits with a
JSON manifest carrying a 64-bit FNV-1a digest per chunk.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .field import BetaContext, BudgetExceededError, SpecError, make_beta
from .expansion import DigitWord, digit_stream, evaluate
from .cylinders import InadmissibleWordError, census, enumerate_words
from .constructions import (
    CheckpointReport,
    EpSchedule,
    InfeasibleScheduleError,
    build_ep_schedule,
    build_u_schedule,
    ep_stream,
    parse_rate,
    u_stream,
    verify_ep_checkpoints,
    verify_u_checkpoints,
)
from .analysis import assign_mass, local_dimension_profile, mc_law, verify_counts

EXIT_OK = 0
EXIT_CHECK = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4
EXIT_USAGE = 5

CHUNK_DIGITS = 1 << 20

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _csv_text(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    for row in rows:
        buf.write(",".join(row))
        buf.write("\n")
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"cannot parse rational {text!r}: {exc}") from None


def _parse_band(text: str) -> tuple[Fraction, Fraction]:
    try:
        lo_s, hi_s = text.split(",")
        lo, hi = Fraction(lo_s), Fraction(hi_s)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"band must be 'lo,hi', got {text!r}") from None
    if not lo < hi:
        raise SpecError("empty acceptance band")
    return lo, hi


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--beta", required=True, help="base: name, p/q, or poly:coeffs@lo,hi")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--seed", type=int, default=0, help="64-bit unsigned seed (default 0)")
    sub.add_argument("--out", default="-", help="output path, or - for stdout")
    sub.add_argument("--plot", default=None, help="also render a PNG figure to this path")


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 1 << 64:
        raise SpecError("seed must fit in 64 unsigned bits")
    return seed


def build_parser() -> _Parser:
    parser = _Parser(prog="betaruns", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p_expand = subs.add_parser("expand", help="digits of one point, with the remainder identity check")
    _common_flags(p_expand)
    p_expand.add_argument("--x", required=True, help="point in [0,1] as a rational, e.g. 3/8")
    p_expand.add_argument("--digits", type=int, required=True)

    p_census = subs.add_parser("census", help="admissible-word counts and bound checks per order")
    _common_flags(p_census)
    p_census.add_argument("--n", type=int, required=True)
    p_census.add_argument("--full-only", action="store_true", help="list the full words of order n instead")
    p_census.add_argument("--budget", type=int, default=2_000_000)

    p_con = subs.add_parser("construct", help="build a schedule, stream digits, verify checkpoints")
    p_con.add_argument("kind", choices=("ep", "u"))
    _common_flags(p_con)
    p_con.add_argument("--p", type=int, default=3, help="sparseness parameter (ep)")
    p_con.add_argument("--phi", default="sqrt", help="rate function")
    p_con.add_argument("--levels", type=int, default=2, help="schedule levels (ep)")
    p_con.add_argument("--stages", type=int, default=1, help="construction stages (u)")
    p_con.add_argument("--prefix", default="1", help="comma-separated admissible prefix (u)")
    p_con.add_argument("--max-digits", type=int, default=1_000_000, help="materialization cap for the stream file")

    p_mc = subs.add_parser("mc", help="Monte Carlo run-length law check")
    _common_flags(p_mc)
    p_mc.add_argument("--n", type=int, required=True)
    p_mc.add_argument("--samples", type=int, required=True)
    p_mc.add_argument("--mode", choices=("exact", "direct-bits"), default="exact")
    p_mc.add_argument("--band", default="0.85,1.2", help="acceptance band lo,hi for the mean ratio")

    p_an = subs.add_parser("analyze", help="counts, cover exponents, and the mass profile of a schedule")
    _common_flags(p_an)
    p_an.add_argument("--schedule", required=True, help="schedule JSON written by construct ep")
    p_an.add_argument("--k", type=int, default=None, help="deepest level to analyze")
    p_an.add_argument("--points", default=None, help="comma-separated profile depths")

    return parser


# ---------------------------------------------------------------------------
# Commands.

def _cmd_expand(args) -> int:
    ctx = make_beta(args.beta)
    if args.digits < 1:
        raise SpecError("need at least one digit")
    x_frac = _parse_fraction(args.x)
    if not 0 <= x_frac <= 1:
        raise SpecError("x must lie in [0, 1]")
    x = ctx.lift(x_frac)
    stream = digit_stream(x)
    digits = stream.take(args.digits)
    n = len(digits)
    # remainder identity: x - value(prefix) = beta^-n * T^n x, in (0, beta^-n] for x > 0
    prefix_value = evaluate(ctx, digits)
    remainder = x - prefix_value
    scale = ctx.beta_inv ** n
    if x_frac == 0:
        identity_ok = remainder.is_zero
        range_ok = True
    else:
        identity_ok = remainder == scale * stream.orbit
        range_ok = remainder.compare(0) > 0 and remainder.compare(scale) <= 0
    if args.format == "csv":
        rows = [["position", "digit"]] + [[str(i + 1), str(d)] for i, d in enumerate(digits)]
        _emit(args.out, _csv_text(rows))
    else:
        _emit(
            args.out,
            _json_text(
                {
                    "beta": ctx.describe(),
                    "x": str(x_frac),
                    "digits": ",".join(str(d) for d in digits),
                    "remainder_identity_ok": identity_ok,
                    "remainder_in_range": range_ok,
                }
            ),
        )
    print(
        f"remainder identity {'verified' if identity_ok and range_ok else 'FAILED'} at n={n}",
        file=sys.stderr,
    )
    if args.plot:
        from . import figures

        lo, hi = ctx.enclosure()
        figures.expansion_figure(args.plot, ctx.describe(), digits, float((lo + hi) / 2))
    return EXIT_OK if identity_ok and range_ok else EXIT_CHECK


def _cmd_census(args) -> int:
    ctx = make_beta(args.beta)
    if args.n < 1:
        raise SpecError("order must be positive")
    if args.full_only:
        one = ctx.one
        words = [w for w, R in enumerate_words(ctx, args.n, budget=args.budget) if R == one]
        if args.format == "csv":
            rows = [["word"]] + [[" ".join(str(d) for d in w)] for w in words]
            _emit(args.out, _csv_text(rows))
        else:
            _emit(
                args.out,
                _json_text(
                    {
                        "beta": ctx.describe(),
                        "n": args.n,
                        "full_words": [",".join(str(d) for d in w) for w in words],
                    }
                ),
            )
        return EXIT_OK
    records = [census(ctx, m, budget=args.budget) for m in range(1, args.n + 1)]
    ok = all(rec.all_ok for rec in records)
    if args.format == "csv":
        rows = [["n", "count", "full_count", "lower_bound_ok", "upper_bound_ok", "pigeonhole_ok"]]
        for rec in records:
            rows.append(
                [
                    str(rec.n),
                    str(rec.count),
                    str(rec.full_count),
                    str(rec.lower_bound_ok).lower(),
                    str(rec.upper_bound_ok).lower(),
                    str(rec.pigeonhole_ok).lower(),
                ]
            )
        _emit(args.out, _csv_text(rows))
    else:
        _emit(
            args.out,
            _json_text(
                {
                    "beta": ctx.describe(),
                    "rows": [
                        {
                            "n": rec.n,
                            "count": rec.count,
                            "full_count": rec.full_count,
                            "lower_bound_ok": rec.lower_bound_ok,
                            "upper_bound_ok": rec.upper_bound_ok,
                            "pigeonhole_ok": rec.pigeonhole_ok,
                        }
                        for rec in records
                    ],
                }
            ),
        )
    if args.plot:
        from . import figures

        figures.census_figure(args.plot, ctx.describe(), records)
    return EXIT_OK if ok else EXIT_CHECK


def _write_stream_files(out_dir: Path, ctx: BetaContext, digits_iter, limit: int) -> list[dict]:
    chunks = []
    index = 0
    buf = bytearray()
    emitted = 0
    for d in digits_iter:
        if emitted >= limit:
            break
        buf.append(d)
        emitted += 1
        if len(buf) == CHUNK_DIGITS:
            name = f"stream-{index:06d}.bin"
            (out_dir / name).write_bytes(bytes(buf))
            chunks.append({"index": index, "file": name, "length": len(buf), "digest": f"0x{fnv1a64(bytes(buf)):016x}"})
            index += 1
            buf.clear()
    if buf:
        name = f"stream-{index:06d}.bin"
        (out_dir / name).write_bytes(bytes(buf))
        chunks.append({"index": index, "file": name, "length": len(buf), "digest": f"0x{fnv1a64(bytes(buf)):016x}"})
    return chunks


def _write_checkpoint_report(out_dir: Path, report: CheckpointReport, fmt: str) -> None:
    (out_dir / "checkpoints.csv").write_text(_csv_text(report.csv_rows()))
    (out_dir / "checkpoints.json").write_text(_json_text(report.to_json_dict()))


def _cmd_construct(args) -> int:
    ctx = make_beta(args.beta)
    seed = _check_seed(args.seed)
    rate = parse_rate(args.phi, ctx)
    if args.out == "-":
        raise SpecError("construct writes multiple files; pass --out DIRECTORY")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.kind == "ep":
        sched = build_ep_schedule(ctx, args.p, rate, args.levels)
        stream = ep_stream(sched, seed)
        report = verify_ep_checkpoints(stream)
        sched_json = sched.to_json_dict()
        digits_iter = stream.digits()
    else:
        prefix = DigitWord.parse(ctx, args.prefix)
        if args.stages < 1:
            raise SpecError("need at least one stage")
        sched = build_u_schedule(ctx, prefix.digits, rate)
        stream = u_stream(sched, args.stages)
        report = verify_u_checkpoints(stream)
        sched_json = sched.to_json_dict(args.stages)
        digits_iter = stream.digits()
    (out_dir / "schedule.json").write_text(_json_text(sched_json))
    chunks = _write_stream_files(out_dir, ctx, digits_iter, args.max_digits)
    manifest = {
        "beta": ctx.describe(),
        "schedule": "schedule.json",
        "seed": seed,
        "chunks": chunks,
    }
    (out_dir / "manifest.json").write_text(_json_text(manifest))
    _write_checkpoint_report(out_dir, report, args.format)
    if args.plot:
        from . import figures

        figures.checkpoint_figure(args.plot, report)
    print(f"{args.kind} construction in {out_dir}: checkpoints {'pass' if report.all_pass else 'FAIL'}")
    return EXIT_OK if report.all_pass else EXIT_CHECK


def _cmd_mc(args) -> int:
    ctx = make_beta(args.beta)
    seed = _check_seed(args.seed)
    band = _parse_band(args.band)
    report = mc_law(ctx, args.n, args.samples, seed, args.mode)
    if args.format == "csv":
        _emit(args.out, _csv_text(report.csv_rows()))
    else:
        payload = report.to_json_dict()
        payload["band"] = [str(band[0]), str(band[1])]
        payload["mean_in_band"] = report.mean_in_band(band)
        _emit(args.out, _json_text(payload))
    if args.plot:
        from . import figures

        figures.mc_figure(args.plot, report, band)
    return EXIT_OK if report.mean_in_band(band) else EXIT_CHECK


def _cmd_analyze(args) -> int:
    ctx = make_beta(args.beta)
    seed = _check_seed(args.seed)
    sched_path = Path(args.schedule)
    if not sched_path.exists():
        print(f"schedule file not found: {sched_path}", file=sys.stderr)
        return EXIT_USAGE
    sched = EpSchedule.from_json_dict(json.loads(sched_path.read_text()), ctx)
    k_max = sched.levels if args.k is None else args.k
    reports = verify_counts(sched, k_max)
    mass = assign_mass(sched)
    stream = ep_stream(sched, seed)
    if args.points:
        points = [int(p) for p in args.points.split(",")]
    else:
        points = list(sched.n[:k_max])
        if k_max >= 2:
            step = sched.d[0]
            for ell in (1, 2):
                if sched.tau[1] > ell:
                    points.append(sched.n[0] + ell * step)
    points = [p for p in sorted(set(points)) if p <= sched.n[k_max - 1]]
    profile = local_dimension_profile(stream, mass, points)

    count_rows = [["k", "a", "g", "b", "p_k", "bound_floor", "bound_ok", "beta_bar_lo", "beta_bar_hi", "cover_lo", "cover_hi"]]
    for rep in reports:
        count_rows.append(
            [
                str(rep.k),
                str(rep.a),
                str(rep.g),
                str(rep.b),
                str(rep.p_k),
                str(rep.bound_floor),
                str(rep.bound_ok).lower(),
                str(rep.beta_bar[0]),
                str(rep.beta_bar[1]),
                str(rep.cover[0]),
                str(rep.cover[1]),
            ]
        )
    profile_rows = [["n", "mass", "ratio_lo", "ratio_hi"]]
    for pt in profile:
        profile_rows.append([str(pt.n), str(pt.mass), str(pt.ratio[0]), str(pt.ratio[1])])

    ok = all(rep.bound_ok for rep in reports)
    if args.out == "-":
        if args.format == "csv":
            sys.stdout.write(_csv_text(count_rows))
            sys.stdout.write("\n")
            sys.stdout.write(_csv_text(profile_rows))
        else:
            sys.stdout.write(
                _json_text(
                    {
                        "beta": ctx.describe(),
                        "counts": [rep.to_json_dict() for rep in reports],
                        "profile": [pt.to_json_dict() for pt in profile],
                    }
                )
            )
    else:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.format == "csv":
            (out_dir / "counts.csv").write_text(_csv_text(count_rows))
            (out_dir / "profile.csv").write_text(_csv_text(profile_rows))
        else:
            (out_dir / "counts.json").write_text(
                _json_text({"beta": ctx.describe(), "counts": [rep.to_json_dict() for rep in reports]})
            )
            (out_dir / "profile.json").write_text(
                _json_text({"beta": ctx.describe(), "profile": [pt.to_json_dict() for pt in profile]})
            )
    if args.plot:
        from . import figures

        figures.analyze_figure(args.plot, ctx.describe(), reports, profile)
    return EXIT_OK if ok else EXIT_CHECK


_COMMANDS = {
    "expand": _cmd_expand,
    "census": _cmd_census,
    "construct": _cmd_construct,
    "mc": _cmd_mc,
    "analyze": _cmd_analyze,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (SpecError, InadmissibleWordError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleScheduleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
