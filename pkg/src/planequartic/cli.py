"""Command-line surface: per-prime and range computations, verification
mode, and machine-readable output.

Three subcommands.  `modp` computes one prime (optionally through the
uncompressed 28x28 product, optionally cross-checked against oracles),
`range` sweeps all primes up to a bound through the forest and emits
one record per prime as JSONL or CSV, `oracle` runs a ground-truth
computation on its own.

Exit codes: 0 success, 2 usage (bad arguments, unreadable curve,
oracle budget), 3 degenerate input curve, 4 internal invariant
violation (including --check mismatches).

JSONL records carry a fixed key set in a fixed order and never include
timings, so output bytes depend only on (curve, N, seed); per-record
timings go to the CSV format's last column instead.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass

from .curve import (
    DegenerateCurveError,
    ModelSearchExhausted,
    QuarticCurve,
    bad_prime_multiple,
    discriminant_exact,
    load_curve,
    naive_count,
    parse_curve,
    reduce_curve,
)
from .engine import (
    CartierManinResult,
    CurveContext,
    cartier_manin_modp,
    uncompressed_result,
)
from .forest import RangeItem, range_cartier_manin
from .oracle import (
    BRUTE_FORCE_MAX_P,
    ENUM_BUDGET,
    BudgetError,
    ZetaCounts,
    cartier_manin_bruteforce,
    count_points_ext,
    lpoly_from_counts,
)
from .algebra import is_prime

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_INTERNAL = 4

# largest p where --check still runs the fiber-by-fiber point count
NAIVE_CHECK_MAX_P = 1024
# largest p where --check can afford degree-3 extension counts
LPOLY_CHECK_MAX_P = 13

CSV_HEADER = ["p", "status", "trace", "a_p", "count",
              "a11", "a12", "a13", "a21", "a22", "a23", "a31", "a32", "a33",
              "l0", "l1", "l2", "l3", "l4", "l5", "l6", "p_rank", "time_ms"]


@dataclass(frozen=True)
class OutputRecord:
    """One prime's serializable outcome."""

    p: int
    status: str                      # ok / fallback / bad_reduction / skipped
    trace: int | None = None
    a_p: int | None = None
    count: int | None = None
    matrix: tuple | None = None      # 3x3 rows
    lpoly: tuple | None = None       # 7 coefficients
    rank: int | None = None
    p_rank: int | None = None
    route: str | None = None
    transform: tuple | None = None   # only set when the model was changed
    detail: str | None = None
    time_ms: float = 0.0


def record_from_result(res: CartierManinResult, status: str,
                       time_ms: float) -> OutputRecord:
    transform = None
    if res.model.provenance == "transformed":
        transform = res.model.transform
    return OutputRecord(p=res.p, status=status, trace=res.trace, a_p=res.a_p,
                        count=res.count, matrix=res.matrix, lpoly=res.lpoly,
                        rank=res.rank, p_rank=res.p_rank, route=res.route,
                        transform=transform, time_ms=time_ms)


def record_from_item(item: RangeItem) -> OutputRecord:
    if item.result is None:
        return OutputRecord(p=item.p, status=item.status, detail=item.detail,
                            time_ms=item.time_ms)
    return record_from_result(item.result, item.status, item.time_ms)


def record_json(rec: OutputRecord) -> str:
    """Deterministic single-line JSON; timings deliberately excluded."""
    data = {
        "p": rec.p,
        "status": rec.status,
        "trace": rec.trace,
        "a_p": rec.a_p,
        "count": rec.count,
        "matrix": [list(r) for r in rec.matrix] if rec.matrix else None,
        "lpoly": list(rec.lpoly) if rec.lpoly else None,
        "rank": rec.rank,
        "p_rank": rec.p_rank,
        "route": rec.route,
        "transform": [list(r) for r in rec.transform] if rec.transform else None,
        "detail": rec.detail,
    }
    return json.dumps(data, separators=(",", ":"))


def record_csv_row(rec: OutputRecord) -> list:
    mat = rec.matrix if rec.matrix else ((None,) * 3,) * 3
    lp = rec.lpoly if rec.lpoly else (None,) * 7
    cells = [rec.p, rec.status, rec.trace, rec.a_p, rec.count,
             *[x for row in mat for x in row], *lp, rec.p_rank,
             f"{rec.time_ms:.3f}"]
    return ["" if x is None else x for x in cells]


# ---------------------------------------------------------------------------
# argument plumbing


def _add_curve_args(sub):
    sub.add_argument("--curve", metavar="FILE",
                     help="curve file: 15 integers or {\"coeffs\": [...]}")
    sub.add_argument("--coeffs", nargs=15, type=int, metavar="C",
                     help="the 15 coefficients inline, lex order")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for the good-model search (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planequartic",
        description="Cartier-Manin matrices, traces and point counts "
                    "of smooth plane quartics")
    subs = parser.add_subparsers(dest="command", required=True)

    modp = subs.add_parser("modp", help="one prime")
    _add_curve_args(modp)
    modp.add_argument("-p", type=int, required=True, help="the prime")
    modp.add_argument("--check", action="store_true",
                      help="cross-check against oracles within budget")
    modp.add_argument("--uncompressed", action="store_true",
                      help="use the 28x28 operator product")

    rng = subs.add_parser("range", help="all primes up to a bound")
    _add_curve_args(rng)
    rng.add_argument("-N", type=int, required=True, help="upper bound")
    rng.add_argument("--kappa", type=int, default=None,
                     help="chunk count exponent (default 2 log2 log2 N)")
    rng.add_argument("--threads", type=int, default=1,
                     help="worker threads for chunk builds")
    rng.add_argument("--out", metavar="FILE", help="output file (default stdout)")
    rng.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    rng.add_argument("--check-upto", type=int, default=0, metavar="B",
                     help="re-verify every p <= B against the per-prime "
                          "engine and oracles")

    orc = subs.add_parser("oracle", help="ground-truth computations only")
    _add_curve_args(orc)
    orc.add_argument("-p", type=int, required=True, help="the prime")
    orc.add_argument("what", choices=("count", "cm", "lpoly"))
    return parser


def _load(args) -> QuarticCurve:
    if args.curve is not None:
        with open(args.curve, "r", encoding="utf-8") as handle:
            return load_curve(handle.read())
    if args.coeffs is not None:
        return parse_curve(args.coeffs)
    raise ValueError("no curve given; use --curve FILE or --coeffs")


# ---------------------------------------------------------------------------
# oracle cross-checks shared by --check and --check-upto


def _check_result(curve: QuarticCurve, res: CartierManinResult) -> list[str]:
    """Run every oracle within budget; return the list of checks passed.

    Raises ArithmeticError on any mismatch.
    """
    p = res.p
    done = []
    if p <= BRUTE_FORCE_MAX_P:
        brute = cartier_manin_bruteforce(res.model)
        if tuple(tuple(r) for r in brute) != tuple(tuple(r) for r in res.matrix):
            raise ArithmeticError(f"p={p}: matrix differs from brute force")
        done.append("brute-force matrix")
    if p <= NAIVE_CHECK_MAX_P:
        count = naive_count(reduce_curve(curve, p))
        if res.count is not None and count != res.count:
            raise ArithmeticError(
                f"p={p}: count {res.count} but enumeration finds {count}")
        if (res.trace - (p + 1 - count)) % p:
            raise ArithmeticError(f"p={p}: trace breaks the count congruence")
        done.append("point count")
    if p <= LPOLY_CHECK_MAX_P:
        counts = ZetaCounts(p, *[count_points_ext(reduce_curve(curve, p), p, r)
                                 for r in (1, 2, 3)])
        lp = lpoly_from_counts(counts)
        if tuple(x % p for x in lp) != tuple(x % p for x in res.lpoly):
            raise ArithmeticError(f"p={p}: L-polynomial congruence fails")
        done.append("L-polynomial")
    return done


# ---------------------------------------------------------------------------
# subcommands


def cmd_modp(args) -> int:
    try:
        curve = _load(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not is_prime(args.p):
        print(f"error: {args.p} is not prime", file=sys.stderr)
        return EXIT_USAGE
    p = args.p
    try:
        ctx = CurveContext(curve)
        t0 = time.perf_counter()
        if args.uncompressed:
            res = uncompressed_result(curve, p, context=ctx, seed=args.seed)
        else:
            res = cartier_manin_modp(curve, p, context=ctx, seed=args.seed)
        dt = (time.perf_counter() - t0) * 1000.0
        good = p == 2 or ctx.is_good(p)
    except DegenerateCurveError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ModelSearchExhausted, ValueError) as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ArithmeticError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.check:
        try:
            done = _check_result(curve, res)
        except ArithmeticError as exc:
            print(f"check failed: {exc}", file=sys.stderr)
            return EXIT_INTERNAL
        note = ", ".join(done) if done else "nothing within budget"
        print(f"check passed: {note}", file=sys.stderr)
    rec = record_from_result(res, "ok" if good else "fallback", dt)
    print(record_json(rec))
    return EXIT_OK


def cmd_range(args) -> int:
    try:
        curve = _load(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.N < 3:
        print("error: the bound must be at least 3", file=sys.stderr)
        return EXIT_USAGE
    if args.threads < 1 or (args.kappa is not None and args.kappa < 0):
        print("error: bad thread or chunk arguments", file=sys.stderr)
        return EXIT_USAGE
    # name the vanishing factor before any heavy construction
    try:
        bad_prime_multiple(curve, 1, 1)
        ctx = CurveContext(curve)
        if ctx.bad_data.D == 0 or discriminant_exact(curve) == 0:
            print("degenerate: discriminant = 0", file=sys.stderr)
            return EXIT_DEGENERATE
    except DegenerateCurveError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE

    handle = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    verify_ctx = CurveContext(curve) if args.check_upto else None
    try:
        writer = csv.writer(handle) if args.format == "csv" else None
        if writer is not None:
            writer.writerow(CSV_HEADER)
        for item in range_cartier_manin(curve, args.N, kappa=args.kappa,
                                        threads=args.threads, seed=args.seed):
            rec = record_from_item(item)
            if args.check_upto and item.p <= args.check_upto and item.result:
                try:
                    ref = cartier_manin_modp(curve, item.p, context=verify_ctx,
                                             seed=args.seed)
                    if (ref.matrix, ref.trace, ref.a_p, ref.count) != \
                            (item.result.matrix, item.result.trace,
                             item.result.a_p, item.result.count):
                        raise ArithmeticError(
                            f"p={item.p}: range and per-prime outputs differ")
                    _check_result(curve, item.result)
                except ArithmeticError as exc:
                    print(f"check failed: {exc}", file=sys.stderr)
                    return EXIT_INTERNAL
            if writer is not None:
                writer.writerow(record_csv_row(rec))
            else:
                handle.write(record_json(rec) + "\n")
        return EXIT_OK
    except ArithmeticError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        if handle is not sys.stdout:
            handle.close()


def cmd_oracle(args) -> int:
    try:
        curve = _load(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not is_prime(args.p):
        print(f"error: {args.p} is not prime", file=sys.stderr)
        return EXIT_USAGE
    p = args.p
    try:
        c = reduce_curve(curve, p)
        t0 = time.perf_counter()
        if args.what == "count":
            if p * p > ENUM_BUDGET:
                raise BudgetError(
                    f"p^2 = {p * p} exceeds the enumeration budget {ENUM_BUDGET}")
            n1 = count_points_ext(c, p, 1)
            rec = OutputRecord(p=p, status="ok", count=n1, route="oracle",
                               time_ms=(time.perf_counter() - t0) * 1000.0)
        elif args.what == "cm":
            mat = cartier_manin_bruteforce(c)
            trace = sum(mat[i][i] for i in range(3)) % p
            rec = OutputRecord(p=p, status="ok", trace=trace, matrix=mat,
                               route="oracle",
                               time_ms=(time.perf_counter() - t0) * 1000.0)
        else:
            if p > LPOLY_CHECK_MAX_P:
                raise BudgetError(
                    f"degree-3 extension counts need p <= {LPOLY_CHECK_MAX_P}")
            counts = ZetaCounts(p, *[count_points_ext(c, p, r)
                                     for r in (1, 2, 3)])
            lp = lpoly_from_counts(counts)
            rec = OutputRecord(p=p, status="ok", trace=(p + 1 - counts.n1) % p,
                               a_p=p + 1 - counts.n1, count=counts.n1,
                               lpoly=tuple(lp), route="oracle",
                               time_ms=(time.perf_counter() - t0) * 1000.0)
    except BudgetError as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateCurveError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    print(record_json(rec))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "modp":
        return cmd_modp(args)
    if args.command == "range":
        return cmd_range(args)
    return cmd_oracle(args)


if __name__ == "__main__":
    sys.exit(main())
