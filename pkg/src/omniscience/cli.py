"""Command-line interface.

Subcommands
-----------
solve      minimum sum-rate, fundamental partition and optimal rates of an instance
validate   check a rate vector against every Slepian-Wolf constraint
gen        random packet instance (each packet held by each user w.p. 1/2)
bench      fused vs unfused SFM sizes of repeated solves, as CSV

Users are numbered from 1 on the command line and in all output.

Exit codes: 0 ok, 1 infeasible / validation failure, 2 input error,
3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction

from .core import LinearOrdering, RateVector, format_rational, to_rational
from .oracle import EntropyOracle, InstanceError, PacketInstance, PolymatroidError, dump_instance, load_instance
from .setfunc import InternalError, TooLargeError
from .sfm import MAX_FREE_ATOMS
from .solver import NotIntegralError, check_rates, mda, ordering_for_weights, solve_non_asymptotic

log = logging.getLogger("omniscience")

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

BENCH_COLUMNS = (
    "n", "repetition", "seed",
    "fused_summed_size", "unfused_summed_size",
    "fused_calls", "unfused_calls",
    "fused_evals", "unfused_evals",
    "r_aco",
)


class UsageError(ValueError):
    pass


# -- generation and benchmarking --------------------------------------------------

def random_packet_instance(n: int, m: int, seed: int) -> PacketInstance:
    """Each of ``m`` packets goes to each user independently with probability 1/2.

    A packet that lands with nobody is redrawn, so H(V) = m exactly.
    """
    if n < 2 or m < 1:
        raise UsageError("need at least 2 users and 1 packet")
    rng = random.Random(seed)
    width = len(str(m))
    users = [[] for _ in range(n)]
    for p in range(m):
        while True:
            holders = [i for i in range(n) if rng.random() < 0.5]
            if holders:
                break
        for i in holders:
            users[i].append(f"p{p + 1:0{width}d}")
    return PacketInstance(users)


@dataclass(frozen=True)
class BenchRow:
    n: int
    repetition: int
    seed: int
    fused_summed_size: int
    unfused_summed_size: int
    fused_calls: int
    unfused_calls: int
    fused_evals: int
    unfused_evals: int
    r_aco: Fraction


def row_seed(seed: int, n: int, rep: int) -> int:
    return seed * 1_000_003 + n * 1_000 + rep


def bench_row(n: int, rep: int, m: int, seed: int) -> BenchRow:
    s = row_seed(seed, n, rep)
    o = random_packet_instance(n, m, s)
    fused = mda(o, variant="fused")
    unfused = mda(o, variant="unfused")
    if fused.min_sum_rate != unfused.min_sum_rate or fused.rv != unfused.rv:
        raise InternalError(f"fused and unfused solves disagree on n={n} rep={rep}")
    return BenchRow(n, rep, s,
                    fused.stats.summed_ground_size, unfused.stats.summed_ground_size,
                    fused.stats.calls, unfused.stats.calls,
                    fused.stats.evaluations, unfused.stats.evaluations,
                    fused.min_sum_rate)


def _bench_task(args):
    return bench_row(*args)


def run_bench(n_min: int, n_max: int, m: int, reps: int, seed: int, jobs: int = 1) -> list[BenchRow]:
    """Rows ordered by (n, repetition) whatever the execution order."""
    tasks = []
    for n in range(n_min, n_max + 1):
        if n - 1 > MAX_FREE_ATOMS:
            log.warning("skipping n=%d: unfused SFM exceeds %d free atoms", n, MAX_FREE_ATOMS)
            continue
        tasks.extend((n, rep, m, seed) for rep in range(reps))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_bench_task, tasks))
    else:
        rows = [_bench_task(t) for t in tasks]
    return sorted(rows, key=lambda r: (r.n, r.repetition))


def bench_means(rows: list[BenchRow]) -> dict[int, dict[str, Fraction]]:
    by_n: dict[int, list[BenchRow]] = {}
    for r in rows:
        by_n.setdefault(r.n, []).append(r)
    means = {}
    for n, group in sorted(by_n.items()):
        means[n] = {
            f.name: sum((Fraction(getattr(r, f.name)) for r in group), Fraction(0)) / len(group)
            for f in fields(BenchRow) if f.name not in ("n", "repetition", "seed")
        }
    return means


def bench_csv(rows: list[BenchRow]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow([r.n, r.repetition, r.seed,
                    r.fused_summed_size, r.unfused_summed_size,
                    r.fused_calls, r.unfused_calls,
                    r.fused_evals, r.unfused_evals,
                    format_rational(r.r_aco)])
    for n, mean in bench_means(rows).items():
        w.writerow([n, "mean", ""] + [format_rational(mean[c]) for c in BENCH_COLUMNS[3:]])
    return out.getvalue()


# -- solve / validate ------------------------------------------------------------

def _parse_list(text: str, what: str) -> list[str]:
    items = [t.strip() for t in text.split(",")]
    if not text.strip() or any(not t for t in items):
        raise UsageError(f"malformed {what} list: {text!r}")
    return items


def _parse_rationals(text: str, what: str) -> list[Fraction]:
    try:
        return [to_rational(t) for t in _parse_list(text, what)]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed {what} list: {text!r}") from None


def _parse_ordering(text: str, n: int) -> LinearOrdering:
    try:
        phi = [int(t) for t in _parse_list(text, "ordering")]
    except ValueError:
        raise UsageError(f"ordering must be comma-separated user numbers: {text!r}") from None
    if sorted(phi) != list(range(1, n + 1)):
        raise UsageError(f"ordering must list each of the users 1..{n} once")
    return LinearOrdering.from_one_based(phi)


def _blocks(p) -> list[list[int]]:
    return [[i + 1 for i in b] for b in p.as_lists()]


def solve_report(o: EntropyOracle, ordering: LinearOrdering | None = None,
                 weights: list[Fraction] | None = None, non_asymptotic: bool = False) -> dict:
    """Everything ``solve`` prints, as a JSON-ready dict of strings and lists."""
    if weights is not None:
        if len(weights) != o.n:
            raise UsageError(f"{len(weights)} weights for {o.n} users")
        ordering = ordering_for_weights(weights)
    if ordering is None:
        ordering = LinearOrdering.identity(o.n)
    if non_asymptotic:
        nco = solve_non_asymptotic(o, ordering)
        aco = nco.asymptotic
        alpha, rv, partition = Fraction(nco.min_sum_rate), nco.rv, nco.minimizer
    else:
        aco = mda(o, ordering)
        alpha, rv, partition = aco.min_sum_rate, aco.rv, aco.fundamental_partition
    report = {
        "mode": "non-asymptotic" if non_asymptotic else "asymptotic",
        "n": o.n,
        "ordering": [i + 1 for i in ordering],
        "alpha": format_rational(alpha),
        "rates": [format_rational(r) for r in rv],
        "partition": _blocks(partition),
        "min_sum_rate": format_rational(aco.min_sum_rate),
        "fundamental_partition": _blocks(aco.fundamental_partition),
        "alpha_trace": [format_rational(a) for a in aco.alpha_trace],
        "mmi": format_rational(aco.mmi),
        "stats": {
            "calls": aco.stats.calls,
            "summed_ground_size": aco.stats.summed_ground_size,
            "evaluations": aco.stats.evaluations,
        },
    }
    if weights is not None:
        report["weights"] = [format_rational(w) for w in weights]
        report["weighted_sum"] = format_rational(rv.dot(weights))
    if not o.validated:
        report["warning"] = "entropy table not validated; optimality is conditional"
    return report


def _print_report(r: dict, out) -> None:
    def blocks(bs):
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in bs) + "}"

    print(f"mode:                  {r['mode']}", file=out)
    if r["mode"] == "non-asymptotic":
        print(f"R_NCO:                 {r['alpha']}", file=out)
        print(f"Dilworth minimizer:    {blocks(r['partition'])}", file=out)
    print(f"R_ACO:                 {r['min_sum_rate']}", file=out)
    print(f"fundamental partition: {blocks(r['fundamental_partition'])}", file=out)
    print(f"rate vector:           ({', '.join(r['rates'])})", file=out)
    print(f"alpha trace:           {', '.join(r['alpha_trace'])}", file=out)
    print(f"I(V):                  {r['mmi']}", file=out)
    if "weighted_sum" in r:
        print(f"weighted sum-rate:     {r['weighted_sum']}", file=out)
    s = r["stats"]
    print(f"SFM stats:             calls={s['calls']} summed_size={s['summed_ground_size']} "
          f"evaluations={s['evaluations']}", file=out)
    if "warning" in r:
        print(f"warning:               {r['warning']}", file=out)


def cmd_solve(args, out) -> int:
    o = load_instance(args.instance, validate=not args.no_validate)
    if args.ordering and args.weights:
        raise UsageError("--ordering and --weights are mutually exclusive")
    ordering = _parse_ordering(args.ordering, o.n) if args.ordering else None
    weights = _parse_rationals(args.weights, "weight") if args.weights else None
    if weights is not None and any(w < 0 for w in weights):
        raise UsageError("weights must be nonnegative")
    report = solve_report(o, ordering, weights, args.non_asymptotic)
    if args.json:
        json.dump(report, out, indent=2)
        out.write("\n")
    else:
        _print_report(report, out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    o = load_instance(args.instance)
    rates = _parse_rationals(args.rates, "rate")
    if len(rates) != o.n:
        raise UsageError(f"{len(rates)} rates for {o.n} users")
    try:
        alpha = to_rational(args.alpha) if args.alpha is not None else None
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed alpha {args.alpha!r}") from None
    violation = check_rates(o, RateVector(rates), alpha)
    if violation is None:
        print("ok", file=out)
        return EXIT_OK
    print(f"violation: {violation.describe(o)}", file=out)
    return EXIT_INFEASIBLE


def cmd_gen(args, out) -> int:
    text = dump_instance(random_packet_instance(args.users, args.packets, args.seed))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_bench(args, out) -> int:
    if args.n_min < 2 or args.n_max < args.n_min or args.reps < 1 or args.packets < 1:
        raise UsageError("need 2 <= n-min <= n-max, reps >= 1, packets >= 1")
    rows = run_bench(args.n_min, args.n_max, args.packets, args.reps, args.seed, args.jobs)
    text = bench_csv(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="omniscience", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--ordering", help="linear ordering of users, e.g. 4,3,2,5,1")
    s.add_argument("--weights", help="per-user weights p/q,...; picks the consistent ordering")
    s.add_argument("--non-asymptotic", action="store_true", help="integral rates")
    s.add_argument("--json", action="store_true")
    s.add_argument("--no-validate", action="store_true", help="skip polymatroid check of tables")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check rates against the Slepian-Wolf constraints")
    v.add_argument("instance")
    v.add_argument("--rates", required=True, help="p/q,... one per user")
    v.add_argument("--alpha", help="required sum-rate")
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("gen", help="random packet instance")
    g.add_argument("--users", type=int, required=True)
    g.add_argument("--packets", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser(
        "bench", help="fused vs unfused SFM sizes as CSV",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="CSV columns: " + ",".join(BENCH_COLUMNS) + "\n"
                    "One row per (n, repetition), then one 'mean' row per n.\n"
                    "Sizes count free SFM atoms summed over all calls of one solve;\n"
                    "rationals are written p/q.")
    b.add_argument("--n-min", type=int, default=5)
    b.add_argument("--n-max", type=int, default=12)
    b.add_argument("--packets", type=int, default=20)
    b.add_argument("--reps", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args, out)
    except (InstanceError, PolymatroidError, UsageError, NotIntegralError, TooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
