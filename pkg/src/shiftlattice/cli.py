"""Command-line interface: ``shiftlattice <command> ...``."""

from __future__ import annotations

import argparse
import secrets
import sys
from pathlib import Path

from . import verify
from .errors import BudgetError, InputError, MalformedStreamError
from .geometry import load_points, scale_bounds
from .lattice import build_hierarchy
from .persistence import reduce, tower_to_filtration
from .rips import build_rips, read_filtration, write_filtration
from .tower import build_tower, read_events

EXIT_OK = 0
EXIT_FAILED = 1  # a bound or lemma check was violated
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_INPUT = 4
EXIT_BUDGET = 5


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbelow(2**31)
        print(f"seed={args.seed}", file=sys.stderr)
    return args.seed


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


def cmd_tower_build(args) -> int:
    cloud = load_points(args.points, args.metric)
    h = build_hierarchy(scale_bounds(cloud), cloud.dim, _seed(args))
    tower = build_tower(cloud, h, args.max_dim)
    _emit(tower.to_text(), args.out)
    if args.stats:
        Path(args.stats).write_text(tower.stats.to_csv(), encoding="utf-8")
    return EXIT_OK


def cmd_rips_build(args) -> int:
    cloud = load_points(args.points, args.metric)
    fc = build_rips(cloud, args.max_dim, alpha_max=args.alpha_max, budget=args.budget)
    if args.out:
        write_filtration(args.out, fc)
    else:
        for s, v in fc.simplices:
            print(f"{v!r} {len(s) - 1} " + " ".join(map(str, s)))
    return EXIT_OK


def cmd_barcode(args) -> int:
    if args.events:
        _, events = read_events(args.events)
        fc = tower_to_filtration(events)
    else:
        fc = read_filtration(args.filtration)
    _emit(reduce(fc).to_text(), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    cloud = load_points(args.points)
    metrics = ("linf", "l2") if args.metric == "both" else (args.metric,)
    report = verify.check_interleaving(cloud, _seed(args), args.max_dim, metrics, args.convention)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_verify_lemmas(args) -> int:
    report = verify.check_lemmas(args.dim, args.trials, args.seed, args.only)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_verify_sizes(args) -> int:
    try:
        rows = verify.measure_sizes(args.n, args.d, args.k, args.seeds)
    except AssertionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    _emit(verify.rows_to_csv(rows), args.out)
    ns = sorted(set(args.n))
    ok = True
    for a, b in zip(ns, ns[1:]):
        if b == 2 * a:
            ratio = verify.doubling_ratio(rows, a, b)
            good = ratio <= 3
            ok &= good
            print(f"# size ratio n={a}->{b}: {ratio:.3f} {'PASS' if good else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify_survival(args) -> int:
    r = verify.survival_experiment(args.k, args.d, args.trials, args.seed)
    print(f"k={r.k} d={r.d} trials={r.trials} mean={r.mean:.4f} stderr={r.stderr:.4f} "
          f"bound={r.bound:.4f} {'PASS' if r.passed else 'FAIL'}")
    return EXIT_OK if r.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shiftlattice",
                                description="Approximate Rips towers on shifted lattices.")
    sub = p.add_subparsers(dest="command", required=True)

    tower = sub.add_parser("tower", help="tower construction").add_subparsers(dest="action", required=True)
    tb = tower.add_parser("build", help="build the tower and write its event stream")
    tb.add_argument("--points", required=True)
    tb.add_argument("--metric", choices=["l2", "linf"], default="l2")
    tb.add_argument("--max-dim", type=int, required=True)
    tb.add_argument("--seed", type=int)
    tb.add_argument("--out")
    tb.add_argument("--stats", help="per-scale statistics CSV")
    tb.set_defaults(func=cmd_tower_build)

    rips = sub.add_parser("rips", help="exact Rips filtration").add_subparsers(dest="action", required=True)
    rb = rips.add_parser("build")
    rb.add_argument("--points", required=True)
    rb.add_argument("--metric", choices=["l2", "linf"], default="l2")
    rb.add_argument("--max-dim", type=int, required=True)
    rb.add_argument("--alpha-max", type=float, default=float("inf"))
    rb.add_argument("--budget", type=int, default=2_000_000)
    rb.add_argument("--out")
    rb.set_defaults(func=cmd_rips_build)

    bc = sub.add_parser("barcode", help="persistence barcode of an event stream or filtration")
    src = bc.add_mutually_exclusive_group(required=True)
    src.add_argument("--events")
    src.add_argument("--filtration")
    bc.add_argument("--out")
    bc.set_defaults(func=cmd_barcode)

    cmp_ = sub.add_parser("compare", help="check tower against exact Rips (exit 0 iff within bound)")
    cmp_.add_argument("--points", required=True)
    cmp_.add_argument("--max-dim", type=int, required=True)
    cmp_.add_argument("--seed", type=int)
    cmp_.add_argument("--metric", choices=["both", "l2", "linf"], default="both")
    cmp_.add_argument("--convention", choices=["balanced", "literal"], default="balanced",
                      help="tower rescaling: balanced multiplies by sqrt(2), literal by 1/sqrt(2)")
    cmp_.set_defaults(func=cmd_compare)

    ver = sub.add_parser("verify", help="lemma and size campaigns").add_subparsers(dest="action", required=True)
    vl = ver.add_parser("lemmas")
    vl.add_argument("--dim", type=int, required=True)
    vl.add_argument("--trials", type=int, required=True)
    vl.add_argument("--seed", type=int, default=0)
    vl.add_argument("--only", nargs="+", choices=sorted(verify.LEMMAS))
    vl.set_defaults(func=cmd_verify_lemmas)
    vs = ver.add_parser("sizes")
    vs.add_argument("--n", type=_ints, required=True)
    vs.add_argument("--d", type=_ints, required=True)
    vs.add_argument("--k", type=int, required=True)
    vs.add_argument("--seeds", type=_ints, default=[0])
    vs.add_argument("--out")
    vs.set_defaults(func=cmd_verify_sizes)
    vv = ver.add_parser("survival")
    vv.add_argument("--k", type=int, required=True)
    vv.add_argument("--d", type=int, required=True)
    vv.add_argument("--trials", type=int, default=1000)
    vv.add_argument("--seed", type=int, default=0)
    vv.set_defaults(func=cmd_verify_survival)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_MISSING
    except BudgetError as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, MalformedStreamError, ValueError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
