"""Command-line interface: ``hullmce {gen,attack,verify,stats,selftest}``.

Exit codes: 0 success, 1 failed verification or attack, 2 usage, parse or
range errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .attack import AttackConfig, attack
from .canon import count_sep_classes
from .conjugacy import STRATEGIES
from .errors import AttackFailure, MCEError, OutOfRange, ParseError, ValidationError
from .instances import (
    charpoly_class_stats,
    gen_instance,
    hull_dim_stats,
    read_instance,
    read_solution,
    verify_solution,
    write_histogram_csv,
    write_instance,
    write_solution,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _add_params(p, k_required=True):
    p.add_argument("--q", type=int, required=True, help="odd prime field size")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None, help="defaults to m")
    p.add_argument("--k", type=int, required=k_required)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("human", "json", "csv"), default="human")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hullmce", description="Hull attack on matrix code equivalence")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a planted instance")
    _add_params(p)
    _add_common(p)
    p.add_argument("--out", default="-", help="instance file ('-' for stdout)")
    p.add_argument("--solution", default=None, help="also write the planted solution here")
    p.add_argument("--embed-solution", action="store_true", help="store the planted solution in the instance file")

    p = sub.add_parser("attack", help="run the attack on an instance file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None, help="solution file")
    p.add_argument("--dict-size", type=int, default=None, help="dictionary size L")
    p.add_argument("--probes", type=int, default=None, help="probe budget N (hull events)")
    p.add_argument("--strategy", choices=STRATEGIES, default="auto")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--deterministic", action="store_true", help="single-threaded, reproducible")
    _add_common(p)

    p = sub.add_parser("verify", help="check a solution file against an instance")
    p.add_argument("--input", required=True)
    p.add_argument("--solution", required=True)
    _add_common(p)

    p = sub.add_parser("stats", help="sampling statistics")
    p.add_argument("--kind", choices=("hull", "classes", "count"), default="hull")
    _add_params(p, k_required=False)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--threads", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("selftest", help="small end-to-end run")
    _add_common(p)
    return parser


def _emit(args, obj, human: str):
    if args.format == "json":
        print(json.dumps(obj))
    else:
        print(human)


def cmd_gen(args) -> int:
    n = args.n or args.m
    inst, sol = gen_instance(args.q, args.m, n, args.k, args.seed)
    write_instance(sys.stdout if args.out == "-" else args.out, inst, sol if args.embed_solution else None)
    if args.solution:
        write_solution(args.solution, sol.P, sol.Q)
    return EXIT_OK


def cmd_attack(args) -> int:
    inst, _ = read_instance(args.input)
    cfg = AttackConfig(
        L=args.dict_size,
        N=args.probes,
        strategy=args.strategy,
        seed=args.seed,
        threads=1 if args.deterministic else args.threads,
        deterministic=args.deterministic or args.threads <= 1,
    )
    try:
        P, Q, stats = attack(inst.C, inst.D, cfg)
    except AttackFailure as exc:
        if exc.phase == "OutOfRange":
            raise OutOfRange(exc.message) from exc
        _emit(args, {"success": False, "phase": exc.phase, "stats": exc.stats}, f"attack failed ({exc.phase}): {exc.message}")
        return EXIT_FAIL
    if args.out:
        write_solution(args.out, P, Q, stats)
    _emit(args, stats, f"solved: {stats['draws']} draws, {stats['collisions']} collisions, "
          f"{stats['phase_times_ms']['total']:.0f} ms")
    return EXIT_OK


def cmd_verify(args) -> int:
    inst, _ = read_instance(args.input)
    P, Q = read_solution(args.solution, inst)
    ok = verify_solution(inst, P, Q)
    _emit(args, {"valid": ok}, "valid" if ok else "INVALID")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_stats(args) -> int:
    if args.kind == "count":
        count = count_sep_classes(args.q, args.m)
        _emit(args, {"q": args.q, "m": args.m, "classes": count}, str(count))
        return EXIT_OK
    if args.k is None:
        raise UsageError("--k is required for this statistic")
    if args.kind == "hull":
        hist = hull_dim_stats(args.q, args.m, args.k, args.samples, args.seed, args.threads)
        if args.format == "csv":
            sys.stdout.write(write_histogram_csv(hist))
        else:
            _emit(args, {str(d): c for d, c in hist.items()}, write_histogram_csv(hist).rstrip())
        return EXIT_OK
    st = charpoly_class_stats(args.q, args.m, args.n or args.m, args.k, args.samples, args.seed)
    if args.format == "csv":
        print("key,count")
        for key, c in sorted(st.frequencies.items()):
            print(f"\"{' '.join(map(str, key))}\",{c}")
        return EXIT_OK
    obj = {
        "samples": st.samples,
        "qualifying": st.qualifying,
        "distinct": st.distinct,
        "max_min_ratio": st.max_min_ratio,
        "frequencies": {" ".join(map(str, k)): c for k, c in sorted(st.frequencies.items())},
    }
    _emit(args, obj, f"{st.distinct} classes over {st.qualifying} qualifying samples, max/min {st.max_min_ratio:.2f}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    inst, _ = gen_instance(11, 4, 4, 12, args.seed)
    P, Q, stats = attack(inst.C, inst.D, AttackConfig(seed=args.seed))
    ok = verify_solution(inst, P, Q)
    _emit(args, {"ok": ok, "stats": stats}, "selftest passed" if ok else "selftest FAILED")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"gen": cmd_gen, "attack": cmd_attack, "verify": cmd_verify, "stats": cmd_stats, "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParseError, ValidationError, OutOfRange, ValueError, OSError) as exc:
        err, code = exc, EXIT_USAGE
    except MCEError as exc:
        err, code = exc, EXIT_FAIL
    if args.format == "json":
        print(json.dumps({"error": type(err).__name__, "message": str(err)}), file=sys.stderr)
    else:
        print(f"hullmce: {type(err).__name__}: {err}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
