"""Command-line driver: ``primbounds bound|oracle|table|verify``.

Exit status: 0 success, 1 invariant violation or unusable cache, 2 argument
error, 3 refused because a resource ceiling would be exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction

from . import __version__
from .antichains import CountKind, brute_force_count, build_table, count_kind
from .bounds import (
    BoundConfig,
    Flavor,
    Leftover,
    TableSource,
    Target,
    compute,
    weight,
    weight_simplified,
)
from .cache import CACHE_ENV, TableStore, cache_store, default_cache_dir, dumps
from .errors import InvariantViolation, PrimboundsError, ResourceLimitError
from .kernel import BACKEND, available_backends
from .lattice import first_primes, generate_lattice, telescoped_weight_sum
from .oracles import (
    OracleMethod,
    coprime_bound_eval,
    coprime_count_exact,
    f_exact,
    fq_exact,
    g_exact,
)

EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


class _UsageError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--threads", type=_positive, default=1,
                   help="worker threads for table builds (default 1)")
    p.add_argument("--no-timing", action="store_true",
                   help="omit wall time so reports are byte-for-byte reproducible")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="primbounds",
                                 description="Bounds on growth constants of primitive sets.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="evaluate one bound")
    b.add_argument("--target", choices=[t.value for t in Target], required=True)
    b.add_argument("--flavor", choices=[f.value for f in Flavor], required=True)
    b.add_argument("--l", type=int)
    b.add_argument("--K", type=_positive)
    b.add_argument("--S", type=_positive)
    b.add_argument("--Ks", type=_int_list)
    b.add_argument("--K0", type=_positive, help="range for the beta l=0 step (default K_1)")
    b.add_argument("--no-step0", action="store_true", help="skip the beta l=0 step")
    b.add_argument("--leftover", choices=[m.value for m in Leftover], default="exact",
                   help="left-over density used by improved-lower (default exact)")
    b.add_argument("--backend", choices=["python", "compiled"])
    b.add_argument("--cache-dir", help=f"table cache directory (default ${CACHE_ENV} if set)")
    b.add_argument("--no-cache", action="store_true")
    _common(b)

    o = sub.add_parser("oracle", help="exact small-n counts")
    o.add_argument("which", choices=["f", "g", "fq", "coprime"])
    o.add_argument("--n", type=_positive, required=True)
    o.add_argument("--l", type=int, default=2, help="basis size for fq (q is the next prime)")
    o.add_argument("--method", choices=[m.value for m in OracleMethod])
    _common(o)

    t = sub.add_parser("table", help="build a count table")
    t.add_argument("--l", type=int, required=True)
    t.add_argument("--kind", required=True, help="r, r', R, R' or max-all, max-truncated, ...")
    t.add_argument("--K", type=_positive, required=True)
    t.add_argument("--out", help="write the table file here instead of stdout")
    t.add_argument("--backend", choices=["python", "compiled"])
    _common(t)

    v = sub.add_parser("verify", help="run the built-in consistency checks")
    v.add_argument("--seed", type=int, default=0)
    _common(v)
    return ap


# -- subcommands ----------------------------------------------------------

def _store(args):
    if args.no_cache:
        return None
    if args.cache_dir:
        return TableStore(args.cache_dir)
    return TableStore(default_cache_dir()) if os.environ.get(CACHE_ENV) else None


def _cmd_bound(args) -> dict:
    target, flavor = Target(args.target), Flavor(args.flavor)
    improved = flavor in (Flavor.IMPROVED_LOWER, Flavor.IMPROVED_UPPER)
    if improved:
        if args.Ks is None:
            raise _UsageError("improved flavors need --Ks")
        if args.S is not None and args.S != len(args.Ks):
            raise _UsageError(f"--S {args.S} does not match {len(args.Ks)} values in --Ks")
        cfg = BoundConfig(target, flavor, Ks=args.Ks, include_step0=not args.no_step0,
                          K0=args.K0, leftover=args.leftover)
    else:
        if args.l is None or args.K is None:
            raise _UsageError("basic flavors need --l and --K")
        cfg = BoundConfig(target, flavor, l=args.l, K=args.K)
    if args.backend and args.backend not in available_backends():
        raise _UsageError(f"backend {args.backend!r} is not available")
    try:
        cfg.validate()
    except ValueError as exc:
        raise _UsageError(str(exc))
    source = TableSource(threads=args.threads, backend=args.backend, store=_store(args))
    report = compute(cfg, source)
    return {"kind": "bound", **report.to_dict()}


def _cmd_oracle(args) -> dict:
    method = args.method
    if args.which == "f":
        res = f_exact(args.n, method or OracleMethod.CHAIN_BACKTRACKING)
    elif args.which == "g":
        res = g_exact(args.n, method or OracleMethod.CHAIN_BACKTRACKING)
    elif args.which == "fq":
        if args.l < 0:
            raise _UsageError("--l must be nonnegative")
        res = fq_exact(args.n, first_primes(args.l), method or OracleMethod.CHAIN_BACKTRACKING)
    else:
        res = coprime_count_exact(args.n, method or OracleMethod.MASK_DP)
    out = {"kind": "oracle", "quantity": args.which, **res.to_dict()}
    if args.which == "fq":
        out["l"] = args.l
    if args.which == "coprime" and args.n >= 2:
        ref = coprime_bound_eval(args.n)
        out["pi"] = ref.pi
        out["log_reference"] = {"c=1/2": str(ref.lower), "c=2": str(ref.upper),
                                "c=1": str(ref.mid)}
        out["residual_exponent"] = str(ref.residual(res.value))
    return out


def _cmd_table(args) -> dict:
    try:
        kind = CountKind.parse(args.kind)
    except ValueError as exc:
        raise _UsageError(str(exc))
    if args.l < 0:
        raise _UsageError("--l must be nonnegative")
    if args.backend and args.backend not in available_backends():
        raise _UsageError(f"backend {args.backend!r} is not available")
    table = build_table(first_primes(args.l), kind, args.K, threads=args.threads,
                        backend=args.backend)
    out = {"kind": "table", "l": args.l, "count_kind": kind.name, "K": args.K,
           "segments": len(table.rows)}
    if args.out:
        cache_store(args.out, table)
        out["path"] = args.out
    else:
        out["table"] = dumps(table)
    return out


def _cmd_verify(args) -> dict:
    rng = random.Random(args.seed)
    checks = []

    def record(name, ok, detail=""):
        checks.append({"check": name, "ok": bool(ok), "detail": detail})

    record("f(7) = 12 and f(8) = 10", f_exact(7).value == 12 and f_exact(8).value == 10)
    record("f chain search = naive, n <= 10",
           all(f_exact(n).value == f_exact(n, "NaiveSubsets").value for n in range(1, 11)))
    record("g chain search = naive, n <= 16",
           all(g_exact(n).value == g_exact(n, "NaiveSubsets").value for n in range(1, 17)))
    record("coprime mask DP = naive, n <= 16",
           all(coprime_count_exact(n).value == coprime_count_exact(n, "NaiveSubsets").value
               for n in range(1, 17)))
    bad = []
    for l in range(4):
        basis = first_primes(l)
        for i in range(1, 41):
            lat = generate_lattice(basis, i)
            for kind in CountKind:
                if count_kind(lat, kind) != brute_force_count(lat, kind):
                    bad.append((l, i, kind.name))
    record("antichain DP = brute force, l <= 3, i <= 40", not bad, str(bad[:5]))
    mism = 0
    for _ in range(200):
        S = rng.randint(1, 4)
        Ks = sorted((rng.randint(1, 200) for _ in range(S)), reverse=True)
        l = rng.randint(0, S - 1)
        i = rng.randint(1, Ks[max(l, 1) - 1])
        basis = first_primes(S)
        for mode in Leftover:
            if weight(Target.ALPHA, basis, Ks, l, i, mode) != \
                    weight_simplified(Target.ALPHA, basis, Ks, l, i, mode):
                mism += 1
    record("nested weight = simplified weight (200 random cases)", mism == 0, f"{mism} mismatches")
    tele = all(telescoped_weight_sum(a, b) == sum(Fraction(1, k * (k + 1)) for k in range(a, b + 1))
               for a in range(1, 30) for b in range(a, 40))
    record("telescoping identity", tele)
    ok = all(c["ok"] for c in checks)
    return {"kind": "verify", "ok": ok, "checks": checks}


_COMMANDS = {"bound": _cmd_bound, "oracle": _cmd_oracle, "table": _cmd_table,
             "verify": _cmd_verify}


def _text(report: dict) -> str:
    kind = report["kind"]
    if kind == "bound":
        c = report["config"]
        head = f"{c['target']} {c['flavor']}: {report['direction']} bound {report['bound']}"
        lines = [head, f"  log = {report['log_bound']}"]
        lines += [f"  {label}: {val}" for label, val in report["steps"]]
        lines += [f"  note: {n}" for n in report["notes"]]
    elif kind == "oracle":
        lines = [f"{report['quantity']}({report['n']}) = {report['value']}  [{report['method']}]"]
        if "residual_exponent" in report:
            lines.append(f"  pi(n) = {report['pi']}, residual exponent "
                         f"{report['residual_exponent']}")
    elif kind == "table":
        lines = [f"{report['count_kind']} table, l={report['l']}, K={report['K']}, "
                 f"{report['segments']} segments"]
        if "table" in report:
            lines.append(report["table"].rstrip("\n"))
    else:
        lines = [f"{'PASS' if c['ok'] else 'FAIL'}  {c['check']}" for c in report["checks"]]
        lines.append("all checks passed" if report["ok"] else "some checks FAILED")
    if "wall_time" in report:
        lines.append(f"  ({report['wall_time']:.3f} s, backend {report['backend']})")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    t0 = time.perf_counter()
    try:
        report = _COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"primbounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"primbounds: refused: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvariantViolation, PrimboundsError) as exc:
        print(f"primbounds: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    report["backend"] = args.backend if getattr(args, "backend", None) else BACKEND
    if not args.no_timing:
        report["wall_time"] = time.perf_counter() - t0
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(_text(report))
    if args.command == "verify" and not report["ok"]:
        return EXIT_INVARIANT
    return 0


if __name__ == "__main__":
    sys.exit(main())
