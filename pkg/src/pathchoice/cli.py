"""Command-line entry point.

Every invocation writes exactly one JSON document to stdout; progress and
warnings go to stderr. Exit codes: 0 the property holds / the run passed,
1 violated (witness or report on stdout), 2 usage, input or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .concavity import TABLE_PROPERTIES, check_table, induce_choice
from .core import (
    Universe,
    format_rational,
    parse_rational,
    parse_rule,
    parse_utility,
    serialize_rule,
    serialize_utility,
)
from .errors import BudgetExhausted, HarnessFailure, InputError, PathChoiceError
from .generators import (
    SEARCH_TARGETS,
    stream_rng,
    enumerate_rules,
    responsive_rule,
    sample_laminar_valuations,
    sample_pi_rules,
    search_counterexample,
)
from .represent import construct, proof_trace
from .rules import RULE_PROPERTIES, check_rule, is_path_independent, satisfies_lad
from .theorems import verify_prop1, verify_prop2, verify_theorem1, verify_theorem2

_RESPONSIVE_TAG = 100


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)

    def exit(self, status=0, message=None):
        if status:
            raise UsageError((message or "").strip())
        raise SystemExit(status)


class _Ctx:
    def __init__(self, args):
        self.quiet = args.quiet
        self.threads = max(1, args.threads)
        self.seed = args.seed

    def log(self, msg: str) -> None:
        if not self.quiet:
            print(msg, file=sys.stderr)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | Path, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _outdir(path: str) -> Path:
    d = Path(path)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create {path}: {exc.strerror}") from None
    return d


def cmd_check(args, ctx: _Ctx) -> int:
    if (args.rule is None) == (args.utility is None):
        raise UsageError("check needs exactly one of --rule or --utility")
    if args.rule is not None:
        obj = parse_rule(_read(args.rule))
        allowed = RULE_PROPERTIES
        props = allowed if args.property == "all" else [args.property]
        if any(p not in allowed for p in props):
            raise UsageError(f"--property for a rule must be one of {', '.join(allowed)} or all")
        results = [check_rule(obj, p, definitional_lad=args.definitional_lad) for p in props]
    else:
        obj = parse_utility(_read(args.utility))
        allowed = TABLE_PROPERTIES
        props = allowed if args.property == "all" else [args.property]
        if any(p not in allowed for p in props):
            raise UsageError(f"--property for a utility must be one of {', '.join(allowed)} or all")
        results = [check_table(obj, p, allow_large=args.allow_large) for p in props]
    holds = all(results)
    if len(results) == 1:
        _emit(results[0].to_json(with_witness=args.witness))
    else:
        _emit({"property": "all", "holds": holds, "results": [r.to_json(with_witness=args.witness) for r in results]})
    return 0 if holds else 1


def cmd_represent(args, ctx: _Ctx) -> int:
    rule = parse_rule(_read(args.rule))
    eps = parse_rational(args.epsilon) if args.epsilon is not None else None
    rep = construct(rule, eps, force=args.force)
    if args.force and not is_path_independent(rule):
        ctx.log("warning: rule is not path independent; the table carries no guarantee")
    data = serialize_utility(rep.utility)
    if args.out is None and not args.dump_internals:
        sys.stdout.write(data.decode("utf-8"))
        return 0
    out = {"represented": True, "forced": args.force, "epsilon": format_rational(rep.epsilon)}
    if args.out is not None:
        _write(args.out, data)
        out["out"] = args.out
    else:
        out["utility"] = json.loads(data)
    if args.dump_internals:
        out["internals"] = rep.internals_json()
    _emit(out)
    return 0


def cmd_induce(args, ctx: _Ctx) -> int:
    u = parse_utility(_read(args.utility))
    rule = induce_choice(u)
    data = serialize_rule(rule)
    if args.out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        _write(args.out, data)
        _emit({"induced": True, "out": args.out})
    return 0


def cmd_trace(args, ctx: _Ctx) -> int:
    rule = parse_rule(_read(args.rule))
    xbar = rule.universe.parse_key(args.set)
    report = proof_trace(rule, xbar, strict=False)
    _emit(report.to_json())
    return 0 if report.passed else 1


def _verify_mode(args) -> tuple[str, int]:
    if args.exhaustive and args.samples is not None:
        raise UsageError("--exhaustive and --samples are exclusive")
    if args.exhaustive:
        return "exhaustive", 200
    if args.samples is not None:
        return "sampled", args.samples
    return ("exhaustive" if args.n <= 3 else "sampled"), 200


def cmd_verify(args, ctx: _Ctx) -> int:
    mode, count = _verify_mode(args)
    seed = ctx.seed
    if args.theorem == "1":
        fn = lambda: verify_theorem1(args.n, mode, seed, count, ctx.threads)
    elif args.theorem == "2":
        fn = lambda: verify_theorem2(args.n, mode, seed, count, ctx.threads)
    elif args.theorem == "prop1":
        fn = lambda: verify_prop1(args.n, ctx.threads)
    else:
        fn = lambda: verify_prop2(args.n, seed, args.samples if args.samples is not None else 100, ctx.threads)
    try:
        report = fn()
    except HarnessFailure as exc:
        ctx.log(f"verify {args.theorem}: FAILED in {exc.report.runtime:.2f}s")
        _emit(exc.report.to_json())
        return 1
    ctx.log(f"verify {args.theorem}: passed in {report.runtime:.2f}s")
    _emit(report.to_json())
    return 0


def cmd_enumerate(args, ctx: _Ctx) -> int:
    d = _outdir(args.out)
    files = []
    total = 0
    for rule in enumerate_rules(args.n):
        total += 1
        if args.filter != "none":
            if not is_path_independent(rule):
                continue
            if args.filter == "pi-lad" and not satisfies_lad(rule):
                continue
        name = f"rule-{len(files):05d}.json"
        _write(d / name, serialize_rule(rule))
        files.append(name)
    ctx.log(f"enumerate: kept {len(files)} of {total} rules")
    _emit({"n": args.n, "filter": args.filter, "enumerated": total, "written": len(files), "out": args.out})
    return 0


def cmd_sample(args, ctx: _Ctx) -> int:
    d = _outdir(args.out)
    seed, n, count = ctx.seed, args.n, args.count
    stats = {}
    if args.family == "responsive":
        U = Universe.of_size(n)
        blobs = []
        for i in range(count):
            rng = stream_rng(seed, _RESPONSIVE_TAG, i)
            priority = [U.labels[j] for j in rng.permutation(n)]
            blobs.append(serialize_rule(responsive_rule(U, priority, int(rng.integers(0, n + 1)))))
        prefix = "rule"
    elif args.family == "random-pi":
        sample = sample_pi_rules(n, count, seed)
        blobs = [serialize_rule(r) for r in sample.items]
        stats = {"attempts": sample.attempts, "yield": round(sample.yield_rate, 6)}
        prefix = "rule"
    else:
        blobs = [serialize_utility(u) for u in sample_laminar_valuations(n, count, seed)]
        prefix = "utility"
    for i, blob in enumerate(blobs):
        _write(d / f"{prefix}-{i:05d}.json", blob)
    ctx.log(f"sample: wrote {len(blobs)} files")
    _emit({"family": args.family, "n": n, "seed": seed, "requested": count, "written": len(blobs), "out": args.out, **stats})
    return 0


def cmd_search(args, ctx: _Ctx) -> int:
    try:
        result = search_counterexample(args.target, args.n, ctx.seed, args.budget)
    except BudgetExhausted as exc:
        _emit({"target": args.target, "found": False, "message": "no witness found in budget", "detail": str(exc)})
        return 1
    _emit(result.to_json())
    return 0


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="pathchoice", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="decide a rule or table property")
    p.add_argument("--rule")
    p.add_argument("--utility")
    p.add_argument("--property", required=True, choices=[*RULE_PROPERTIES, *TABLE_PROPERTIES, "all"])
    p.add_argument("--definitional-lad", action="store_true")
    p.add_argument("--witness", action="store_true")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("represent", parents=[common], help="build the rationalizing utility")
    p.add_argument("--rule", required=True)
    p.add_argument("--out")
    p.add_argument("--epsilon")
    p.add_argument("--force", action="store_true")
    p.add_argument("--dump-internals", action="store_true")
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("induce", parents=[common], help="argmax choice rule of a table")
    p.add_argument("--utility", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("trace", parents=[common], help="replay the rationalization argument for one set")
    p.add_argument("--rule", required=True)
    p.add_argument("--set", required=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", parents=[common], help="run a theorem harness")
    p.add_argument("--theorem", required=True, choices=["1", "2", "prop1", "prop2"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", parents=[common], help="write every rule on n ≤ 3 contracts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--filter", choices=["pi", "pi-lad", "none"], default="none")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sample", parents=[common], help="write seeded random rules or tables")
    p.add_argument("--family", required=True, choices=["responsive", "laminar", "random-pi"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("search", parents=[common], help="look for a certified example")
    p.add_argument("--target", required=True, choices=SEARCH_TARGETS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name, default in (("seed", 0), ("threads", 1), ("quiet", False)):
            if not hasattr(args, name):
                setattr(args, name, default)
        ctx = _Ctx(args)
        started = time.perf_counter()
        code = args.func(args, ctx)
        ctx.log(f"{args.command}: {time.perf_counter() - started:.2f}s")
        return code
    except UsageError as exc:
        print(json.dumps({"error": "Usage", "message": str(exc)}, ensure_ascii=False))
        return 2
    except InputError as exc:
        print(json.dumps(exc.to_json(), ensure_ascii=False))
        return 2
    except PathChoiceError as exc:
        _emit(exc.to_json())
        return 1


if __name__ == "__main__":
    sys.exit(main())
