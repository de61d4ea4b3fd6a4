"""Command line: ``cogef check|build|verify|gen``.

Exit codes: 0 accept (or verification pass), 1 verification fail,
2 reject, 3 undecided (or inconclusive verification), 64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cosets import DEFAULT_DELTA_CAP
from .generators import gen_counterexample, gen_dual_complete, gen_odd_cycle_stab
from .io import FORMATS, InstanceFormatError, dump_instance, emit, parse_instance
from .linalg import Matrix
from .modularity import DEFAULT_ENUM_CAP
from .oracle import DEFAULT_LATTICE_CAP, verify_hull
from .pipeline import build_ef, check_conditions

EXIT_OK, EXIT_FAIL, EXIT_REJECT, EXIT_UNDECIDED, EXIT_USAGE = 0, 1, 2, 3, 64
VERDICT_EXIT = {"accept": EXIT_OK, "reject": EXIT_REJECT, "undecided": EXIT_UNDECIDED}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cogef", description="Exact extended formulations for strictly "
                "Delta-modular cones with cographic row matroids.")
    p.add_argument("--delta-cap", type=int, default=DEFAULT_DELTA_CAP,
                   help="largest Delta the circulation branch will attempt (default %(default)s)")
    p.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP,
                   help="subdeterminant enumeration cap (default %(default)s)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="report on the three conditions")
    c.add_argument("file")
    c.add_argument("--json", action="store_true", help="print a JSON report")

    b = sub.add_parser("build", help="build the extended formulation and write it out")
    b.add_argument("file")
    b.add_argument("--out", required=True)
    b.add_argument("--format", choices=FORMATS, default="lp")

    v = sub.add_parser("verify", help="build, then compare against the lattice-point oracle")
    v.add_argument("file")
    v.add_argument("--radius", type=int, default=6)
    v.add_argument("--objectives", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--lattice-cap", type=int, default=DEFAULT_LATTICE_CAP)
    v.add_argument("--json", action="store_true")

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("family", choices=("dual-complete", "cevallos", "jia", "odd-cycle"))
    g.add_argument("size", type=int, help="r for dual-complete, node count, n, or cycle length")
    g.add_argument("--det", type=int, default=2, help="scale determinant for dual-complete")
    g.add_argument("--out", required=True)
    return p


def _load(path: str):
    try:
        return parse_instance(path)
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except InstanceFormatError as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _report_dict(rep) -> dict:
    prof = rep.profile
    return {
        "verdict": rep.verdict,
        "failed": list(rep.failed),
        "undecided": list(rep.undecided),
        "strict": rep.strict,
        "cographic": rep.cographic,
        "span": rep.span,
        "apex": None if rep.apex is None else [str(v) for v in rep.apex],
        "apex_integral": rep.apex_integral,
        "profile": None if prof is None else
        {"delta": prof.delta, "gcd": prof.gcd, "strict": prof.strictly_modular},
        "messages": rep.messages,
    }


def _check(args, out) -> int:
    inst = _load(args.file)
    rep = check_conditions(inst, enum_cap=args.enum_cap)
    if args.json:
        print(json.dumps(_report_dict(rep), indent=1, sort_keys=True), file=out)
    else:
        print(rep.summary(), file=out)
    return VERDICT_EXIT[rep.verdict]


def _build_checked(args, out):
    inst = _load(args.file)
    rep = check_conditions(inst, enum_cap=args.enum_cap)
    if rep.verdict != "accept":
        print(rep.summary(), file=out)
        return inst, None, VERDICT_EXIT[rep.verdict]
    art = build_ef(inst, rep, delta_cap=args.delta_cap)
    return inst, art, EXIT_OK


def _build(args, out) -> int:
    inst, art, code = _build_checked(args, out)
    if art is None:
        return code
    try:
        emit(art, args.format, args.out)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
    ef = art.formulation
    print(f"{art.branch} branch: {ef.num_vars} variables, {len(ef.rows)} rows, "
          f"{ef.num_inequalities} inequalities -> {args.out}", file=out)
    return EXIT_OK


def _verify(args, out) -> int:
    inst, art, code = _build_checked(args, out)
    if art is None:
        return code
    rep = verify_hull(art, inst, args.radius, args.objectives, args.seed, lattice_cap=args.lattice_cap)
    if args.json:
        print(json.dumps(rep.to_dict(), indent=1, sort_keys=True), file=out)
    else:
        print(f"{rep.verdict.upper()} {inst.label or args.file}: {rep.matches}/{rep.objectives_tested} "
              f"objectives match, {rep.points_checked} lattice points", file=out)
        for f in rep.flags:
            print(f"  note: {f}", file=out)
        for mm in rep.mismatches[:5]:
            print(f"  mismatch: {mm}", file=out)
    return {"pass": EXIT_OK, "fail": EXIT_FAIL}.get(rep.verdict, EXIT_UNDECIDED)


def _gen(args, out) -> int:
    try:
        if args.family == "dual-complete":
            from math import comb

            n = comb(args.size - 1, 2) if args.size >= 2 else 0
            if args.det < 1:
                raise ValueError("--det must be positive")
            inst = gen_dual_complete(args.size, Matrix.diag([args.det] + [1] * (n - 1)) if n else None)
        elif args.family == "odd-cycle":
            inst = gen_odd_cycle_stab(args.size)
        else:
            inst = gen_counterexample(args.family, args.size)
    except ValueError as exc:
        raise UsageError(f"gen {args.family}: {exc}") from exc
    dump_instance(inst, args.out)
    print(f"{inst.label}: {inst.m} x {inst.n} -> {args.out}", file=out)
    return EXIT_OK


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = _parser().parse_args(argv)
        return {"check": _check, "build": _build, "verify": _verify, "gen": _gen}[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
