"""Command-line front end: ``qcong <command> [options]``.

Exit codes: 0 when every check passes, 1 on a congruence failure or a
coprimality error, 2 on bad arguments or violated preconditions.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from .convolution_engine import run_property_suite
from .exact_arith import primes_between
from .laurent_x import CoprimalityError
from .padic_verifier import (
    FAMILY_IDS,
    CorollaryError,
    corollary_family,
    gz_triple_residues_mod_p3,
    modes_agree,
    reports_to_csv,
    single_sum_cross_check,
    sweep,
)
from .qseries_terms import SpecError, TermSpec, verify_specialized_single_sum, verify_theorem

SCHEMA = "1"
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_CROSS_FAMILIES = ("E2", "F2", "G2", "LW", "GZ")


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    """What a command produced: pass flag, structured payload, text lines."""

    ok: bool
    payload: dict
    lines: list[str] = field(default_factory=list)
    csv: str | None = None


# -- commands ---------------------------------------------------------------------------


def _term_spec(args) -> TermSpec:
    if args.theorem is None or args.N is None:
        raise UsageError("q-verify needs --theorem and --N")
    n = args.n if args.n is not None else args.p
    if n is None:
        raise UsageError("q-verify needs --n (or --p)")
    return TermSpec(args.theorem, args.N, n, args.s, args.r)


def cmd_q_verify(args) -> Outcome:
    spec = _term_spec(args)
    report = verify_theorem(spec, workers=args.parallelism)
    lines = [report.description]
    for f in report.factors:
        where = f"Phi_{f.index_or_exp}" if f.kind == "cyclotomic" else f"x = q^{f.index_or_exp}"
        lines.append(f"  {where:<14} {f.verdict}" + (f"  ({f.detail})" if f.detail else ""))
    lines.append(f"overall: {report.overall}")
    if not args.no_timing:
        lines.append(f"elapsed: {report.elapsed_ms:.1f} ms")
    return Outcome(report.passed, {"report": report.to_dict(timing=not args.no_timing)}, lines)


def _prime_range(args, default_min: int = 5, default_max: int = 50) -> tuple[int, int]:
    if args.p is not None:
        return args.p, args.p
    pmin = default_min if args.pmin is None else args.pmin
    pmax = default_max if args.pmax is None else args.pmax
    if pmin > pmax:
        raise UsageError(f"empty prime range [{pmin}, {pmax}]")
    return pmin, pmax


def cmd_padic(args) -> Outcome:
    if args.family is None or args.N is None:
        raise UsageError("padic needs --family and --N")
    fam = corollary_family(args.family, args.N, args.exponent)
    if args.p is not None:
        fam.require(args.p)  # an explicitly named prime must qualify
    pmin, pmax = _prime_range(args)
    reports = sweep(fam, pmin, pmax, mode=args.mode, workers=args.parallelism)
    ok = all(r.verdict in ("pass", "not_applicable") for r in reports)
    lines = [f"{fam.id} N={fam.N} mod p^{fam.exponent} ({fam.target}), primes {pmin}..{pmax}"]
    for r in reports:
        if r.verdict == "not_applicable":
            lines.append(f"  p={r.p:<4} skipped ({r.detail})")
        else:
            lines.append(f"  p={r.p:<4} lhs={r.lhs_residue} rhs={r.rhs_residue} {r.verdict}")
    checked = [r for r in reports if r.verdict != "not_applicable"]
    lines.append(f"{sum(r.passed for r in checked)}/{len(checked)} primes pass")
    payload = {
        "family": fam.id,
        "N": fam.N,
        "exponent": fam.exponent,
        "target": fam.target,
        "mode": args.mode,
        "reports": [r.to_dict() for r in reports],
        "overall": "pass" if ok else "fail",
    }
    return Outcome(ok, payload, lines, csv=reports_to_csv(reports))


def cmd_lemma(args) -> Outcome:
    result = run_property_suite(seed=args.seed, trials=args.trials, parts=args.parts)
    guard = result["guard"]
    ok = not result["failures"] and guard["key1_violated"] and guard["identity_fails"]
    lines = [f"seed={result['seed']} trials={result['trials']} ({result['note']})"]
    for part, count in result["counts"].items():
        bad = sum(1 for f in result["failures"] if f["part"] == part)
        lines.append(f"  part {part}: {count - bad}/{count} hold")
    lines.append(
        "  guard: window violated={key1_violated}, identity fails={identity_fails}".format(**guard)
    )
    lines.append(f"overall: {'pass' if ok else 'fail'}")
    result["overall"] = "pass" if ok else "fail"
    return Outcome(ok, result, lines)


def cmd_conjecture(args) -> Outcome:
    """Triple central-binomial sum: zero mod p^2 is checked, residues mod p^3 reported."""
    pmin, pmax = _prime_range(args, default_max=100)
    fam = corollary_family("GZ_conjecture", 3)
    reports = sweep(fam, pmin, pmax, mode=args.mode, workers=args.parallelism)
    cube = gz_triple_residues_mod_p3(pmin, pmax)
    checked = [r for r in reports if r.verdict != "not_applicable"]
    ok = all(r.passed for r in checked)
    nonzero = sorted(p for p, v in cube.items() if v)
    lines = [f"triple sum mod p^2, primes {pmin}..{pmax}"]
    for r in checked:
        lines.append(f"  p={r.p:<4} mod p^2: {r.lhs_residue} {r.verdict}   mod p^3: {cube[r.p]}")
    lines.append(f"mod p^2: {sum(r.passed for r in checked)}/{len(checked)} primes give 0")
    lines.append(f"mod p^3: nonzero at {nonzero if nonzero else 'no prime in range'}")
    payload = {
        "reports": [r.to_dict() for r in reports],
        "mod_p3": {str(p): v for p, v in cube.items()},
        "mod_p3_nonzero": nonzero,
        "overall": "pass" if ok else "fail",
    }
    return Outcome(ok, payload, lines)


def cmd_cross_check(args) -> Outcome:
    """Single sums against their Legendre-symbol values, exact against modular
    residues for small primes, and family 5 single sums at x = q^{+-n}."""
    pmin, pmax = _prime_range(args, default_max=40)
    checks: list[dict] = []
    for fid in _CROSS_FAMILIES:
        fam1 = corollary_family(fid, 2)
        for p in primes_between(pmin, pmax):
            if not fam1.applies_to(p):
                continue
            r = single_sum_cross_check(fid, p)
            checks.append({"check": "single_sum", "family": fid, "p": p, "verdict": r.verdict})
    for fid in FAMILY_IDS:
        if fid == "GZ_conjecture":
            continue
        fam = corollary_family(fid, 2)
        for p in primes_between(max(pmin, 5), min(pmax, 13)):
            if fam.applies_to(p):
                v = "pass" if modes_agree(fam, p) else "fail"
                checks.append({"check": "modes_agree", "family": fid, "p": p, "verdict": v})
    for n in (5, 7, 11, 13):
        spec = TermSpec(5, 2, n)
        for sign in (1, -1):
            v = "pass" if verify_specialized_single_sum(spec, sign) else "fail"
            checks.append({"check": "family5_single", "n": n, "sign": sign, "verdict": v})
    ok = all(c["verdict"] == "pass" for c in checks)
    lines = []
    for kind in ("single_sum", "modes_agree", "family5_single"):
        sub = [c for c in checks if c["check"] == kind]
        bad = [c for c in sub if c["verdict"] != "pass"]
        lines.append(f"{kind}: {len(sub) - len(bad)}/{len(sub)} pass")
        lines.extend(f"  FAIL {c}" for c in bad)
    lines.append(f"overall: {'pass' if ok else 'fail'}")
    return Outcome(ok, {"checks": checks, "overall": "pass" if ok else "fail"}, lines)


_THEOREMS = {
    1: "weight [2sk+1], base q^s, needs 2 <= N <= s and primes of n = 1 mod s",
    2: "weight [2sk+r], base q^s, n = p prime = r mod s, (p-r)/s <= (p-1)/N",
    3: "weight [4k+1], base q^4 (x,x^-1 over q^2), n with primes = 1 mod 4, N in 2..4",
    4: "as 3 in q^2 with a quartic Pochhammer, modulus [n]_{q^2}, x = q^{+-2n}",
    5: "weight [8k+1] q^{2k^2}, base q^6, n coprime to 6, N in 2..4",
}


def cmd_list(args) -> Outcome:
    lines = ["q-verify theorem families:"]
    lines += [f"  {t}: {desc}" for t, desc in _THEOREMS.items()]
    lines.append("padic families:")
    fams = {}
    for fid in FAMILY_IDS:
        Ns = [N for N in (2, 3, 4) if _has_N(fid, N)]
        fams[fid] = Ns
        lines.append(f"  {fid}: N in {Ns}")
    return Outcome(True, {"theorems": {str(k): v for k, v in _THEOREMS.items()}, "families": fams}, lines)


def _has_N(fid: str, N: int) -> bool:
    try:
        corollary_family(fid, N)
    except CorollaryError:
        return False
    return True


COMMANDS = {
    "q-verify": cmd_q_verify,
    "padic": cmd_padic,
    "lemma": cmd_lemma,
    "conjecture": cmd_conjecture,
    "cross-check": cmd_cross_check,
    "list": cmd_list,
}


# -- argument parsing and emission -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit a JSON report")
    fmt.add_argument("--csv", action="store_true", help="emit CSV (padic only)")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--parallelism", type=int, default=1, metavar="K")
    common.add_argument("--no-timing", action="store_true", help="omit timing fields")

    parser = _Parser(prog="qcong", description="Exact q-congruence and p-adic supercongruence checks.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    q = sub.add_parser("q-verify", parents=[common], help="check a q-congruence family instance")
    q.add_argument("--theorem", type=int, choices=range(1, 6))
    q.add_argument("--s", type=int)
    q.add_argument("--r", type=int)
    q.add_argument("--N", type=int)
    q.add_argument("--n", type=int)
    q.add_argument("--p", type=int, help="alias of --n")

    def primes(sp):
        sp.add_argument("--p", type=int, help="a single prime")
        sp.add_argument("--pmin", type=int)
        sp.add_argument("--pmax", type=int)
        sp.add_argument("--mode", choices=("modular", "exact"), default="modular")

    pa = sub.add_parser("padic", parents=[common], help="sweep a corollary family over primes")
    pa.add_argument("--family")
    pa.add_argument("--N", type=int)
    pa.add_argument("--exponent", type=int, help="check modulo p^EXPONENT instead")
    primes(pa)

    le = sub.add_parser("lemma", parents=[common], help="seeded convolution identity suite")
    le.add_argument("--seed", type=int, default=0)
    le.add_argument("--trials", type=int, default=200)
    le.add_argument("--parts", default="abc")

    primes(sub.add_parser("conjecture", parents=[common], help="triple sum mod p^2 and mod p^3"))
    primes(sub.add_parser("cross-check", parents=[common], help="single sums and dual-route agreement"))
    sub.add_parser("list", parents=[common], help="list families")
    return parser


def _validate(args) -> None:
    if args.command is None:
        raise UsageError("no command given")
    if args.parallelism < 1:
        raise UsageError("--parallelism must be >= 1")
    if args.csv and args.command != "padic":
        raise UsageError("--csv is only available for padic")
    if getattr(args, "trials", 1) < 1:
        raise UsageError("--trials must be >= 1")


def _render(args, outcome: Outcome, elapsed_ms: float) -> str:
    if args.csv:
        return outcome.csv or ""
    if args.json:
        doc = {"schema": SCHEMA, "command": args.command, **outcome.payload}
        if not args.no_timing:
            doc["elapsed_ms"] = round(elapsed_ms, 3)
        return json.dumps(doc, indent=2) + "\n"
    return "\n".join(outcome.lines) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qcong: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        outcome = COMMANDS[args.command](args)
    except (UsageError, SpecError, CorollaryError, ValueError) as exc:
        print(f"qcong: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CoprimalityError as exc:
        print(f"qcong: coprimality error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, _render(args, outcome, (time.perf_counter() - start) * 1000.0))
    return EXIT_PASS if outcome.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
