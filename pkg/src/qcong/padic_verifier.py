"""Classical (q = 1) multi-sum congruences checked in p-adic arithmetic.

Each family has a per-index base term b(j) and an outer factor sigma(k);
the left side is

    sum_{k<p} sigma(k) * sum_{i_1+...+i_N=k} b(i_1) ... b(i_N)

and is reduced modulo p^e.  Two arithmetic paths compute it: exact
rationals reduced at the end, and residues mod p^e throughout.  They must
agree.  A third, brute-force nested-loop evaluation is provided for small p.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

from .convolution_engine import convolve_power
from .exact_arith import is_prime, legendre_symbol, mod_prime_power, primes_between

__all__ = [
    "FAMILY_IDS",
    "CorollaryError",
    "NotApplicable",
    "CorollaryFamily",
    "corollary_family",
    "pochhammer_rational",
    "base_terms",
    "base_terms_mod",
    "corollary_lhs",
    "corollary_rhs",
    "brute_force_lhs",
    "PadicReport",
    "verify_corollary",
    "sweep",
    "reports_to_csv",
    "reports_to_json",
    "modes_agree",
    "gz_triple_residues_mod_p3",
    "single_sum_cross_check",
]


class CorollaryError(ValueError):
    """Invalid family parameters or a p-adic coprimality failure."""


class NotApplicable(CorollaryError):
    """The prime fails the family's residue condition."""


GZ_SCALE = Fraction(1, 2**8 * 3**2)


@dataclass(frozen=True)
class _Shape:
    base: Fraction | None  # None: central-binomial form
    power: int
    weight: tuple[int, int]  # u*j + v
    weight_power: int
    signed: bool
    scaled: bool  # outer factor GZ_SCALE^k
    residue: tuple[int, int] | None  # (modulus, residue) condition on p
    targets: dict  # N -> (target kind, exponent)


_SHAPES: dict[str, _Shape] = {
    "E2": _Shape(Fraction(1, 3), 3, (6, 1), 1, True, False, (3, 1), {2: ("p2", 3), 3: ("zero", 3)}),
    "E2_23": _Shape(Fraction(2, 3), 3, (6, 2), 1, True, False, (3, 2), {2: ("p2", 3), 3: ("zero", 3)}),
    "F2": _Shape(
        Fraction(1, 4), 3, (8, 1), 1, True, False, (4, 1), {2: ("p2", 3), 3: ("zero", 3), 4: ("zero", 3)}
    ),
    "F2_34": _Shape(
        Fraction(3, 4), 3, (8, 3), 1, True, False, (4, 3), {2: ("p2", 3), 3: ("zero", 3), 4: ("zero", 3)}
    ),
    "G2": _Shape(
        Fraction(1, 4), 4, (8, 1), 1, False, False, (4, 1), {2: ("p2R2", 3), 3: ("zero", 3), 4: ("zero", 3)}
    ),
    "LW": _Shape(
        Fraction(1, 4), 4, (8, 1), 3, False, False, (4, 1), {2: ("p2R2", 3), 3: ("zero", 3), 4: ("zero", 3)}
    ),
    "GZ": _Shape(None, 1, (8, 1), 1, False, True, None, {2: ("p2", 3), 3: ("zero", 1), 4: ("zero", 1)}),
    "GZ_conjecture": _Shape(None, 1, (8, 1), 1, False, True, None, {3: ("zero", 2)}),
}

FAMILY_IDS = tuple(_SHAPES)


@dataclass(frozen=True)
class CorollaryFamily:
    id: str
    N: int
    target: str  # "p2" | "zero" | "p2R2"
    exponent: int  # congruence is modulo p^exponent

    @property
    def shape(self) -> _Shape:
        return _SHAPES[self.id]

    def applies_to(self, p: int) -> bool:
        if p <= 3 or not is_prime(p):
            return False
        res = self.shape.residue
        return res is None or p % res[0] == res[1]

    def require(self, p: int) -> None:
        if not self.applies_to(p):
            raise NotApplicable(f"{self.id} does not apply to p = {p}")


def corollary_family(fid: str, N: int, exponent: int | None = None) -> CorollaryFamily:
    """Look up a family by id (case-insensitive); ``exponent`` overrides the modulus p^e."""
    key = {k.lower(): k for k in _SHAPES}.get(fid.lower())
    if key is None:
        raise CorollaryError(f"unknown family {fid!r}; choose from {', '.join(FAMILY_IDS)}")
    targets = _SHAPES[key].targets
    if N not in targets:
        raise CorollaryError(f"{key} is stated for N in {sorted(targets)}, not N = {N}")
    target, e = targets[N]
    return CorollaryFamily(key, N, target, e if exponent is None else exponent)


def pochhammer_rational(a, k: int) -> Fraction:
    """(a)_k = a (a+1) ... (a+k-1)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    out = Fraction(1)
    a = Fraction(a)
    for j in range(k):
        out *= a + j
    return out


def _weight(shape: _Shape, j: int) -> int:
    u, v = shape.weight
    return (u * j + v) ** shape.weight_power


def base_terms(fam: CorollaryFamily, p: int) -> list[Fraction]:
    """b(0..p-1) as exact rationals."""
    fam.require(p)
    sh = fam.shape
    out = []
    if sh.base is None:
        for j in range(p):
            out.append(Fraction(math.comb(2 * j, j) ** 2 * math.comb(4 * j, 2 * j) * _weight(sh, j)))
        return out
    ratio = Fraction(1)  # (a)_j / j!
    for j in range(p):
        if j:
            ratio = ratio * (sh.base + j - 1) / j
        out.append(ratio**sh.power * _weight(sh, j))
    return out


def base_terms_mod(fam: CorollaryFamily, p: int, modulus: int) -> list[int]:
    """b(0..p-1) as residues modulo ``modulus`` (a power of p)."""
    fam.require(p)
    sh = fam.shape
    out = []
    if sh.base is None:
        for j in range(p):
            out.append(math.comb(2 * j, j) ** 2 * math.comb(4 * j, 2 * j) * _weight(sh, j) % modulus)
        return out
    a_num, a_den = sh.base.numerator, sh.base.denominator
    inv_den = pow(a_den, -1, modulus)
    num = 1  # (a)_j * a_den^j, an integer product
    fac = 1
    for j in range(p):
        if j:
            num = num * (a_num + (j - 1) * a_den) % modulus
            fac = fac * j % modulus
        # (a)_j / j! = num / (a_den^j * j!)
        r = num * pow(inv_den, j, modulus) * pow(fac, -1, modulus) % modulus
        out.append(pow(r, sh.power, modulus) * _weight(sh, j) % modulus)
    return out


def _outer(sh: _Shape, k: int) -> Fraction:
    out = Fraction(-1 if (sh.signed and k % 2) else 1)
    if sh.scaled:
        out *= GZ_SCALE**k
    return out


def corollary_lhs(fam: CorollaryFamily, p: int, mode: str = "modular") -> int:
    """Left side modulo p^e, via the N-fold self-convolution of the base terms."""
    M = p**fam.exponent
    sh = fam.shape
    if mode == "exact":
        t = convolve_power(base_terms(fam, p), fam.N, p)
        total = sum((_outer(sh, k) * t[k] for k in range(p)), Fraction(0))
        try:
            return mod_prime_power(total, p, fam.exponent)
        except ValueError as exc:
            raise CorollaryError(str(exc)) from None
    if mode != "modular":
        raise ValueError("mode must be 'exact' or 'modular'")
    t = convolve_power(base_terms_mod(fam, p, M), fam.N, p)
    scale = mod_prime_power(GZ_SCALE, p, fam.exponent) if sh.scaled else 1
    total, w = 0, 1
    for k in range(p):
        sign = -1 if (sh.signed and k % 2) else 1
        total += sign * w * t[k]
        w = w * scale % M
    return total % M


def brute_force_lhs(fam: CorollaryFamily, p: int) -> int:
    """Literal nested sums over all index tuples, each term rebuilt from scratch."""
    fam.require(p)
    sh = fam.shape

    def b(j: int) -> Fraction:
        if sh.base is None:
            return Fraction(math.comb(2 * j, j) ** 2 * math.comb(4 * j, 2 * j) * _weight(sh, j))
        return (pochhammer_rational(sh.base, j) / math.factorial(j)) ** sh.power * _weight(sh, j)

    total = Fraction(0)
    for k in range(p):
        inner = Fraction(0)
        for idx in itertools.product(range(k + 1), repeat=fam.N - 1):
            last = k - sum(idx)
            if last < 0:
                continue
            term = b(last)
            for j in idx:
                term *= b(j)
            inner += term
        total += _outer(sh, k) * inner
    return mod_prime_power(total, p, fam.exponent)


def _half_ratio(p: int) -> Fraction:
    m = (p - 1) // 4
    return pochhammer_rational(Fraction(1, 2), m) / math.factorial(m)


def corollary_rhs(fam: CorollaryFamily, p: int) -> int:
    fam.require(p)
    e = fam.exponent
    if fam.target == "zero":
        return 0
    if fam.target == "p2":
        return p * p % p**e
    try:
        return mod_prime_power(p * p * _half_ratio(p) ** 2, p, e)
    except ValueError as exc:
        raise CorollaryError(str(exc)) from None


@dataclass
class PadicReport:
    family: str
    N: int
    p: int
    exponent: int
    lhs_residue: int | None
    rhs_residue: int | None
    verdict: str  # "pass" | "fail" | "error" | "not_applicable"
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        d = asdict(self)
        if not d["detail"]:
            del d["detail"]
        return d


def verify_corollary(fam: CorollaryFamily, p: int, mode: str = "modular") -> PadicReport:
    """Compare both sides modulo p^e.  Raises NotApplicable for excluded primes."""
    fam.require(p)
    try:
        lhs = corollary_lhs(fam, p, mode)
        rhs = corollary_rhs(fam, p)
    except CorollaryError as exc:
        return PadicReport(fam.id, fam.N, p, fam.exponent, None, None, "error", str(exc))
    return PadicReport(fam.id, fam.N, p, fam.exponent, lhs, rhs, "pass" if lhs == rhs else "fail")


def _sweep_one(args) -> PadicReport:
    fam, p, mode = args
    if not fam.applies_to(p):
        reason = "p <= 3" if p <= 3 else "residue condition fails"
        return PadicReport(fam.id, fam.N, p, fam.exponent, None, None, "not_applicable", reason)
    return verify_corollary(fam, p, mode)


def sweep(
    fam: CorollaryFamily, pmin: int, pmax: int, mode: str = "modular", workers: int = 1
) -> list[PadicReport]:
    """One report per prime in [pmin, pmax], excluded primes marked not_applicable."""
    jobs = [(fam, p, mode) for p in primes_between(pmin, pmax)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]


def reports_to_csv(reports: list[PadicReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "family", "N", "lhs_residue", "rhs_residue", "verdict"])
    for r in reports:
        w.writerow([r.p, r.family, r.N, "" if r.lhs_residue is None else r.lhs_residue,
                    "" if r.rhs_residue is None else r.rhs_residue, r.verdict])
    return buf.getvalue()


def reports_to_json(reports: list[PadicReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def modes_agree(fam: CorollaryFamily, p: int) -> bool:
    return corollary_lhs(fam, p, "exact") == corollary_lhs(fam, p, "modular")


def gz_triple_residues_mod_p3(pmin: int, pmax: int) -> dict[int, int]:
    """The central-binomial triple sum modulo p^3 for each prime p > 3 in range."""
    fam = corollary_family("GZ", 3, exponent=3)
    return {p: corollary_lhs(fam, p) for p in primes_between(max(pmin, 5), pmax)}


# -- optional single-sum cross-checks -------------------------------------------------

_SINGLE_TARGETS = {
    "E2": lambda p: Fraction(p),
    "F2": lambda p: Fraction(p * legendre_symbol(-2, p)),
    "G2": lambda p: p * _half_ratio(p),
    "LW": lambda p: -p * _half_ratio(p),
    "GZ": lambda p: Fraction(p * legendre_symbol(-3, p)),
}


def single_sum_cross_check(fid: str, p: int) -> PadicReport:
    """The N = 1 sum against its classical Legendre-symbol target, modulo p^3."""
    key = {k.lower(): k for k in _SINGLE_TARGETS}.get(fid.lower())
    if key is None:
        raise CorollaryError(f"no single-sum target for {fid!r}")
    sh = _SHAPES[key]
    fam = CorollaryFamily(key, 1, "single", 3)
    fam.require(p)
    terms = base_terms(fam, p)
    lhs = mod_prime_power(sum((_outer(sh, k) * terms[k] for k in range(p)), Fraction(0)), p, 3)
    rhs = mod_prime_power(_SINGLE_TARGETS[key](p), p, 3)
    return PadicReport(key, 1, p, 3, lhs, rhs, "pass" if lhs == rhs else "fail")
