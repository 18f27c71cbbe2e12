"""Term generators for the five truncated multi-sum families and their targets.

Every family has a hypergeometric term alpha(k) in q and a free parameter
x.  Two independent constructions are provided:

* :func:`alpha_factors` gives a factored :class:`QXProduct` (cyclotomic
  exponents plus linear x-factors).  This path drives the large checks.
* :func:`alpha` expands the q-Pochhammer products directly into a
  :class:`QXFraction`.  It is the oracle for small instances.

Families (``theorem`` field of :class:`TermSpec`):

1. (-1)^k q^{s(k+1)k/2 - k} [2sk+1] (xq, q/x, q; q^s)_k / (xq^s, q^s/x, q^s; q^s)_k
2. as 1 with q^r in place of q in the numerator products, q^{-rk} and weight
   [2sk+r] (the weight [2sk+1] does not vanish at p-th roots of unity once r > 1)
3. q^{2k} [8k+1] (q;q^4)_k^2 (xq, q/x; q^4)_k / ((q^4;q^4)_k^2 (xq^4, q^4/x; q^4)_k)
4. q^{-4k} [8k+1]^2 [8k+1]_{q^2} (q^2;q^8)_k^2 (xq^2, q^2/x; q^8)_k
   / ((q^8;q^8)_k^2 (xq^8, q^8/x; q^8)_k)
5. q^{2k^2} [8k+1] (xq, q/x; q^2)_k (q;q^2)_{2k} / ((xq^6, q^6/x; q^6)_k (q^2;q^2)_{2k})
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

from .convolution_engine import convolve_power
from .exact_arith import divisors, is_prime, jacobi_symbol, prime_factors
from .laurent_x import (
    CongruenceReport,
    CycloXPoly,
    ModulusSpec,
    QLaurentFraction,
    QXFraction,
    QXProduct,
    QXProductSum,
    XLaurent,
    check_congruence,
    product_images_at_x_power,
    product_images_mod_cyclotomic,
    x_pochhammer,
)
from .poly_q import (
    CycloProduct,
    QLaurentPoly,
    QPoly,
    q_integer,
    q_integer_factors,
    q_pochhammer_factors,
    q_pochhammer_pure,
)

__all__ = [
    "SpecError",
    "TermSpec",
    "alpha",
    "alpha_factors",
    "alpha_numerators",
    "rhs",
    "rhs_factors",
    "modulus",
    "TruncatedSum",
    "truncated_sum",
    "truncated_sum_explicit",
    "verify_theorem",
    "verify_vanishing_at_root",
    "specialized_single_sum",
    "verify_specialized_single_sum",
    "applicable_roots",
    "term_table",
    "term_table_json",
]


class SpecError(ValueError):
    """Parameters violate a family's hypotheses."""


@dataclass(frozen=True)
class TermSpec:
    theorem: int
    N: int
    n: int
    s: int | None = None
    r: int | None = None

    def __post_init__(self):
        t, N, n, s, r = self.theorem, self.N, self.n, self.s, self.r
        if t not in (1, 2, 3, 4, 5):
            raise SpecError(f"unknown theorem family {t}")
        if n < 1:
            raise SpecError("n must be a positive integer")
        if t in (1, 2):
            if s is None:
                raise SpecError(f"family {t} needs s")
        elif s is not None:
            raise SpecError(f"family {t} takes no s")
        if t != 2 and r is not None:
            raise SpecError(f"family {t} takes no r")
        if t == 1:
            if not 2 <= N <= s:
                raise SpecError(f"need 2 <= N <= s (got N={N}, s={s})")
            bad = [p for p in prime_factors(n) if p % s != 1]
            if bad:
                raise SpecError(f"prime factors {bad} of n are not 1 mod {s}")
        elif t == 2:
            if r is None:
                raise SpecError("family 2 needs r")
            if N < 2:
                raise SpecError("N must be >= 2")
            if s < 1 or r < 1:
                raise SpecError("family 2 is supported for s >= 1 and r >= 1")
            if math.gcd(r, s) != 1:
                raise SpecError(f"gcd(r, s) = {math.gcd(r, s)} != 1")
            if not is_prime(n):
                raise SpecError(f"p = {n} is not prime")
            if (n - r) % s:
                raise SpecError(f"p = {n} is not {r} mod {s}")
            if r > n:
                raise SpecError(f"need r <= p (r={r}, p={n})")
            if not self.inequality_holds:
                raise SpecError(f"(p-r)/s <= (p-1)/N fails: ({n}-{r})/{s} > ({n}-1)/{N}")
        else:
            if N not in (2, 3, 4):
                raise SpecError("N must be 2, 3 or 4")
            if t in (3, 4):
                bad = [p for p in prime_factors(n) if p % 4 != 1]
                if bad:
                    raise SpecError(f"prime factors {bad} of n are not 1 mod 4")
            elif math.gcd(n, 6) != 1:
                raise SpecError("n must be coprime to 6")

    @property
    def inequality_holds(self) -> bool:
        # (p - r)/s <= (p - 1)/N without division
        return (self.n - self.r) * self.N <= (self.n - 1) * self.s

    @property
    def x_scale(self) -> int:
        """x is specialized at q^{+-scale*n}."""
        return 2 if self.theorem == 4 else 1

    @property
    def label(self) -> str:
        extra = ""
        if self.s is not None:
            extra += f", s={self.s}"
        if self.r is not None:
            extra += f", r={self.r}"
        var = "p" if self.theorem == 2 else "n"
        return f"theorem {self.theorem} (N={self.N}{extra}, {var}={self.n})"

    def with_N(self, N: int) -> "TermSpec":
        return TermSpec(self.theorem, N, self.n, self.s, self.r)


def _shift(spec: TermSpec) -> int:
    return spec.r if spec.theorem == 2 else 1


def _exact_div(a: int, b: int, what: str) -> int:
    q, rem = divmod(a, b)
    if rem:
        raise SpecError(f"{what} is not an integer ({a}/{b})")
    return q


# -- factored terms -----------------------------------------------------------------


def _pair(c: int, m: int, k: int, sign: int) -> QXProduct:
    """(x q^c; q^m)_k (q^c/x; q^m)_k raised to sign."""
    return (QXProduct.x_pochhammer(c, m, k) * QXProduct.x_pochhammer(c, m, k, inverse=True)) ** sign


@lru_cache(maxsize=4096)
def alpha_factors(spec: TermSpec, k: int) -> QXProduct:
    if k < 0:
        raise ValueError("k must be >= 0")
    t = spec.theorem
    if t in (1, 2):
        s, c = spec.s, _shift(spec)
        q = CycloProduct((-1) ** k, s * k * (k + 1) // 2 - c * k)
        q = q * q_integer_factors(2 * s * k + c)
        q = q * q_pochhammer_factors(c, s, k) / q_pochhammer_factors(s, s, k)
        return QXProduct(q) * _pair(c, s, k, 1) * _pair(s, s, k, -1)
    if t == 3:
        q = CycloProduct(1, 2 * k) * q_integer_factors(8 * k + 1)
        q = q * (q_pochhammer_factors(1, 4, k) / q_pochhammer_factors(4, 4, k)) ** 2
        return QXProduct(q) * _pair(1, 4, k, 1) * _pair(4, 4, k, -1)
    if t == 4:
        q = CycloProduct(1, -4 * k) * q_integer_factors(8 * k + 1) ** 2
        q = q * q_integer_factors(8 * k + 1, 2)
        q = q * (q_pochhammer_factors(2, 8, k) / q_pochhammer_factors(8, 8, k)) ** 2
        return QXProduct(q) * _pair(2, 8, k, 1) * _pair(8, 8, k, -1)
    q = CycloProduct(1, 2 * k * k) * q_integer_factors(8 * k + 1)
    q = q * q_pochhammer_factors(1, 2, 2 * k) / q_pochhammer_factors(2, 2, 2 * k)
    return QXProduct(q) * _pair(1, 2, k, 1) * _pair(6, 6, k, -1)


def _rhs_base(spec: TermSpec, N: int) -> CycloProduct:
    t, n = spec.theorem, spec.n
    if t in (1, 2):
        s, c = spec.s, _shift(spec)
        e = _exact_div(N * (n - c) * (n - s + c), 2 * s, "q-exponent")
        sgn = _exact_div(N * (n - c), s, "sign exponent")
        return CycloProduct((-1) ** sgn, e) * q_integer_factors(n) ** N
    if t == 3:
        m = _exact_div(n - 1, 4, "(n-1)/4")
        ratio = q_pochhammer_factors(2, 4, m) / q_pochhammer_factors(4, 4, m)
        e = _exact_div(N * (1 - n), 4, "q-exponent")
        return (q_integer_factors(n) * ratio) ** N * CycloProduct(1, e)
    if t == 4:
        m = _exact_div(n - 1, 4, "(n-1)/4")
        ratio = q_pochhammer_factors(4, 8, m) / q_pochhammer_factors(8, 8, m)
        e = _exact_div(N * (1 - n), 2, "q-exponent")
        return (q_integer_factors(n, 2) * ratio) ** N * CycloProduct(1, e)
    # the single sum carries the Jacobi symbol (-3/n); it squares away for N = 2
    e = _exact_div(N * (1 - n), 2, "q-exponent")
    return CycloProduct(jacobi_symbol(-3, n) ** N, e) * q_integer_factors(n) ** N


def _correction_power(N: int) -> QXProductSum:
    """(1 - (1 - x q^2)(1 - q^2/x) / ((1-q)^2 (1+q^2)))^N, expanded binomially."""
    # (1-q)^2 (1+q^2) = Phi_1^2 Phi_4
    c_inv = CycloProduct(1, 0, {1: -2, 4: -1})
    lin = QXProduct(xlin={2: 1}, xinv={2: 1})
    return QXProductSum(
        QXProduct(CycloProduct(math.comb(N, j) * (-1) ** j) * c_inv**j) * lin**j
        for j in range(N + 1)
    )


def rhs_factors(spec: TermSpec, N: int | None = None) -> QXProductSum:
    """Right-hand side in factored form; ``N=1`` gives the single-sum value."""
    N = spec.N if N is None else N
    if spec.theorem == 5 and N in (3, 4):
        return QXProductSum()
    base = QXProduct(_rhs_base(spec, N))
    if spec.theorem == 4:
        return _correction_power(N) * base
    return QXProductSum.of(base)


def modulus(spec: TermSpec) -> ModulusSpec:
    n = spec.n
    divs = [d for d in divisors(n) if d > 1]
    if spec.theorem == 4:
        idx = tuple(sorted({d for d in divs} | {2 * d for d in divs}))
        return ModulusSpec(idx, (2 * n, -2 * n), f"[{n}]_(q^2) (1 - x q^{2 * n})(x - q^{2 * n})")
    if spec.theorem == 5 and spec.N in (3, 4):
        return ModulusSpec(tuple(divs), (), f"[{n}]")
    return ModulusSpec(tuple(divs), (n, -n), f"[{n}] (1 - x q^{n})(x - q^{n})")


# -- explicit terms (independent oracle path) ------------------------------------------


def _xpair(c: int, m: int, k: int) -> XLaurent:
    return x_pochhammer(c, m, k) * x_pochhammer(c, m, k, inverse=True)


def _explicit_parts(spec: TermSpec, k: int) -> tuple[XLaurent, XLaurent]:
    """Numerator and denominator of alpha(k), with every q^{-j} moved down."""
    t = spec.theorem
    if t in (1, 2):
        s, c = spec.s, _shift(spec)
        num = _xpair(c, s, k) * (
            q_integer(2 * s * k + c) * q_pochhammer_pure(c, s, k) * QPoly.monomial(s * k * (k + 1) // 2)
        )
        num = num * (-1) ** k
        den = _xpair(s, s, k) * (q_pochhammer_pure(s, s, k) * QPoly.monomial(c * k))
    elif t == 3:
        num = _xpair(1, 4, k) * (QPoly.monomial(2 * k) * q_integer(8 * k + 1) * q_pochhammer_pure(1, 4, k) ** 2)
        den = _xpair(4, 4, k) * q_pochhammer_pure(4, 4, k) ** 2
    elif t == 4:
        num = _xpair(2, 8, k) * (
            q_integer(8 * k + 1) ** 2 * q_integer(8 * k + 1, 2) * q_pochhammer_pure(2, 8, k) ** 2
        )
        den = _xpair(8, 8, k) * (QPoly.monomial(4 * k) * q_pochhammer_pure(8, 8, k) ** 2)
    else:
        num = _xpair(1, 2, k) * (
            q_pochhammer_pure(1, 2, 2 * k) * q_integer(8 * k + 1) * QPoly.monomial(2 * k * k)
        )
        den = _xpair(6, 6, k) * q_pochhammer_pure(2, 2, 2 * k)
    return num, den


def _den_cofactor(spec: TermSpec, k: int, K: int) -> XLaurent:
    """den(K) / den(k) for k <= K, built directly from the tail factors."""
    t, j = spec.theorem, K - k
    if t in (1, 2):
        s, c = spec.s, _shift(spec)
        return _xpair(s + s * k, s, j) * (q_pochhammer_pure(s + s * k, s, j) * QPoly.monomial(c * j))
    if t == 3:
        return _xpair(4 + 4 * k, 4, j) * q_pochhammer_pure(4 + 4 * k, 4, j) ** 2
    if t == 4:
        return _xpair(8 + 8 * k, 8, j) * (QPoly.monomial(4 * j) * q_pochhammer_pure(8 + 8 * k, 8, j) ** 2)
    return _xpair(6 + 6 * k, 6, j) * q_pochhammer_pure(2 + 4 * k, 2, 2 * j)


def alpha(spec: TermSpec, k: int) -> QXFraction:
    """alpha(k) as an explicit fraction of Laurent polynomials in x."""
    if k < 0:
        raise ValueError("k must be >= 0")
    num, den = _explicit_parts(spec, k)
    return QXFraction(num, den)


def alpha_numerators(spec: TermSpec, K: int) -> tuple[list[XLaurent], XLaurent]:
    """Numerators of alpha(0..K) over the single denominator den(K)."""
    nums = []
    for k in range(K + 1):
        num, _ = _explicit_parts(spec, k)
        nums.append(num * _den_cofactor(spec, k, K))
    return nums, _explicit_parts(spec, K)[1]


def rhs(spec: TermSpec, N: int | None = None) -> QXFraction:
    """Right-hand side expanded explicitly (independent of :func:`rhs_factors`)."""
    N = spec.N if N is None else N
    t, n = spec.theorem, spec.n
    if t == 5 and N in (3, 4):
        return QXFraction(XLaurent(), 1)
    if t in (1, 2):
        s, c = spec.s, _shift(spec)
        e = _exact_div(N * (n - c) * (n - s + c), 2 * s, "q-exponent")
        sgn = (-1) ** _exact_div(N * (n - c), s, "sign exponent")
        num, den = q_integer(n) ** N * sgn, QPoly([1])
    elif t == 3:
        m = _exact_div(n - 1, 4, "(n-1)/4")
        e = _exact_div(N * (1 - n), 4, "q-exponent")
        num = (q_integer(n) * q_pochhammer_pure(2, 4, m)) ** N
        den = q_pochhammer_pure(4, 4, m) ** N
    elif t == 4:
        m = _exact_div(n - 1, 4, "(n-1)/4")
        e = _exact_div(N * (1 - n), 2, "q-exponent")
        num = (q_integer(n, 2) * q_pochhammer_pure(4, 8, m)) ** N
        den = q_pochhammer_pure(8, 8, m) ** N
    else:
        e = _exact_div(N * (1 - n), 2, "q-exponent")
        num, den = q_integer(n) ** N * jacobi_symbol(-3, n) ** N, QPoly([1])
    if e >= 0:
        num = num * QPoly.monomial(e)
    else:
        den = den * QPoly.monomial(-e)
    out = QXFraction(num, den)
    if t == 4:
        c = QPoly([1, -1]) ** 2 * QPoly([1, 0, 1])
        lin = XLaurent({0: QPoly([1]), 1: QPoly.monomial(2, -1)}) * XLaurent(
            {0: QPoly([1]), -1: QPoly.monomial(2, -1)}
        )
        out = out * QXFraction(XLaurent.const(c) - lin, c) ** N
    return out


# -- truncated multi-sums -------------------------------------------------------------


class TruncatedSum:
    """sum_{k<length} t(k), t the N-fold self-convolution of a factored term list.

    Evaluated lazily: each congruence image is computed by mapping the terms
    into the image ring first and convolving there.
    """

    def __init__(self, terms: list[QXProduct], N: int, label: str = ""):
        if not terms:
            raise ValueError("empty term list")
        self.terms = list(terms)
        self.N = N
        self.label = label

    def __len__(self) -> int:
        return len(self.terms)

    def _reduce(self, nums, den, zero):
        t = convolve_power(nums, self.N, len(nums))
        total = zero
        for v in t:
            total = total + v
        return total, den**self.N

    def image_mod_cyclotomic(self, d: int) -> tuple[CycloXPoly, CycloXPoly]:
        nums, den = product_images_mod_cyclotomic(self.terms, d)
        return self._reduce(nums, den, CycloXPoly.zero(d))

    def image_at_x_power(self, e: int) -> tuple[QLaurentPoly, QLaurentPoly]:
        nums, den = product_images_at_x_power(self.terms, e)
        return self._reduce(nums, den, QLaurentPoly())

    def __repr__(self) -> str:
        return f"TruncatedSum({self.label or len(self.terms)}, N={self.N})"


def truncated_sum(spec: TermSpec, N: int | None = None, length: int | None = None) -> TruncatedSum:
    N = spec.N if N is None else N
    length = spec.n if length is None else length
    return TruncatedSum([alpha_factors(spec, k) for k in range(length)], N, spec.label)


def truncated_sum_explicit(spec: TermSpec, N: int | None = None, length: int | None = None) -> QXFraction:
    """The same sum as one explicit fraction: convolved numerators over den(n-1)^N."""
    N = spec.N if N is None else N
    length = spec.n if length is None else length
    nums, den = alpha_numerators(spec, length - 1)
    t = convolve_power(nums, N, length)
    total = XLaurent()
    for v in t:
        total = total + v
    return QXFraction(total, den**N)


def verify_theorem(spec: TermSpec, *, workers: int = 1) -> CongruenceReport:
    """Check the family's congruence for this instance on every modulus factor."""
    m = modulus(spec)
    report = check_congruence(truncated_sum(spec), rhs_factors(spec), m, workers=workers)
    desc = f"{spec.label} mod {m.description}"
    if spec.theorem == 2:
        desc += f"; (p-r)/s <= (p-1)/N: {spec.n - spec.r}/{spec.s} <= {spec.n - 1}/{spec.N} holds"
    report.description = desc
    return report


# -- proof-identity checks ----------------------------------------------------------


def verify_vanishing_at_root(spec: TermSpec, d: int) -> bool:
    """sum_{k<d} alpha(k) == 0 modulo Phi_d, with x left free."""
    if d < 2:
        raise ValueError("d must be >= 2")
    nums, _ = product_images_mod_cyclotomic([alpha_factors(spec, k) for k in range(d)], d)
    total = CycloXPoly.zero(d)
    for v in nums:
        total = total + v
    return not total


def specialized_single_sum(spec: TermSpec, sign: int) -> QLaurentFraction:
    """sum_{k<n} alpha(k) at x = q^{sign * scale * n}."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    e = sign * spec.x_scale * spec.n
    nums, den = product_images_at_x_power([alpha_factors(spec, k) for k in range(spec.n)], e)
    return QLaurentFraction(sum(nums, QLaurentPoly()), den)


def verify_specialized_single_sum(spec: TermSpec, sign: int) -> bool:
    """The specialized single sum equals the N = 1 right-hand side exactly."""
    e = sign * spec.x_scale * spec.n
    value = specialized_single_sum(spec, sign)
    num, den = rhs_factors(spec, 1).image_at_x_power(e)
    return value == QLaurentFraction(num, den)


def applicable_roots(spec: TermSpec, dmax: int) -> list[int]:
    """Orders d <= dmax of roots of unity at which the family's vanishing applies."""
    out = []
    for d in range(2, dmax + 1):
        t = spec.theorem
        if t == 1:
            ok = all(p % spec.s == 1 for p in prime_factors(d))
        elif t == 2:
            ok = is_prime(d) and d % spec.s == spec.r % spec.s and spec.r <= d
        elif t in (3, 4):
            ok = all(p % 4 == 1 for p in prime_factors(d))
        else:
            ok = math.gcd(d, 6) == 1
        if ok:
            out.append(d)
    return out


def term_table(spec: TermSpec, K: int) -> list[str]:
    """Canonical strings "num / den" of alpha(0..K)."""
    out = []
    for k in range(K + 1):
        f = alpha(spec, k)
        out.append(f"({f.num}) / ({f.den})")
    return out


def term_table_json(spec: TermSpec, K: int) -> str:
    return json.dumps({"family": spec.label, "terms": term_table(spec, K)}, indent=2)
