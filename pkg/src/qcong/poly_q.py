"""Univariate polynomials in q over the rationals.

QPoly is dense (index = exponent).  Integer-coefficient polynomials take a
fast multiplication path; rational ones are multiplied after clearing
denominators.  QLaurentPoly adds an exponent offset so that substitutions
like x := q^-n stay polynomial-like.

CycloProduct keeps q-only quantities such as (q^a; q^m)_k and [n] in
factored form ``c * q^e * prod Phi_m(q)^{e_m}``.  Cancellation between
numerator and denominator is then exact bookkeeping on exponents.
"""

from __future__ import annotations

import json
import math
import os
import re
import threading
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from pathlib import Path

from . import _intpoly
from .exact_arith import divisors

__all__ = [
    "QPoly",
    "QLaurentPoly",
    "CycloProduct",
    "q_integer",
    "cyclotomic",
    "cyclotomic_power",
    "q_pochhammer_pure",
    "divrem",
    "one_minus_q_power",
    "q_integer_factors",
    "q_pochhammer_factors",
]


def _canon(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int) and not isinstance(c, bool):
        return c
    if isinstance(c, _RationalABC):
        return _canon(Fraction(c))
    raise TypeError(f"coefficient must be an exact rational, got {c!r}")


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def _clear(coeffs) -> tuple[list[int], int]:
    den = math.lcm(*(c.denominator for c in coeffs if isinstance(c, Fraction))) if any(
        isinstance(c, Fraction) for c in coeffs
    ) else 1
    if den == 1:
        return list(coeffs), 1
    return [int(c * den) for c in coeffs], den


class QPoly:
    """Dense polynomial in q with exact rational coefficients (immutable)."""

    __slots__ = ("coeffs", "_integral")

    def __init__(self, coeffs=()):
        cs = [_canon(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self._integral = all(isinstance(c, int) for c in cs)

    @classmethod
    def _raw(cls, coeffs: list, integral: bool | None = None) -> "QPoly":
        # coeffs already canonical; trims trailing zeros
        _intpoly.trim(coeffs)
        p = object.__new__(cls)
        p.coeffs = tuple(coeffs)
        p._integral = all(isinstance(c, int) for c in coeffs) if integral is None else integral
        return p

    @classmethod
    def monomial(cls, exp: int, coeff=1) -> "QPoly":
        if exp < 0:
            raise ValueError("QPoly exponents must be non-negative")
        return cls([0] * exp + [coeff])

    @classmethod
    def constant(cls, c) -> "QPoly":
        return cls([c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_integral(self) -> bool:
        return self._integral

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, QPoly):
            return self.coeffs == other.coeffs
        if _is_scalar(other):
            return self.coeffs == QPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "QPoly":
        if isinstance(other, QPoly):
            return other
        if _is_scalar(other):
            return QPoly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        if self._integral and other._integral:
            return QPoly._raw(_intpoly.add(a, b), True)
        out = list(a)
        for i, c in enumerate(b):
            out[i] = _canon(out[i] + c)
        return QPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "QPoly":
        return QPoly._raw([-c for c in self.coeffs], self._integral)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            c = _canon(other)
            if c == 0:
                return QPoly()
            if self._integral and isinstance(c, int):
                return QPoly._raw([x * c for x in self.coeffs], True)
            return QPoly._raw([_canon(x * c) for x in self.coeffs])
        if not isinstance(other, QPoly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return QPoly()
        if self._integral and other._integral:
            return QPoly._raw(_intpoly.mul(list(self.coeffs), list(other.coeffs)), True)
        ia, da = _clear(self.coeffs)
        ib, db = _clear(other.coeffs)
        den = da * db
        return QPoly._raw([_canon(Fraction(c, den)) for c in _intpoly.mul(ia, ib)])

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "QPoly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = QPoly([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, value):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def shift(self, k: int) -> "QPoly":
        """Multiply by q^k (k >= 0)."""
        if k < 0:
            raise ValueError("use QLaurentPoly for negative shifts")
        if not self.coeffs:
            return self
        return QPoly._raw([0] * k + list(self.coeffs), self._integral)

    def compose_power(self, m: int) -> "QPoly":
        """p(q^m)."""
        if m < 1:
            raise ValueError("m must be positive")
        if not self.coeffs:
            return self
        out = [0] * (m * self.degree + 1)
        for i, c in enumerate(self.coeffs):
            out[m * i] = c
        return QPoly._raw(out, self._integral)

    def divrem(self, other: "QPoly") -> tuple["QPoly", "QPoly"]:
        return divrem(self, other)

    def __mod__(self, other: "QPoly") -> "QPoly":
        return divrem(self, other)[1]

    def __floordiv__(self, other: "QPoly") -> "QPoly":
        return divrem(self, other)[0]

    def exact_div(self, other: "QPoly") -> "QPoly":
        quo, rem = divrem(self, other)
        if rem:
            raise ArithmeticError("inexact polynomial division")
        return quo

    def multiplicity(self, factor: "QPoly", cap: int | None = None) -> int:
        """Largest v with factor^v | self (self nonzero, factor non-constant).

        With ``cap`` the search stops once v reaches it.
        """
        if not self.coeffs:
            raise ValueError("multiplicity in the zero polynomial is unbounded")
        if factor.degree < 1:
            raise ValueError("factor must be non-constant")
        v = 0
        cur = self
        while cap is None or v < cap:
            quo, rem = divrem(cur, factor)
            if rem:
                return v
            cur = quo
            v += 1
        return v

    def content_integral(self) -> tuple["QPoly", Fraction]:
        """(P, c) with self = c * P and P having coprime integer coefficients."""
        if not self.coeffs:
            return self, Fraction(1)
        ints, den = _clear(self.coeffs)
        g = 0
        for c in ints:
            g = math.gcd(g, c)
        if ints[-1] < 0:
            g = -g
        return QPoly._raw([c // g for c in ints], True), Fraction(g, den)

    def __str__(self) -> str:
        return _format_terms(self.coeffs, 0)

    def __repr__(self) -> str:
        return f"QPoly({self})"

    @classmethod
    def from_str(cls, text: str) -> "QPoly":
        lp = QLaurentPoly.from_str(text)
        if lp.offset < 0 and lp:
            raise ValueError("negative exponent in QPoly literal")
        return lp.to_qpoly()


def _format_coeff_term(c, exp: int, var: str = "q") -> str:
    if exp == 0:
        return str(c)
    mon = var if exp == 1 else f"{var}^{exp}"
    if c == 1:
        return mon
    if c == -1:
        return f"-{mon}"
    return f"{c}*{mon}"


def _format_terms(coeffs, offset: int, var: str = "q") -> str:
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        term = _format_coeff_term(c, i + offset, var)
        if not parts:
            parts.append(term)
        elif term.startswith("-"):
            parts.append(f" - {term[1:]}")
        else:
            parts.append(f" + {term}")
    return "".join(parts) if parts else "0"


_TERM_RE = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(q(?:\^(-?\d+))?)?\s*"
)


class QLaurentPoly:
    """Laurent polynomial in q: q^offset * (c0 + c1 q + ...), c0 != 0 unless zero."""

    __slots__ = ("offset", "core")

    def __init__(self, coeffs=(), offset: int = 0):
        core = coeffs if isinstance(coeffs, QPoly) else QPoly(coeffs)
        self.offset, self.core = _normalize_laurent(core, offset)

    @classmethod
    def _from(cls, core: QPoly, offset: int) -> "QLaurentPoly":
        obj = object.__new__(cls)
        obj.offset, obj.core = _normalize_laurent(core, offset)
        return obj

    @classmethod
    def monomial(cls, exp: int, coeff=1) -> "QLaurentPoly":
        return cls._from(QPoly([coeff]), exp)

    @classmethod
    def from_qpoly(cls, p: QPoly) -> "QLaurentPoly":
        return cls._from(p, 0)

    @property
    def coeffs(self) -> tuple:
        return self.core.coeffs

    @property
    def is_integral(self) -> bool:
        return self.core.is_integral

    def max_exp(self) -> int:
        return self.offset + self.core.degree

    def __bool__(self) -> bool:
        return bool(self.core)

    def __eq__(self, other) -> bool:
        if isinstance(other, QLaurentPoly):
            return self.offset == other.offset and self.core == other.core
        if isinstance(other, QPoly):
            return self == QLaurentPoly.from_qpoly(other)
        if _is_scalar(other):
            return self == QLaurentPoly([other])
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.offset, self.core))

    def _coerce(self, other):
        if isinstance(other, QLaurentPoly):
            return other
        if isinstance(other, QPoly):
            return QLaurentPoly.from_qpoly(other)
        if _is_scalar(other):
            return QLaurentPoly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other:
            return self
        if not self:
            return other
        lo = min(self.offset, other.offset)
        return QLaurentPoly._from(
            self.core.shift(self.offset - lo) + other.core.shift(other.offset - lo), lo
        )

    __radd__ = __add__

    def __neg__(self):
        return QLaurentPoly._from(-self.core, self.offset)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            return QLaurentPoly._from(self.core * other, self.offset)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QLaurentPoly._from(self.core * other.core, self.offset + other.offset)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "QLaurentPoly":
        if e < 0:
            raise ValueError("negative power")
        return QLaurentPoly._from(self.core**e, self.offset * e)

    def shift(self, k: int) -> "QLaurentPoly":
        return QLaurentPoly._from(self.core, self.offset + k)

    def to_qpoly(self) -> QPoly:
        if not self:
            return QPoly()
        if self.offset < 0:
            raise ValueError("Laurent polynomial has negative exponents")
        return self.core.shift(self.offset)

    def __call__(self, value):
        return self.core(value) * (Fraction(value) ** self.offset)

    def __str__(self) -> str:
        return _format_terms(self.core.coeffs, self.offset)

    def __repr__(self) -> str:
        return f"QLaurentPoly({self})"

    @classmethod
    def from_str(cls, text: str) -> "QLaurentPoly":
        text = text.strip()
        if text in ("", "0"):
            return cls()
        terms: dict[int, Fraction] = {}
        pos = 0
        while pos < len(text):
            m = _TERM_RE.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
            sign, coeff, mono, exp = m.groups()
            if coeff is None and mono is None:
                raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
            c = Fraction(coeff) if coeff is not None else Fraction(1)
            if sign == "-":
                c = -c
            e = 0 if mono is None else (int(exp) if exp is not None else 1)
            terms[e] = terms.get(e, 0) + c
            pos = m.end()
        lo = min(terms)
        dense = [0] * (max(terms) - lo + 1)
        for e, c in terms.items():
            dense[e - lo] = c
        return cls(dense, lo)


def _normalize_laurent(core: QPoly, offset: int) -> tuple[int, QPoly]:
    cs = core.coeffs
    if not cs:
        return 0, core
    k = 0
    while cs[k] == 0:
        k += 1
    if k:
        core = QPoly._raw(list(cs[k:]), core.is_integral)
    return offset + k, core


def divrem(a: QPoly, b: QPoly) -> tuple[QPoly, QPoly]:
    """Euclidean division over Q: a = quo*b + rem with deg rem < deg b."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if a.degree < b.degree:
        return QPoly(), a
    if a.is_integral and b.is_integral and b.coeffs[-1] == 1:
        quo, rem = _intpoly.divrem_monic(list(a.coeffs), list(b.coeffs))
        return QPoly._raw(quo, True), QPoly._raw(rem, True)
    rem = [Fraction(c) for c in a.coeffs]
    db = b.degree
    lead = Fraction(b.coeffs[-1])
    bc = b.coeffs
    quo = [Fraction(0)] * (a.degree - db + 1)
    for i in range(a.degree, db - 1, -1):
        c = rem[i]
        if c:
            f = c / lead
            quo[i - db] = f
            base = i - db
            for j in range(db):
                if bc[j]:
                    rem[base + j] -= f * bc[j]
            rem[i] = Fraction(0)
    return QPoly(quo), QPoly(rem[:db])


# -- cyclotomic polynomials --------------------------------------------------

_CYCLO: dict[int, QPoly] = {}
_CYCLO_LOCK = threading.Lock()


def _cache_dir() -> Path | None:
    d = os.environ.get("QCONG_CACHE_DIR")
    return Path(d) if d else None


def _load_spilled(n: int) -> QPoly | None:
    d = _cache_dir()
    if d is None:
        return None
    path = d / f"phi_{n}.json"
    try:
        return QPoly(json.loads(path.read_text()))
    except (OSError, ValueError):
        return None


def _spill(n: int, poly: QPoly) -> None:
    d = _cache_dir()
    if d is None:
        return
    try:
        d.mkdir(parents=True, exist_ok=True)
        (d / f"phi_{n}.json").write_text(json.dumps(list(poly.coeffs)))
    except OSError:
        pass


def cyclotomic(n: int) -> QPoly:
    """Phi_n(q) via Phi_n = (q^n - 1) / prod_{d | n, d < n} Phi_d, memoized."""
    if n < 1:
        raise ValueError("cyclotomic index must be >= 1")
    poly = _CYCLO.get(n)
    if poly is not None:
        return poly
    with _CYCLO_LOCK:
        poly = _CYCLO.get(n)
        if poly is not None:
            return poly
        poly = _load_spilled(n)
        if poly is None:
            poly = _compute_cyclotomic(n)
            _spill(n, poly)
        _CYCLO[n] = poly
    return poly


def _compute_cyclotomic(n: int) -> QPoly:
    num = QPoly.monomial(n) - 1
    den = QPoly([1])
    for d in divisors(n)[:-1]:
        # _CYCLO_LOCK is held by the caller; recurse on the unlocked helper
        phi = _CYCLO.get(d)
        if phi is None:
            phi = _load_spilled(d) or _compute_cyclotomic(d)
            _CYCLO[d] = phi
        den = den * phi
    quo, rem = divrem(num, den)
    assert not rem, f"nonzero remainder computing Phi_{n}"
    return quo


@lru_cache(maxsize=2048)
def cyclotomic_power(n: int, e: int) -> QPoly:
    return cyclotomic(n) ** e


def q_integer(n: int, base_exp: int = 1) -> QPoly:
    """[n]_{q^m} = sum_{j<n} q^{m j}."""
    if n < 0 or base_exp < 1:
        raise ValueError("q_integer needs n >= 0 and base_exp >= 1")
    if n == 0:
        return QPoly()
    out = [0] * (base_exp * (n - 1) + 1)
    for j in range(n):
        out[base_exp * j] = 1
    return QPoly(out)


def q_pochhammer_pure(a_exp: int, m: int, k: int) -> QPoly:
    """(q^a; q^m)_k = prod_{j<k} (1 - q^{a + m j})."""
    if a_exp < 0:
        raise ValueError("a_exp must be >= 0 here; negative shifts live in laurent_x")
    if m < 1 or k < 0:
        raise ValueError("need m >= 1 and k >= 0")
    out = QPoly([1])
    for j in range(k):
        out = out * (1 - QPoly.monomial(a_exp + m * j))
    return out


# -- factored products of cyclotomic polynomials -------------------------------


class CycloProduct:
    """``coeff * q^qexp * prod_m Phi_m(q)^exps[m]`` with integer exponents.

    coeff == 0 encodes the zero element.  Exponents may be negative, so this
    is a multiplicative group of nonzero rational functions plus zero.
    """

    __slots__ = ("coeff", "qexp", "exps")

    def __init__(self, coeff=1, qexp: int = 0, exps: dict[int, int] | None = None):
        self.coeff = Fraction(coeff)
        if self.coeff == 0:
            self.qexp, self.exps = 0, {}
        else:
            self.qexp = qexp
            self.exps = {m: e for m, e in (exps or {}).items() if e}

    @classmethod
    def zero(cls) -> "CycloProduct":
        return cls(0)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __bool__(self) -> bool:
        return self.coeff != 0

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloProduct(self.coeff * other, self.qexp, self.exps)
        if not isinstance(other, CycloProduct):
            return NotImplemented
        if not self or not other:
            return CycloProduct.zero()
        exps = dict(self.exps)
        for m, e in other.exps.items():
            exps[m] = exps.get(m, 0) + e
        return CycloProduct(self.coeff * other.coeff, self.qexp + other.qexp, exps)

    __rmul__ = __mul__

    def inverse(self) -> "CycloProduct":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        return CycloProduct(1 / self.coeff, -self.qexp, {m: -e for m, e in self.exps.items()})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloProduct(self.coeff / other, self.qexp, self.exps)
        return self * other.inverse()

    def __neg__(self):
        return CycloProduct(-self.coeff, self.qexp, self.exps)

    def __pow__(self, e: int) -> "CycloProduct":
        if e < 0:
            return self.inverse() ** (-e)
        if not self:
            return CycloProduct(1) if e == 0 else self
        return CycloProduct(self.coeff**e, self.qexp * e, {m: x * e for m, x in self.exps.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycloProduct):
            return NotImplemented
        return (self.coeff, self.qexp, self.exps) == (other.coeff, other.qexp, other.exps)

    def __hash__(self) -> int:
        return hash((self.coeff, self.qexp, tuple(sorted(self.exps.items()))))

    def valuation(self, d: int) -> int:
        """Exponent of Phi_d in this product (zero element has no valuation)."""
        if not self:
            raise ValueError("valuation of zero undefined")
        return self.exps.get(d, 0)

    def split(self) -> tuple[dict[int, int], dict[int, int]]:
        """(numerator exponents, denominator exponents), both positive."""
        num = {m: e for m, e in self.exps.items() if e > 0}
        den = {m: -e for m, e in self.exps.items() if e < 0}
        return num, den

    def expand(self) -> tuple[QLaurentPoly, QLaurentPoly]:
        """Numerator and denominator as Laurent polynomials (denominator monic-ish, integral)."""
        if not self:
            return QLaurentPoly(), QLaurentPoly([1])
        num_e, den_e = self.split()
        num = QPoly([1])
        for m in sorted(num_e):
            num = num * cyclotomic_power(m, num_e[m])
        den = QPoly([1])
        for m in sorted(den_e):
            den = den * cyclotomic_power(m, den_e[m])
        return (
            QLaurentPoly._from(num * self.coeff, self.qexp),
            QLaurentPoly._from(den, 0),
        )

    def __repr__(self) -> str:
        fac = " * ".join(
            f"Phi{m}^{e}" if e != 1 else f"Phi{m}" for m, e in sorted(self.exps.items())
        )
        return f"CycloProduct({self.coeff} * q^{self.qexp}{' * ' + fac if fac else ''})"


def one_minus_q_power(m: int) -> CycloProduct:
    """1 - q^m in factored form; zero for m == 0."""
    if m == 0:
        return CycloProduct.zero()
    if m > 0:
        # 1 - q^m = -(q^m - 1) = -prod_{d | m} Phi_d
        return CycloProduct(-1, 0, {d: 1 for d in divisors(m)})
    # 1 - q^-a = q^-a (q^a - 1)
    return CycloProduct(1, m, {d: 1 for d in divisors(-m)})


def q_integer_factors(n: int, base_exp: int = 1) -> CycloProduct:
    """[n]_{q^b} = (1 - q^{b n}) / (1 - q^b) in factored form."""
    if n < 0 or base_exp < 1:
        raise ValueError("q_integer_factors needs n >= 0 and base_exp >= 1")
    if n == 0:
        return CycloProduct.zero()
    return one_minus_q_power(base_exp * n) / one_minus_q_power(base_exp)


def q_pochhammer_factors(a_exp: int, m: int, k: int) -> CycloProduct:
    """(q^a; q^m)_k in factored form (zero if some a + m j == 0)."""
    out = CycloProduct(1)
    for j in range(k):
        out = out * one_minus_q_power(a_exp + m * j)
    return out
