"""Laurent polynomials in x over Q[q], their fractions, and congruence checks.

A congruence ``A == B (mod P)`` with P a product of cyclotomic polynomials
Phi_d(q) and linear x-factors (1 - x q^n), (x - q^n) is decided factor by
factor through two ring homomorphisms:

* reduction modulo Phi_d, landing in Q(zeta_d)(x).  Elements of
  Z[zeta_d][x, 1/x] are :class:`CycloXPoly`; the primitive root is never
  instantiated numerically, only as arithmetic modulo Phi_d(q).
* specialization x := q^e, landing in Q(q) as fractions of
  :class:`~qcong.poly_q.QLaurentPoly`.

Anything exposing ``image_mod_cyclotomic(d)`` and ``image_at_x_power(e)``
(each returning a ``(numerator, denominator)`` pair in the target ring) can
be fed to :func:`check_congruence`.  Explicit :class:`QXFraction` values and
factored :class:`QXProduct` sums both do; so does the lazy truncated sum in
:mod:`qcong.qseries_terms`.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from . import _intpoly
from .poly_q import (
    CycloProduct,
    QLaurentPoly,
    QPoly,
    cyclotomic,
    cyclotomic_power,
    one_minus_q_power,
)

__all__ = [
    "CoprimalityError",
    "SpecializationError",
    "XLaurent",
    "QXFraction",
    "QLaurentFraction",
    "CycloXPoly",
    "CycloXFraction",
    "QXProduct",
    "QXProductSum",
    "ModulusSpec",
    "FactorVerdict",
    "CongruenceReport",
    "x_pochhammer",
    "substitute_x",
    "divisible_by_cyclotomic",
    "check_congruence",
    "product_images_mod_cyclotomic",
    "product_images_at_x_power",
]


class CoprimalityError(ArithmeticError):
    """The modulus shares a factor with a denominator."""


class SpecializationError(CoprimalityError):
    """x := q^e makes a denominator vanish."""


def _is_scalar(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


# -- XLaurent ---------------------------------------------------------------


class XLaurent:
    """Laurent polynomial in x with QPoly coefficients: {x-exponent: QPoly}."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, QPoly] | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            if not isinstance(c, QPoly):
                c = QPoly([c]) if _is_scalar(c) else QPoly(c)
            if c:
                clean[e] = c
        self.terms = clean

    @classmethod
    def const(cls, c) -> "XLaurent":
        if isinstance(c, QPoly):
            return cls({0: c})
        return cls({0: QPoly([c])})

    @classmethod
    def monomial(cls, xexp: int, coeff=1) -> "XLaurent":
        return cls({xexp: coeff if isinstance(coeff, QPoly) else QPoly([coeff])})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, XLaurent):
            return self.terms == other.terms
        if _is_scalar(other) or isinstance(other, QPoly):
            return self == XLaurent.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def _coerce(self, other):
        if isinstance(other, XLaurent):
            return other
        if _is_scalar(other) or isinstance(other, QPoly):
            return XLaurent.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return XLaurent(out)

    __radd__ = __add__

    def __neg__(self):
        return XLaurent({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other) or isinstance(other, QPoly):
            return XLaurent({e: c * other for e, c in self.terms.items()})
        if not isinstance(other, XLaurent):
            return NotImplemented
        if not self.terms or not other.terms:
            return XLaurent()
        if all(c.is_integral for c in self.terms.values()) and all(
            c.is_integral for c in other.terms.values()
        ):
            lo_a, rows_a = self._rows()
            lo_b, rows_b = other._rows()
            prod = _intpoly.bimul(rows_a, rows_b)
            return XLaurent(
                {lo_a + lo_b + i: QPoly._raw(r, True) for i, r in enumerate(prod) if any(r)}
            )
        out: dict[int, QPoly] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = ea + eb
                p = ca * cb
                out[e] = out[e] + p if e in out else p
        return XLaurent(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "XLaurent":
        if e < 0:
            raise ValueError("negative power")
        result = XLaurent.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def _rows(self) -> tuple[int, list[list[int]]]:
        lo, hi = min(self.terms), max(self.terms)
        empty: tuple = ()
        return lo, [
            list(self.terms[e].coeffs if e in self.terms else empty) for e in range(lo, hi + 1)
        ]

    def x_range(self) -> tuple[int, int]:
        if not self.terms:
            raise ValueError("zero has no x-range")
        return min(self.terms), max(self.terms)

    def coefficients(self) -> Iterable[QPoly]:
        return self.terms.values()

    def map_coeffs(self, fn) -> "XLaurent":
        return XLaurent({e: fn(c) for e, c in self.terms.items()})

    def substitute(self, e: int) -> QLaurentPoly:
        """Replace x by q^e."""
        out = QLaurentPoly()
        for xe, c in self.terms.items():
            out = out + QLaurentPoly.from_qpoly(c).shift(xe * e)
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = str(self.terms[e])
            if e == 0:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*x" + (f"^{e}" if e != 1 else ""))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"XLaurent({self})"


def x_pochhammer(c: int, m: int, k: int, inverse: bool = False) -> XLaurent:
    """(x q^c; q^m)_k, or (q^c / x; q^m)_k when ``inverse``, expanded."""
    if c < 0 or m < 1 or k < 0:
        raise ValueError("x_pochhammer needs c >= 0, m >= 1, k >= 0")
    out = XLaurent.const(1)
    sx = -1 if inverse else 1
    for j in range(k):
        out = out * XLaurent({0: QPoly([1]), sx: -QPoly.monomial(c + m * j)})
    return out


# -- fractions ----------------------------------------------------------------


class _RingFraction:
    """num/den over an integral domain; no gcd reduction, equality by cross-multiplication."""

    __slots__ = ("num", "den")
    _ring: type = object

    def __init__(self, num, den=1):
        num, den = self._lift(num), self._lift(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = num, den

    @classmethod
    def _lift(cls, v):
        return v

    def _coerce(self, other):
        if isinstance(other, type(self)):
            return other
        try:
            return type(self)(other, 1)
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return type(self)(self.num + other.num, self.den)
        return type(self)(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return type(self)(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return type(self)(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("division by zero fraction")
        return type(self)(self.num * other.den, self.den * other.num)

    def __pow__(self, e: int):
        if e < 0:
            return type(self)(self.den, self.num) ** (-e)
        return type(self)(self.num**e, self.den**e)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None  # equality is not structural

    def __bool__(self) -> bool:
        return bool(self.num)

    def __str__(self) -> str:
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


class QLaurentFraction(_RingFraction):
    """Rational function in q as a fraction of Laurent polynomials."""

    __slots__ = ()

    @classmethod
    def _lift(cls, v):
        if isinstance(v, QLaurentPoly):
            return v
        if isinstance(v, QPoly):
            return QLaurentPoly.from_qpoly(v)
        if _is_scalar(v):
            return QLaurentPoly([v])
        raise TypeError(f"cannot lift {v!r} to QLaurentPoly")


class QXFraction(_RingFraction):
    """Fraction of XLaurent values.  Never auto-reduced."""

    __slots__ = ()

    @classmethod
    def _lift(cls, v):
        if isinstance(v, XLaurent):
            return v
        if isinstance(v, QPoly) or _is_scalar(v):
            return XLaurent.const(v)
        raise TypeError(f"cannot lift {v!r} to XLaurent")

    # congruence image protocol

    def image_mod_cyclotomic(self, d: int) -> tuple["CycloXPoly", "CycloXPoly"]:
        phi = cyclotomic(d)
        num, den = self.num, self.den
        if not num:
            return CycloXPoly.zero(d), CycloXPoly.one(d)
        v_den = _xl_multiplicity(den, phi)
        v_num = _xl_multiplicity(num, phi, v_den + 1)
        if v_den > v_num:
            raise CoprimalityError(f"modulus meets denominator (Phi_{d})")
        if v_den:
            strip = cyclotomic_power(d, v_den)
            num = num.map_coeffs(lambda c: c.exact_div(strip))
            den = den.map_coeffs(lambda c: c.exact_div(strip))
        scale = math.lcm(
            *(
                c.denominator
                for part in (num, den)
                for p in part.coefficients()
                for c in p.coeffs
                if isinstance(c, Fraction)
            ),
            1,
        )
        num_img = CycloXPoly.from_xlaurent(d, num, scale)
        den_img = CycloXPoly.from_xlaurent(d, den, scale)
        if not den_img:
            raise CoprimalityError(f"modulus meets denominator (Phi_{d})")
        return num_img, den_img

    def image_at_x_power(self, e: int) -> tuple[QLaurentPoly, QLaurentPoly]:
        num, den = self.num, self.den
        if not num:
            return QLaurentPoly(), QLaurentPoly([1])
        v_num, lo_n, num_q = _strip_x_root(num, e)
        v_den, lo_d, den_q = _strip_x_root(den, e)
        if v_den > v_num:
            raise SpecializationError(f"specialization kills denominator (x = q^{e})")
        if v_num > v_den:
            return QLaurentPoly(), _substitute_coeffs(lo_d, den_q, e)
        return _substitute_coeffs(lo_n, num_q, e), _substitute_coeffs(lo_d, den_q, e)


def _xl_multiplicity(f: XLaurent, phi: QPoly, cap: int | None = None) -> int:
    """Phi-adic valuation of f: the minimum over its coefficients (Gauss's lemma).

    The answer is exact when below ``cap``; otherwise ``cap`` is returned.
    """
    v = cap
    for c in sorted(f.coefficients(), key=len):
        v = c.multiplicity(phi, v)
        if v == 0:
            break
    return v


def _strip_x_root(f: XLaurent, e: int) -> tuple[int, int, list[QLaurentPoly]]:
    """Divide out (x - q^e) as often as possible.

    Returns (count, lowest x-exponent, cofactor coefficients in q).
    """
    lo, hi = f.x_range()
    coeffs = [QLaurentPoly.from_qpoly(f.terms.get(i, QPoly())) for i in range(lo, hi + 1)]
    count = 0
    while len(coeffs) > 1:
        # synthetic division of sum_i coeffs[i] x^i by (x - q^e)
        quo = [QLaurentPoly()] * (len(coeffs) - 1)
        acc = coeffs[-1]
        quo[-1] = acc
        for i in range(len(coeffs) - 2, 0, -1):
            acc = coeffs[i] + acc.shift(e)
            quo[i - 1] = acc
        if coeffs[0] + acc.shift(e):
            break
        coeffs = quo
        count += 1
    return count, lo, coeffs


def _substitute_coeffs(lo: int, coeffs: list[QLaurentPoly], e: int) -> QLaurentPoly:
    out = QLaurentPoly()
    for i, c in enumerate(coeffs):
        out = out + c.shift((lo + i) * e)
    return out


# -- arithmetic modulo Phi_d ------------------------------------------------------


@lru_cache(maxsize=256)
def _phi_ints(d: int) -> tuple[int, ...]:
    return cyclotomic(d).coeffs


def _reduce_row(d: int, row) -> tuple[int, ...]:
    phi = _phi_ints(d)
    deg = len(phi) - 1
    if len(row) > d:
        folded = [0] * d
        for i, c in enumerate(row):
            folded[i % d] += c
        row = folded
    if len(row) <= deg:
        return tuple(_intpoly.trim(list(row)))
    return tuple(_intpoly.divrem_monic(list(row), list(phi))[1])


class CycloXPoly:
    """Element of Z[zeta_d][x, 1/x], zeta_d a primitive d-th root of unity.

    Stored as x^xoff * sum_i rows[i] x^i, each row the coefficient vector of
    a polynomial in q reduced modulo Phi_d(q) (so equality is structural).
    """

    __slots__ = ("d", "xoff", "rows")

    def __init__(self, d: int, xoff: int = 0, rows=()):
        reduced = [_reduce_row(d, r) for r in rows]
        lo = 0
        while lo < len(reduced) and not reduced[lo]:
            lo += 1
        hi = len(reduced)
        while hi > lo and not reduced[hi - 1]:
            hi -= 1
        self.d = d
        self.rows = tuple(reduced[lo:hi])
        self.xoff = xoff + lo if self.rows else 0

    @classmethod
    def zero(cls, d: int) -> "CycloXPoly":
        return cls(d)

    @classmethod
    def one(cls, d: int) -> "CycloXPoly":
        return cls(d, 0, [[1]])

    @classmethod
    def from_qpoly(cls, d: int, p: QPoly, qshift: int = 0, scale: int = 1) -> "CycloXPoly":
        if not p.is_integral and scale == 1:
            raise ValueError("CycloXPoly needs integer coefficients; pass a clearing scale")
        row = [0] * d
        for i, c in enumerate(p.coeffs):
            if c:
                row[(i + qshift) % d] += int(c * scale)
        return cls(d, 0, [row])

    @classmethod
    def from_xlaurent(cls, d: int, f: XLaurent, scale: int = 1) -> "CycloXPoly":
        if not f:
            return cls.zero(d)
        lo, hi = f.x_range()
        rows = []
        for e in range(lo, hi + 1):
            row = [0] * d
            c = f.terms.get(e)
            if c is not None:
                for i, a in enumerate(c.coeffs):
                    if a:
                        row[i % d] += int(a * scale)
            rows.append(row)
        return cls(d, lo, rows)

    @classmethod
    def monomial(cls, d: int, xexp: int = 0, qexp: int = 0, coeff: int = 1) -> "CycloXPoly":
        row = [0] * d
        row[qexp % d] = coeff
        return cls(d, xexp, [row])

    @classmethod
    def linear(cls, d: int, r: int) -> "CycloXPoly":
        """1 - x * zeta^r."""
        row = [0] * d
        row[r % d] = -1
        return cls(d, 0, [[1], row])

    def __bool__(self) -> bool:
        return bool(self.rows)

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloXPoly):
            return (self.d, self.xoff, self.rows) == (other.d, other.xoff, other.rows)
        if isinstance(other, int) and not isinstance(other, bool):
            return self == CycloXPoly(self.d, 0, [[other]])
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.d, self.xoff, self.rows))

    def _coerce(self, other):
        if isinstance(other, CycloXPoly):
            if other.d != self.d:
                raise ValueError("mixing different cyclotomic moduli")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return CycloXPoly(self.d, 0, [[other]])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.rows:
            return self
        if not self.rows:
            return other
        lo = min(self.xoff, other.xoff)
        hi = max(self.xoff + len(self.rows), other.xoff + len(other.rows))
        rows = [[0] for _ in range(hi - lo)]
        for src in (self, other):
            for i, r in enumerate(src.rows):
                rows[src.xoff - lo + i] = _intpoly.add(rows[src.xoff - lo + i], r)
        return CycloXPoly(self.d, lo, rows)

    __radd__ = __add__

    def __neg__(self):
        out = object.__new__(CycloXPoly)
        out.d, out.xoff = self.d, self.xoff
        out.rows = tuple(tuple(-c for c in r) for r in self.rows)
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.rows or not other.rows:
            return CycloXPoly.zero(self.d)
        prod = _intpoly.bimul([list(r) for r in self.rows], [list(r) for r in other.rows])
        return CycloXPoly(self.d, self.xoff + other.xoff, prod)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CycloXPoly":
        if e < 0:
            raise ValueError("negative power")
        result = CycloXPoly.one(self.d)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __str__(self) -> str:
        if not self.rows:
            return "0"
        parts = []
        for i, r in enumerate(self.rows):
            if not r:
                continue
            c = QLaurentPoly(list(r)).__str__().replace("q", "z")
            e = self.xoff + i
            parts.append(f"({c})" + ("" if e == 0 else f"*x^{e}"))
        return " + ".join(parts) + f"  [z = zeta_{self.d}]"

    def __repr__(self) -> str:
        return f"CycloXPoly({self})"


class CycloXFraction(_RingFraction):
    """Element of Q(zeta_d)(x) as a fraction of CycloXPoly values."""

    __slots__ = ()


# -- factored x-products ----------------------------------------------------------


class QXProduct:
    """Factored term ``C(q) * x^xexp * prod (1 - x q^c)^a_c * prod (1 - q^c / x)^b_c``.

    ``C`` is a :class:`CycloProduct`.  Exponents may be negative, so one
    object represents a whole hypergeometric term with its denominator.
    """

    __slots__ = ("q", "xexp", "xlin", "xinv")

    def __init__(self, q: CycloProduct | None = None, xexp: int = 0, xlin=None, xinv=None):
        self.q = q if q is not None else CycloProduct(1)
        if not self.q:
            self.xexp, self.xlin, self.xinv = 0, {}, {}
            return
        self.xexp = xexp
        self.xlin = {c: e for c, e in (xlin or {}).items() if e}
        self.xinv = {c: e for c, e in (xinv or {}).items() if e}

    @classmethod
    def zero(cls) -> "QXProduct":
        return cls(CycloProduct.zero())

    @classmethod
    def x_pochhammer(cls, c: int, m: int, k: int, inverse: bool = False) -> "QXProduct":
        fac: dict[int, int] = {}
        for j in range(k):
            fac[c + m * j] = fac.get(c + m * j, 0) + 1
        return cls(xinv=fac) if inverse else cls(xlin=fac)

    def is_zero(self) -> bool:
        return not self.q

    def __bool__(self) -> bool:
        return bool(self.q)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycloProduct)):
            other = QXProduct(other if isinstance(other, CycloProduct) else CycloProduct(other))
        if not isinstance(other, QXProduct):
            return NotImplemented
        if not self or not other:
            return QXProduct.zero()
        xlin, xinv = dict(self.xlin), dict(self.xinv)
        for c, e in other.xlin.items():
            xlin[c] = xlin.get(c, 0) + e
        for c, e in other.xinv.items():
            xinv[c] = xinv.get(c, 0) + e
        return QXProduct(self.q * other.q, self.xexp + other.xexp, xlin, xinv)

    __rmul__ = __mul__

    def inverse(self) -> "QXProduct":
        return QXProduct(
            self.q.inverse(),
            -self.xexp,
            {c: -e for c, e in self.xlin.items()},
            {c: -e for c, e in self.xinv.items()},
        )

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, CycloProduct)):
            other = QXProduct(other if isinstance(other, CycloProduct) else CycloProduct(other))
        return self * other.inverse()

    def __neg__(self):
        return QXProduct(-self.q, self.xexp, self.xlin, self.xinv)

    def __pow__(self, e: int) -> "QXProduct":
        if e < 0:
            return self.inverse() ** (-e)
        if not self:
            return QXProduct() if e == 0 else self
        return QXProduct(
            self.q**e,
            self.xexp * e,
            {c: a * e for c, a in self.xlin.items()},
            {c: a * e for c, a in self.xinv.items()},
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, QXProduct):
            return NotImplemented
        return (self.q, self.xexp, self.xlin, self.xinv) == (
            other.q,
            other.xexp,
            other.xlin,
            other.xinv,
        )

    def __hash__(self) -> int:
        return hash((self.q, self.xexp, tuple(sorted(self.xlin.items())), tuple(sorted(self.xinv.items()))))

    def __repr__(self) -> str:
        return f"QXProduct({self.q!r}, x^{self.xexp}, lin={self.xlin}, inv={self.xinv})"

    # expansion

    def to_fraction(self) -> QXFraction:
        if not self:
            return QXFraction(XLaurent(), XLaurent.const(1))
        qnum, qden = self.q.expand()
        num = XLaurent.const(1)
        den = XLaurent.const(1)
        if qnum.offset >= 0:
            num = num * qnum.to_qpoly()
        else:
            num = num * qnum.shift(-qnum.offset).to_qpoly()
            den = den * QPoly.monomial(-qnum.offset)
        den = den * qden.to_qpoly()
        for facs, inverse in ((self.xlin, False), (self.xinv, True)):
            for c, e in facs.items():
                qnum_c, qden_c = _q_mono(c)
                # 1 - x^(+-1) q^c = (qden_c - x^(+-1) qnum_c) / qden_c
                lin = XLaurent({0: qden_c, (-1 if inverse else 1): -qnum_c})
                if e > 0:
                    num = num * lin**e
                    den = den * qden_c**e
                else:
                    den = den * lin ** (-e)
                    num = num * qden_c ** (-e)
        if self.xexp >= 0:
            num = num * XLaurent.monomial(self.xexp)
        else:
            den = den * XLaurent.monomial(-self.xexp)
        return QXFraction(num, den)

    # homomorphic images

    def substitute_x(self, e: int) -> CycloProduct:
        """Value at x = q^e as a factored q-product.

        Factors vanishing at x = q^e are pulled out as (x - q^e); a net
        negative multiplicity raises SpecializationError.
        """
        if not self:
            return CycloProduct.zero()
        out = self.q * CycloProduct(1, self.xexp * e)
        mult = 0
        for c, a in self.xlin.items():
            if c + e == 0:
                # 1 - x q^c = -q^c (x - q^e)
                mult += a
                out = out * CycloProduct((-1) ** (a % 2), c * a)
            else:
                out = out * one_minus_q_power(c + e) ** a
        for c, a in self.xinv.items():
            if c == e:
                # 1 - q^c / x = x^-1 (x - q^e)  -> q^-e at the point
                mult += a
                out = out * CycloProduct(1, -e * a)
            else:
                out = out * one_minus_q_power(c - e) ** a
        if mult < 0:
            raise SpecializationError(f"specialization kills denominator (x = q^{e})")
        if mult > 0:
            return CycloProduct.zero()
        return out


def _q_mono(c: int) -> tuple[QPoly, QPoly]:
    """q^c as (numerator, denominator) QPolys."""
    if c >= 0:
        return QPoly.monomial(c), QPoly([1])
    return QPoly([1]), QPoly.monomial(-c)


@lru_cache(maxsize=8192)
def _cyclo_const(d: int, m: int, e: int) -> CycloXPoly:
    return CycloXPoly.from_qpoly(d, cyclotomic(m)) ** e


@lru_cache(maxsize=8192)
def _cyclo_linear_power(d: int, r: int, e: int) -> CycloXPoly:
    return CycloXPoly.linear(d, r) ** e


def _mul_all(items: list, one):
    # balanced product keeps operand sizes even
    items = [x for x in items]
    if not items:
        return one
    while len(items) > 1:
        nxt = [items[i] * items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def product_images_mod_cyclotomic(
    products: list[QXProduct], d: int
) -> tuple[list[CycloXPoly], CycloXPoly]:
    """Numerators over one common denominator, all reduced modulo Phi_d.

    Terms whose Phi_d-valuation is positive map to zero; a negative
    valuation raises CoprimalityError.
    """
    parts = []
    for prod in products:
        if not prod:
            parts.append(None)
            continue
        v = prod.q.valuation(d)
        if v < 0:
            raise CoprimalityError(f"modulus meets denominator (Phi_{d})")
        if v > 0:
            parts.append(None)
            continue
        coeff = prod.q.coeff
        qshift, xshift = prod.q.qexp, prod.xexp
        lin: dict[int, int] = {}
        for c, a in prod.xlin.items():
            lin[c % d] = lin.get(c % d, 0) + a
        for c, a in prod.xinv.items():
            # 1 - q^c/x = -q^c x^-1 (1 - x q^-c)
            lin[(-c) % d] = lin.get((-c) % d, 0) + a
            if a % 2:
                coeff = -coeff
            qshift += c * a
            xshift -= a
        cyc = {m: e for m, e in prod.q.exps.items() if m != d}
        parts.append((coeff, qshift, xshift, cyc, {r: a for r, a in lin.items() if a}))
    live = [p for p in parts if p is not None]
    den_q: dict[int, int] = {}
    den_l: dict[int, int] = {}
    scale = 1
    for coeff, _, _, cyc, lin in live:
        scale = math.lcm(scale, coeff.denominator)
        for m, e in cyc.items():
            if e < 0:
                den_q[m] = max(den_q.get(m, 0), -e)
        for r, a in lin.items():
            if a < 0:
                den_l[r] = max(den_l.get(r, 0), -a)
    one = CycloXPoly.one(d)
    den = _mul_all(
        [CycloXPoly(d, 0, [[scale]])]
        + [_cyclo_const(d, m, e) for m, e in sorted(den_q.items())]
        + [_cyclo_linear_power(d, r, a) for r, a in sorted(den_l.items())],
        one,
    )
    if not den:
        raise CoprimalityError(f"modulus meets denominator (Phi_{d})")
    nums = []
    for part in parts:
        if part is None:
            nums.append(CycloXPoly.zero(d))
            continue
        coeff, qshift, xshift, cyc, lin = part
        c = int(coeff * scale)
        factors = [CycloXPoly.monomial(d, xshift, qshift, c)]
        for m in sorted(set(cyc) | set(den_q)):
            e = cyc.get(m, 0) + den_q.get(m, 0)
            if e:
                factors.append(_cyclo_const(d, m, e))
        for r in sorted(set(lin) | set(den_l)):
            a = lin.get(r, 0) + den_l.get(r, 0)
            if a:
                factors.append(_cyclo_linear_power(d, r, a))
        nums.append(_mul_all(factors, one))
    return nums, den


def product_images_at_x_power(
    products: list[QXProduct], e: int
) -> tuple[list[QLaurentPoly], QLaurentPoly]:
    """Numerators over one common denominator after x := q^e."""
    specialized = [prod.substitute_x(e) for prod in products]
    den_q: dict[int, int] = {}
    scale = 1
    for sp in specialized:
        if not sp:
            continue
        scale = math.lcm(scale, sp.coeff.denominator)
        for m, x in sp.exps.items():
            if x < 0:
                den_q[m] = max(den_q.get(m, 0), -x)
    one = QLaurentPoly([1])
    den = _mul_all(
        [QLaurentPoly([scale])]
        + [QLaurentPoly.from_qpoly(cyclotomic_power(m, x)) for m, x in sorted(den_q.items())],
        one,
    )
    nums = []
    for sp in specialized:
        if not sp:
            nums.append(QLaurentPoly())
            continue
        factors = [QLaurentPoly.monomial(sp.qexp, int(sp.coeff * scale))]
        for m in sorted(set(sp.exps) | set(den_q)):
            x = sp.exps.get(m, 0) + den_q.get(m, 0)
            if x:
                factors.append(QLaurentPoly.from_qpoly(cyclotomic_power(m, x)))
        nums.append(_mul_all(factors, one))
    return nums, den


class QXProductSum:
    """A finite sum of factored terms (e.g. a right-hand side with a correction factor)."""

    def __init__(self, terms: Iterable[QXProduct] = ()):
        self.terms = [t for t in terms if t]

    @classmethod
    def of(cls, *terms: QXProduct) -> "QXProductSum":
        return cls(terms)

    def __add__(self, other):
        if isinstance(other, QXProduct):
            return QXProductSum(self.terms + [other])
        if isinstance(other, QXProductSum):
            return QXProductSum(self.terms + other.terms)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, QXProduct):
            return QXProductSum(t * other for t in self.terms)
        if isinstance(other, QXProductSum):
            return QXProductSum(a * b for a in self.terms for b in other.terms)
        return NotImplemented

    __rmul__ = __mul__

    def to_fraction(self) -> QXFraction:
        out = QXFraction(XLaurent(), XLaurent.const(1))
        for t in self.terms:
            out = out + t.to_fraction()
        return out

    def image_mod_cyclotomic(self, d: int):
        if not self.terms:
            return CycloXPoly.zero(d), CycloXPoly.one(d)
        nums, den = product_images_mod_cyclotomic(self.terms, d)
        return sum(nums, CycloXPoly.zero(d)), den

    def image_at_x_power(self, e: int):
        if not self.terms:
            return QLaurentPoly(), QLaurentPoly([1])
        nums, den = product_images_at_x_power(self.terms, e)
        return sum(nums, QLaurentPoly()), den

    def __repr__(self) -> str:
        return f"QXProductSum({self.terms!r})"


def _as_congruend(v):
    if isinstance(v, QXProduct):
        return QXProductSum.of(v)
    if isinstance(v, (XLaurent, QPoly)) or _is_scalar(v):
        return QXFraction(v, 1)
    return v


# -- spec-level operations ------------------------------------------------------


def substitute_x(f, e: int) -> QLaurentFraction:
    """Replace x by q^e; returns a fraction of Laurent polynomials in q."""
    f = _as_congruend(f)
    num, den = f.image_at_x_power(e)
    return QLaurentFraction(num, den)


def divisible_by_cyclotomic(f, d: int) -> bool:
    """True iff f == 0 (mod Phi_d(q)) in the sense of reduced fractions.

    Raises CoprimalityError when Phi_d survives in the reduced denominator.
    """
    if d < 2:
        raise ValueError("cyclotomic index must be >= 2")
    num, _ = _as_congruend(f).image_mod_cyclotomic(d)
    return not num


@dataclass(frozen=True)
class ModulusSpec:
    """Product of Phi_d(q) over ``cyclotomic_indices`` and, for each e in
    ``x_points``, the linear factor vanishing at x = q^e."""

    cyclotomic_indices: tuple[int, ...]
    x_points: tuple[int, ...] = ()
    description: str = ""

    def __post_init__(self):
        idx = tuple(sorted(set(self.cyclotomic_indices)))
        if any(d < 2 for d in idx):
            raise ValueError("cyclotomic indices must be >= 2")
        if len(set(self.x_points)) != len(self.x_points):
            raise ValueError("x_points must be distinct")
        object.__setattr__(self, "cyclotomic_indices", idx)
        object.__setattr__(self, "x_points", tuple(self.x_points))


@dataclass
class FactorVerdict:
    kind: str  # "cyclotomic" | "x_point"
    index_or_exp: int
    verdict: str  # "pass" | "fail" | "coprimality_error"
    detail: str = ""


@dataclass
class CongruenceReport:
    description: str
    factors: list[FactorVerdict] = field(default_factory=list)
    overall: str = "pass"  # "pass" | "fail" | "error"
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return self.overall == "pass"

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "description": self.description,
            "factors": [
                {k: v for k, v in asdict(f).items() if k != "detail" or v} for f in self.factors
            ],
            "overall": self.overall,
        }
        if timing:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2)


def _check_factor(lhs, rhs, kind: str, val: int) -> FactorVerdict:
    try:
        if kind == "cyclotomic":
            ln, ld = lhs.image_mod_cyclotomic(val)
            rn, rd = rhs.image_mod_cyclotomic(val)
        else:
            ln, ld = lhs.image_at_x_power(val)
            rn, rd = rhs.image_at_x_power(val)
    except CoprimalityError as exc:
        return FactorVerdict(kind, val, "coprimality_error", str(exc))
    ok = ln * rd == rn * ld
    return FactorVerdict(kind, val, "pass" if ok else "fail")


def _check_factor_star(args):
    return _check_factor(*args)


def check_congruence(lhs, rhs, modulus: ModulusSpec, *, workers: int = 1) -> CongruenceReport:
    """Decide lhs == rhs modulo every factor of ``modulus``.

    Each factor is checked through its own homomorphic image of the
    difference; coprimality failures are reported per factor and make the
    overall verdict "error" rather than "fail".
    """
    start = time.perf_counter()
    lhs, rhs = _as_congruend(lhs), _as_congruend(rhs)
    jobs = [(lhs, rhs, "cyclotomic", d) for d in modulus.cyclotomic_indices]
    jobs += [(lhs, rhs, "x_point", e) for e in modulus.x_points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(_check_factor_star, jobs))
    else:
        verdicts = [_check_factor(*job) for job in jobs]
    if any(v.verdict == "coprimality_error" for v in verdicts):
        overall = "error"
    elif all(v.verdict == "pass" for v in verdicts):
        overall = "pass"
    else:
        overall = "fail"
    return CongruenceReport(
        description=modulus.description,
        factors=verdicts,
        overall=overall,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
    )
