"""Independent oracle: truncated power series at q = w + t over GF(ell).

w is a primitive d-th root of unity modulo a prime ell = 1 (mod d) and x is
fixed to a residue.  If a rational function in q has a nonzero constant
term at t = 0, its reduced numerator is not divisible by Phi_d(q) for that
x, hence also not with x left free.  Shares no code with the package.
"""

from __future__ import annotations

from math import comb

PREC = 12


def find_prime(modulus: int, start: int = 10**9) -> int:
    k = start // modulus + 1
    while True:
        cand = k * modulus + 1
        if cand % 2 and all(cand % f for f in range(3, int(cand**0.5) + 1, 2)):
            return cand
        k += 1


def _prime_divisors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    return out + ([n] if n > 1 else [])


class Series:
    """t^val * (c0 + c1 t + ...) truncated to PREC terms; val None for zero."""

    def __init__(self, val: int, coeffs: list[int], ell: int):
        self.ell = ell
        cs = [c % ell for c in coeffs[:PREC]] + [0] * max(0, PREC - len(coeffs))
        shift = next((i for i, c in enumerate(cs) if c), None)
        if shift is None:
            self.val, self.coeffs = None, [0] * PREC
        else:
            self.val = val + shift
            self.coeffs = cs[shift:] + [0] * shift

    def __mul__(self, other: "Series") -> "Series":
        if self.val is None or other.val is None:
            return Series(0, [], self.ell)
        out = [0] * PREC
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(PREC - i):
                    out[i + j] += a * other.coeffs[j]
        return Series(self.val + other.val, out, self.ell)

    def inverse(self) -> "Series":
        if self.val is None:
            raise ZeroDivisionError("series inverse of zero")
        inv0 = pow(self.coeffs[0], -1, self.ell)
        out = [inv0] + [0] * (PREC - 1)
        for i in range(1, PREC):
            s = sum(self.coeffs[j] * out[i - j] for j in range(1, i + 1))
            out[i] = -s * inv0 % self.ell
        return Series(-self.val, out, self.ell)

    def __add__(self, other: "Series") -> "Series":
        if self.val is None:
            return other
        if other.val is None:
            return self
        lo = min(self.val, other.val)
        out = [0] * PREC
        for s in (self, other):
            off = s.val - lo
            for i in range(PREC - off):
                out[i + off] += s.coeffs[i]
        return Series(lo, out, self.ell)

    def constant_term(self) -> int:
        """Coefficient of t^0; raises if the series has a pole."""
        if self.val is None or self.val > 0:
            return 0
        if self.val < 0:
            raise ValueError("series has a pole at t = 0")
        return self.coeffs[0]


class Point:
    """Evaluation at q = w + t with w a primitive d-th root of unity mod ell."""

    def __init__(self, d: int, ell: int | None = None):
        self.ell = ell or find_prime(d)
        for g in range(2, self.ell):
            w = pow(g, (self.ell - 1) // d, self.ell)
            if all(pow(w, d // f, self.ell) != 1 for f in _prime_divisors(d)):
                self.w = w
                break

    def const(self, c: int) -> Series:
        return Series(0, [c], self.ell)

    def one_minus(self, c: int, m: int) -> Series:
        """1 - c q^m for m >= 0, expanded binomially in t."""
        w, ell = self.w, self.ell
        cs = [-c * comb(m, i) * pow(w, m - i, ell) for i in range(min(m, PREC - 1) + 1)]
        cs[0] += 1
        return Series(0, cs, ell)

    def poch(self, c: int, a: int, m: int, k: int) -> Series:
        """(c q^a; q^m)_k."""
        out = self.const(1)
        for j in range(k):
            out = out * self.one_minus(c, a + m * j)
        return out

    def family5_alpha(self, k: int, x: int) -> Series:
        ell = self.ell
        xinv = pow(x, -1, ell)
        num = self.poch(x, 1, 2, k) * self.poch(xinv, 1, 2, k) * self.poch(1, 1, 2, 2 * k)
        den = self.poch(x, 6, 6, k) * self.poch(xinv, 6, 6, k) * self.poch(1, 2, 2, 2 * k)
        qint = Series(0, [0], ell)
        for i in range(8 * k + 1):
            qint = qint + self.qpow(i)
        return num * den.inverse() * qint * self.qpow(2 * k * k)

    def qpow(self, m: int) -> Series:
        w, ell = self.w, self.ell
        return Series(0, [comb(m, i) * pow(w, m - i, ell) for i in range(min(m, PREC - 1) + 1)], ell)


def truncated_power_sum(terms: list[Series], N: int, ell: int) -> Series:
    """sum_{k < len(terms)} of the N-fold self-convolution of terms at k."""
    n = len(terms)
    zero = Series(0, [], ell)
    conv = list(terms)
    for _ in range(N - 1):
        nxt = []
        for k in range(n):
            acc = zero
            for j in range(k + 1):
                acc = acc + conv[j] * terms[k - j]
            nxt.append(acc)
        conv = nxt
    total = zero
    for v in conv:
        total = total + v
    return total
