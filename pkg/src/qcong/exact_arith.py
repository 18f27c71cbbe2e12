"""Exact integer/rational helpers: p-adic valuation, residues mod p^e, Legendre symbol.

Rationals are :class:`fractions.Fraction` (always in lowest terms with a
positive denominator); integers are plain ``int``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC

Rational = Fraction

__all__ = [
    "Rational",
    "as_rational",
    "parse_rational",
    "format_rational",
    "padic_valuation",
    "mod_prime_power",
    "mod_inverse",
    "legendre_symbol",
    "jacobi_symbol",
    "is_prime",
    "primes_between",
    "factorize",
    "prime_factors",
    "divisors",
]


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or an integer literal."""
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    if "." in text or "e" in text.lower():
        raise ValueError(f"decimal/float literal not accepted: {text!r}")
    return Fraction(text)


def format_rational(r) -> str:
    r = as_rational(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def _int_valuation(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_valuation(r, p: int) -> int:
    """Return nu_p(r) = nu_p(numerator) - nu_p(denominator)."""
    r = as_rational(r)
    if r == 0:
        raise ValueError("valuation of zero undefined")
    if p < 2:
        raise ValueError(f"p must be prime, got {p}")
    return _int_valuation(r.numerator, p) - _int_valuation(r.denominator, p)


def mod_inverse(a: int, m: int) -> int:
    try:
        return pow(a, -1, m)
    except ValueError:
        raise ValueError(f"{a} is not invertible modulo {m}") from None


def mod_prime_power(r, p: int, e: int) -> int:
    """Residue of r in [0, p^e), using the inverse of the denominator."""
    if e < 1:
        raise ValueError("exponent must be positive")
    r = as_rational(r)
    modulus = p**e
    if r.denominator % p == 0:
        raise ValueError("denominator not coprime to modulus")
    return r.numerator * mod_inverse(r.denominator, modulus) % modulus


def legendre_symbol(a: int, p: int) -> int:
    """Euler's criterion; 0 when p | a."""
    if p < 3 or p % 2 == 0:
        raise ValueError(f"p must be an odd prime, got {p}")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def jacobi_symbol(a: int, n: int) -> int:
    """Product of Legendre symbols over the prime factorization of odd n > 0."""
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be a positive odd integer, got {n}")
    out = 1
    for p, e in factorize(n):
        out *= legendre_symbol(a, p) ** e
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi (sieve of Eratosthenes)."""
    if hi < 2:
        return []
    sieve = bytearray([1]) * (hi + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(hi) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, hi + 1, i)))
    return [p for p in range(max(lo, 2), hi + 1) if sieve[p]]


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Trial-division factorization of n >= 1 as ((p, e), ...)."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_factors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


@lru_cache(maxsize=4096)
def divisors(n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError("divisors expects a positive integer")
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return tuple(small + large[::-1])
