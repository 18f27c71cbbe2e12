"""Dense integer polynomial kernels.

Multiplication packs both operands into single Python ints (Kronecker
substitution) so the product is one big-int multiply.  Small inputs fall
back to schoolbook.
"""

from __future__ import annotations

_SCHOOLBOOK_LIMIT = 400  # len(a) * len(b) below which schoolbook wins


def trim(coeffs: list[int]) -> list[int]:
    n = len(coeffs)
    while n and not coeffs[n - 1]:
        n -= 1
    del coeffs[n:]
    return coeffs


def _schoolbook(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pack(coeffs: list[int], nbytes: int) -> int:
    zero = bytes(nbytes)
    pos = b"".join(c.to_bytes(nbytes, "little") if c > 0 else zero for c in coeffs)
    neg = b"".join((-c).to_bytes(nbytes, "little") if c < 0 else zero for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def mul(a: list[int], b: list[int]) -> list[int]:
    """Product of two dense integer coefficient lists (no trimming)."""
    if not a or not b:
        return []
    if len(a) * len(b) <= _SCHOOLBOOK_LIMIT:
        return _schoolbook(a, b)
    ma = max(map(abs, a))
    mb = max(map(abs, b))
    n = len(a) + len(b) - 1
    if not ma or not mb:
        return [0] * n
    bound = ma * mb * min(len(a), len(b))
    # one sign bit plus headroom, rounded up to whole bytes
    nbytes = (bound.bit_length() + 2 + 7) // 8
    prod = _pack(a, nbytes) * _pack(b, nbytes)
    half = 1 << (8 * nbytes - 1)
    bias = int.from_bytes((bytes(nbytes - 1) + b"\x80") * n, "little")
    buf = (prod + bias).to_bytes(n * nbytes, "little")
    return [
        int.from_bytes(buf[i : i + nbytes], "little") - half
        for i in range(0, n * nbytes, nbytes)
    ]


def bimul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    """Product of bivariate integer polynomials given as rows (outer variable major)."""
    if not a or not b:
        return []
    wa = max(len(r) for r in a)
    wb = max(len(r) for r in b)
    if wa == 0 or wb == 0:
        return [[] for _ in range(len(a) + len(b) - 1)]
    stride = wa + wb - 1
    flat_a = []
    for r in a:
        flat_a.extend(r)
        flat_a.extend([0] * (stride - len(r)))
    flat_b = []
    for r in b:
        flat_b.extend(r)
        flat_b.extend([0] * (stride - len(r)))
    flat = mul(flat_a, flat_b)
    rows = len(a) + len(b) - 1
    flat.extend([0] * (rows * stride - len(flat)))
    return [flat[i * stride : (i + 1) * stride] for i in range(rows)]


def add(a: list[int], b: list[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def divrem_monic(a: list[int], m: list[int]) -> tuple[list[int], list[int]]:
    """Quotient and remainder of a by a monic integer polynomial m."""
    dm = len(m) - 1
    if m[-1] != 1:
        raise ValueError("divisor must be monic")
    rem = list(a)
    if len(rem) <= dm:
        return [], trim(rem)
    quot = [0] * (len(rem) - dm)
    for i in range(len(rem) - 1, dm - 1, -1):
        c = rem[i]
        if c:
            quot[i - dm] = c
            base = i - dm
            for j in range(dm):
                if m[j]:
                    rem[base + j] -= c * m[j]
            rem[i] = 0
    return trim(quot), trim(rem[:dm])
