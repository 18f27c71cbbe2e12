"""N-fold discrete convolution of finite sequences and the factorization identities it obeys.

For sequences z_1..z_N the convolution is

    t(k) = sum over i_1 + ... + i_N = k of z_1(i_1) ... z_N(i_N).

Under the window condition (z_j(k) = 0 for (d-1)/N < k < d) and the
multiplicativity condition (z_j(l d + k) = z_j(l d) z_j(k) for 0 <= k < d)
the truncated sums factor through the subsampled sequences z_j(i d).
Everything here is generic over the element ring: values only need ``+``,
``*`` and ``== 0``.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

__all__ = [
    "ConvolvedSequence",
    "LemmaPreconditionError",
    "LEMMA_A_NOTE",
    "multi_convolve_naive",
    "multi_convolve_fast",
    "convolve_power",
    "check_key1",
    "check_key1_closed",
    "check_key2",
    "subsampled_convolution",
    "lemma_a_identity",
    "lemma_b_identity",
    "lemma_c_factorization",
    "random_key_sequence",
    "run_property_suite",
    "key1_counterexample",
]

# attached to every reported part-(a) result: the left side is the product of
# the N window sums, not their sum
LEMMA_A_NOTE = "product reading"


class LemmaPreconditionError(ValueError):
    """A window or multiplicativity hypothesis does not hold for the input."""


@dataclass(frozen=True)
class ConvolvedSequence:
    bases: tuple[tuple, ...]
    N: int
    values: tuple

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    def total(self, upto: int | None = None):
        vals = self.values if upto is None else self.values[:upto]
        return sum(vals[1:], vals[0]) if vals else 0


def _zero_of(seqs: Sequence[Sequence]) -> Any:
    for s in seqs:
        if len(s):
            return s[0] * 0
    return 0


def _check_inputs(seqs, n: int) -> list[tuple]:
    if not seqs:
        raise ValueError("need at least one sequence")
    if n < 1:
        raise ValueError("length must be >= 1")
    out = [tuple(s) for s in seqs]
    if any(len(s) < n for s in out):
        raise ValueError(f"every sequence needs at least {n} terms")
    return out


def _compositions(k: int, parts: int):
    """All (i_1, ..., i_parts) of nonnegative integers summing to k."""
    if parts == 1:
        yield (k,)
        return
    for i in range(k + 1):
        for rest in _compositions(k - i, parts - 1):
            yield (i,) + rest


def multi_convolve_naive(seqs: Sequence[Sequence], n: int) -> ConvolvedSequence:
    """t(0..n-1) by the literal nested sum over compositions of k."""
    seqs = _check_inputs(seqs, n)
    zero = _zero_of(seqs)
    values = []
    for k in range(n):
        acc = zero
        for comp in _compositions(k, len(seqs)):
            term = seqs[0][comp[0]]
            for s, i in zip(seqs[1:], comp[1:]):
                term = term * s[i]
            acc = acc + term
        values.append(acc)
    return ConvolvedSequence(tuple(s[:n] for s in seqs), len(seqs), tuple(values))


def _cauchy(a: Sequence, b: Sequence, n: int, zero) -> list:
    out = [zero] * n
    nz_b = [(j, y) for j, y in enumerate(b[:n]) if y != 0]
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j, y in nz_b:
            if i + j >= n:
                break
            out[i + j] = out[i + j] + x * y
    return out


def multi_convolve_fast(seqs: Sequence[Sequence], n: int) -> ConvolvedSequence:
    """Same values as :func:`multi_convolve_naive`, by iterated pairwise products."""
    seqs = _check_inputs(seqs, n)
    zero = _zero_of(seqs)
    acc = list(seqs[0][:n])
    for s in seqs[1:]:
        acc = _cauchy(acc, s, n, zero)
    return ConvolvedSequence(tuple(s[:n] for s in seqs), len(seqs), tuple(acc))


def convolve_power(seq: Sequence, N: int, n: int) -> list:
    """N-fold self-convolution truncated to n terms, by repeated squaring."""
    if N < 1:
        raise ValueError("N must be >= 1")
    seq = _check_inputs([seq], n)[0]
    zero = _zero_of([seq])
    result = None
    base = list(seq[:n])
    while N:
        if N & 1:
            result = base if result is None else _cauchy(result, base, n, zero)
        N >>= 1
        if N:
            base = _cauchy(base, base, n, zero)
    return result


# -- hypotheses ----------------------------------------------------------------


def check_key1(seq: Sequence, d: int, N: int) -> bool:
    """z(k) == 0 for every k with (d-1)/N < k < d."""
    if d < 1 or N < 1:
        raise ValueError("need d >= 1 and N >= 1")
    if len(seq) < d:
        raise ValueError(f"sequence shorter than window {d}")
    return all(seq[k] == 0 for k in range(d) if k * N > d - 1)


def check_key1_closed(seq: Sequence, d: int, N: int) -> bool:
    """Stronger variant: z(k) == 0 for (d-1)/N <= k <= d-1."""
    if d < 1 or N < 1:
        raise ValueError("need d >= 1 and N >= 1")
    if len(seq) < d:
        raise ValueError(f"sequence shorter than window {d}")
    return all(seq[k] == 0 for k in range(d) if k * N >= d - 1)


def check_key2(seq: Sequence, d: int, upto: int | None = None) -> bool:
    """z(l d + k) == z(l d) z(k) for 0 <= k < d and l d + k < upto."""
    upto = len(seq) if upto is None else upto
    for idx in range(upto):
        l, k = divmod(idx, d)
        if seq[idx] != seq[l * d] * seq[k]:
            return False
    return True


def subsampled_convolution(seqs: Sequence[Sequence], d: int, L: int) -> list:
    """T(0..L-1): the N-fold convolution of the subsampled sequences z_j(i d)."""
    sub = [[s[i * d] for i in range(L)] for s in seqs]
    return list(multi_convolve_fast(sub, L).values)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise LemmaPreconditionError(msg)


def _sum(values, zero):
    acc = zero
    for v in values:
        acc = acc + v
    return acc


def lemma_a_identity(seqs: Sequence[Sequence], d: int, *, strict: bool = True) -> bool:
    """sum_{k<d} t(k) == prod_j sum_{k<d} z_j(k).

    With ``strict`` the window condition is enforced first; pass
    ``strict=False`` to evaluate the identity on inputs that violate it.
    """
    seqs = _check_inputs(seqs, d)
    N = len(seqs)
    if strict:
        _require(all(check_key1(s, d, N) for s in seqs), "window condition fails")
    zero = _zero_of(seqs)
    t = multi_convolve_fast(seqs, d)
    lhs = _sum(t.values, zero)
    rhs = None
    for s in seqs:
        part = _sum(s[:d], zero)
        rhs = part if rhs is None else rhs * part
    return lhs == rhs


def lemma_b_identity(seqs: Sequence[Sequence], d: int, l: int, k: int) -> bool:
    """t(l d + k) == t(k) * T(l)."""
    if not 0 <= k < d or l < 0:
        raise ValueError("need 0 <= k < d and l >= 0")
    top = l * d + k + 1
    seqs = _check_inputs(seqs, max(top, d))
    N = len(seqs)
    _require(all(check_key1(s, d, N) for s in seqs), "window condition fails")
    _require(all(check_key2(s, d, top) for s in seqs), "multiplicativity fails")
    t = multi_convolve_fast(seqs, max(top, d))
    T = subsampled_convolution(seqs, d, l + 1)
    return t[l * d + k] == t[k] * T[l]


def lemma_c_factorization(seqs: Sequence[Sequence], d: int, n: int) -> bool:
    """sum_{k<n} t(k) == (sum_{l<n/d} T(l)) * sum_{k<d} t(k), for d | n."""
    if d < 1 or n < 1 or n % d:
        raise LemmaPreconditionError("d must divide n")
    seqs = _check_inputs(seqs, n)
    N = len(seqs)
    _require(all(check_key1(s, d, N) for s in seqs), "window condition fails")
    _require(all(check_key2(s, d, n) for s in seqs), "multiplicativity fails")
    zero = _zero_of(seqs)
    t = multi_convolve_fast(seqs, n)
    T = subsampled_convolution(seqs, d, n // d)
    return _sum(t.values, zero) == _sum(T, zero) * _sum(t.values[:d], zero)


# -- seeded property harness ------------------------------------------------------


def _rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 5))


def random_key_sequence(
    rng: random.Random, d: int, N: int, length: int, *, multiplicative: bool = True
) -> list[Fraction]:
    """Random rationals obeying the window condition for (d, N), and optionally
    multiplicativity: z(l d + k) = w(l) z(k) with z(0) = w(0) = 1.

    About one draw in twenty is the degenerate all-zero sequence (z(0) = 0
    forces it under multiplicativity).
    """
    if multiplicative and rng.random() < 0.05:
        return [Fraction(0)] * length
    head = [Fraction(0)] * d
    head[0] = Fraction(1) if multiplicative else _rand_fraction(rng)
    for k in range(1, d):
        if k * N <= d - 1:
            head[k] = _rand_fraction(rng)
    if not multiplicative:
        return [head[i] if i < d else _rand_fraction(rng) for i in range(length)]
    weights = [Fraction(1)] + [_rand_fraction(rng) for _ in range((length - 1) // d)]
    return [weights[i // d] * head[i % d] for i in range(length)]


def key1_counterexample() -> tuple[list[list[Fraction]], int]:
    """Two all-ones sequences with d = 3: the window condition fails and so
    does the product identity (6 versus 9)."""
    ones = [Fraction(1)] * 3
    return [ones, list(ones)], 3


def run_property_suite(seed: int = 0, trials: int = 200, parts: str = "abc") -> dict:
    """Seeded random instances of the three factorization identities.

    Ranges: part a uses N <= 4, d <= 9; part b l <= 3; part c d | n <= 18.
    Returns a JSON-ready dict {seed, trials, failures, counts, note, guard}.
    """
    rng = random.Random(seed)
    failures: list[dict] = []
    counts: dict[str, int] = {}
    for part in parts:
        done = 0
        for trial in range(trials):
            N = rng.randint(2, 4)
            if part == "a":
                d = rng.randint(1, 9)
                seqs = [random_key_sequence(rng, d, N, d, multiplicative=False) for _ in range(N)]
                ok = lemma_a_identity(seqs, d)
                case = {"N": N, "d": d}
            elif part == "b":
                d = rng.randint(1, 6)
                l, k = rng.randint(0, 3), rng.randint(0, d - 1)
                length = max(l * d + k + 1, d)
                seqs = [random_key_sequence(rng, d, N, length) for _ in range(N)]
                ok = lemma_b_identity(seqs, d, l, k)
                case = {"N": N, "d": d, "l": l, "k": k}
            elif part == "c":
                n = rng.randint(1, 18)
                d = rng.choice([x for x in range(1, n + 1) if n % x == 0])
                seqs = [random_key_sequence(rng, d, N, n) for _ in range(N)]
                ok = lemma_c_factorization(seqs, d, n)
                case = {"N": N, "d": d, "n": n}
            else:
                raise ValueError(f"unknown lemma part {part!r}")
            done += 1
            if not ok:
                failures.append({"part": part, "trial": trial, **case})
        counts[part] = done
    seqs, d = key1_counterexample()
    guard_fails = not lemma_a_identity(seqs, d, strict=False)
    return {
        "seed": seed,
        "trials": trials,
        "counts": counts,
        "failures": failures,
        "note": LEMMA_A_NOTE,
        "guard": {"key1_violated": not check_key1(seqs[0], d, 2), "identity_fails": guard_fails},
    }


def suite_json(result: dict) -> str:
    return json.dumps(result, indent=2, sort_keys=True)


def _all_equal(a: Sequence, b: Sequence) -> bool:
    return len(a) == len(b) and all(x == y for x, y in zip(a, b))


def is_symmetric(seqs: Sequence[Sequence], n: int) -> bool:
    """Permuting the base sequences leaves the convolution unchanged."""
    ref = multi_convolve_fast(seqs, n).values
    return all(
        _all_equal(multi_convolve_fast(list(p), n).values, ref)
        for p in itertools.permutations(seqs)
    )
