"""Sequence-number arithmetic: finite sequences of naturals coded as prime-power products.

The empty sequence is coded by 1; a sequence v0..v_{x-1} by p_0^{v0+1} * ... * p_{x-1}^{v_{x-1}+1}.
All functions are total on naturals (non-codes get the documented default behaviour).
"""

from __future__ import annotations

import math

_PRIMES: list[int] = [2, 3, 5, 7, 11, 13]


def prime(i: int) -> int:
    """The i-th prime, 2 being the 0th."""
    while len(_PRIMES) <= i:
        c = _PRIMES[-1] + 2
        while any(c % p == 0 for p in _PRIMES if p * p <= c):
            c += 2
        _PRIMES.append(c)
    return _PRIMES[i]


def factor_exponent(n: int, p: int) -> int:
    """Exponent of the prime p in n; 0 for n = 0 by convention."""
    if n == 0 or n % p != 0:
        return 0
    # binary lifting keeps this fast even for huge exponents
    powers = [(p, 1)]
    while n % (powers[-1][0] * powers[-1][0]) == 0:
        q, k = powers[-1]
        powers.append((q * q, 2 * k))
    e = 0
    for q, k in reversed(powers):
        if n % q == 0:
            n //= q
            e += k
    return e


def proj(a: int, i: int) -> int:
    """(a)_i: exponent of the i-th prime in a; (0)_i = 0 by convention."""
    return factor_exponent(a, prime(i))


def seq_lh(a: int) -> int:
    """Length of the sequence coded by a: least i with (a)_i = 0."""
    i = 0
    while proj(a, i) != 0:
        i += 1
    return i


def seq_encode(values: list[int] | tuple[int, ...]) -> int:
    """Sequence number of a finite list; encode([]) = 1."""
    a = 1
    for i, v in enumerate(values):
        a *= prime(i) ** (v + 1)
    return a


def is_seq(a: int) -> bool:
    """True iff a codes a finite sequence (a >= 1 and only consecutive initial primes divide it)."""
    if a < 1:
        return False
    rebuilt = 1
    for i in range(seq_lh(a)):
        rebuilt *= prime(i) ** proj(a, i)
    return rebuilt == a


def seq_decode(a: int) -> list[int]:
    """Inverse of seq_encode; raises ValueError on non-codes."""
    if not is_seq(a):
        raise ValueError(f"{a} is not a sequence number")
    return [proj(a, i) - 1 for i in range(seq_lh(a))]


def seq_concat(a: int, b: int) -> int:
    """a*b = a * prod_{i<lh(b)} p_{lh(a)+i}^{(b)_i}."""
    la = seq_lh(a)
    out = a
    for i in range(seq_lh(b)):
        out *= prime(la + i) ** proj(b, i)
    return out


def singleton(v: int) -> int:
    """Code of the one-element sequence <v> = 2^{v+1}."""
    return 2 ** (v + 1)


def cantor_pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def cantor_split(z: int) -> tuple[int, int]:
    # inverse of cantor_pair via integer sqrt
    w = (math.isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y
