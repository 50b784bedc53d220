"""Exact and floating-point combinatorial primitives."""

import math
from functools import lru_cache

from .errors import DomainError

__all__ = [
    "binomial_exact",
    "log2_binomial",
    "binary_entropy",
    "is_prime",
    "is_prime_power",
    "integer_root",
    "ceil_div",
]

# Deterministic Miller-Rabin witness set, correct for all n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def binomial_exact(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k); zero when k is outside [0, n]."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def log2_binomial(n: int, k: int) -> float:
    """log2 C(n, k) as a compensated sum of per-factor logarithms."""
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"log2_binomial needs 0 <= k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    if k == 0:
        return 0.0
    terms = [math.log2(n - k + i) - math.log2(i) for i in range(1, k + 1)]
    return math.fsum(terms)


def binary_entropy(x: float) -> float:
    """Base-2 binary entropy H(x), with H(0) = H(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary entropy is defined on [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def integer_root(m: int, e: int) -> int:
    """Floor of the e-th root of a non-negative integer ``m``."""
    if m < 0 or e < 1:
        raise DomainError(f"integer_root needs m >= 0 and e >= 1, got {m}, {e}")
    if e == 1 or m < 2:
        return m
    if e == 2:
        return math.isqrt(m)
    # float seed, then exact correction
    r = int(round(m ** (1.0 / e))) if m.bit_length() < 1000 else 1 << (m.bit_length() // e + 1)
    while r ** e > m:
        r -= 1
    while (r + 1) ** e <= m:
        r += 1
    return r


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    for q in _SMALL_PRIMES:
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def _prime_exponents(limit: int):
    return tuple(e for e in range(2, limit + 1) if is_prime(e))


def is_prime_power(m: int) -> bool:
    """True iff m = q**e for a prime q and e >= 1. One is not a prime power."""
    if m <= 0:
        raise DomainError(f"is_prime_power needs a positive integer, got {m}")
    if m == 1:
        return False
    if m & 1 == 0:
        return m & (m - 1) == 0
    if is_prime(m):
        return True
    # m = q**e with e composite is reached by peeling one prime exponent at a time
    for e in _prime_exponents(m.bit_length()):
        r = integer_root(m, e)
        if r < 3:
            break
        if r ** e == m:
            return is_prime_power(r)
    return False


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)
