"""Small elementary number theory helpers (sieves, valuations, roots)."""

from __future__ import annotations

from fractions import Fraction


def sieve_primes(n: int) -> list[int]:
    """All primes <= n."""
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    p = 2
    while p * p <= n:
        if flags[p]:
            flags[p * p:: p] = bytes(len(flags[p * p:: p]))
        p += 1
    return [i for i in range(2, n + 1) if flags[i]]


def mobius_sieve(n: int) -> list[int]:
    """mu(0..n); mu(0) is set to 0 by convention."""
    mu = [1] * (n + 1)
    mu[0] = 0
    primes = sieve_primes(n)
    for p in primes:
        for m in range(p, n + 1, p):
            mu[m] = -mu[m]
        pp = p * p
        for m in range(pp, n + 1, pp):
            mu[m] = 0
    return mu


def valuation(n: int, p: int) -> int:
    """Largest e with p^e | n; requires n != 0."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def integer_root_floor(bound, exponent: int) -> int:
    """Largest integer t >= 0 with t**exponent <= bound (bound rational/float).

    Exact: the candidate from floating point is corrected by integer
    comparison against an exact Fraction.
    """
    if exponent < 1:
        raise ValueError("exponent must be >= 1")
    b = Fraction(bound)
    if b < 1:
        return 0
    t = int(float(b) ** (1.0 / exponent))
    while Fraction(t + 1) ** exponent <= b:
        t += 1
    while t > 0 and Fraction(t) ** exponent > b:
        t -= 1
    return t
