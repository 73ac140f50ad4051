"""
Integer arithmetic substrate: prime sieves, primes in progressions,
von Mangoldt and Euler totient functions.

Tables are built once and treated as immutable (numpy arrays are marked
read-only), so they can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterator, List

import numpy as np

from diagdensity.errors import ResourceError

__all__ = [
    "PrimeTable",
    "LambdaTable",
    "SIEVE_CAP",
    "SEGMENT_THRESHOLD",
    "sieve_primes",
    "primes_up_to",
    "primes_in_ap",
    "is_prime",
    "factorize",
    "von_mangoldt",
    "euler_phi",
    "gcd",
    "lambda_table",
    "phi_table",
]

SIEVE_CAP = 10**8
SEGMENT_THRESHOLD = 10**7
SPF_LIMIT = 10**7
_SEGMENT = 1 << 20


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` in ascending order."""

    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self) -> Iterator[int]:
        return (int(p) for p in self.primes)

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, (int, np.integer)) or n > self.limit:
            return False
        i = int(np.searchsorted(self.primes, n))
        return i < len(self.primes) and self.primes[i] == n

    def tolist(self) -> List[int]:
        return [int(p) for p in self.primes]


@dataclass(frozen=True)
class LambdaTable:
    """Von Mangoldt values ``values[n] = Lambda(n)`` for 0 <= n <= limit.

    ``values[0]`` is a placeholder zero so that the array can be indexed by n.
    """

    limit: int
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        if not 1 <= n <= self.limit:
            raise IndexError(f"n={n} outside [1, {self.limit}]")
        return float(self.values[n])


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if flags[i]:
            flags[i * i :: 2 * i] = False
    return np.flatnonzero(flags).astype(np.int64)


def _segmented_sieve(limit: int) -> np.ndarray:
    base = _simple_sieve(math.isqrt(limit))
    chunks = [base]
    lo = int(base[-1]) + 1 if len(base) else 2
    while lo <= limit:
        hi = min(lo + _SEGMENT, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            flags[start - lo :: p] = False
        chunks.append(np.flatnonzero(flags).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


@lru_cache(maxsize=16)
def primes_up_to(limit: int, cap: int = SIEVE_CAP) -> np.ndarray:
    """Read-only ascending array of the primes <= limit."""
    if limit > cap:
        raise ResourceError(f"sieve limit {limit} exceeds the memory cap {cap}")
    if limit < 2:
        out = np.zeros(0, dtype=np.int64)
    elif limit > SEGMENT_THRESHOLD:
        out = _segmented_sieve(limit)
    else:
        out = _simple_sieve(limit)
    out.flags.writeable = False
    return out


def sieve_primes(limit: int, cap: int = SIEVE_CAP) -> PrimeTable:
    """Sieve of Eratosthenes; segmented above ``SEGMENT_THRESHOLD``.

    Raises ``ResourceError`` when ``limit`` exceeds ``cap``.
    """
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    return PrimeTable(limit, primes_up_to(int(limit), cap))


def primes_in_ap(m: int, lo: float, hi: float) -> List[int]:
    """Primes p with p = 1 (mod m) and lo < p < hi, both bounds strict."""
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    top = math.ceil(hi) - 1
    if top < 2:
        return []
    ps = primes_up_to(top)
    ps = ps[(ps > lo) & (ps < hi)]
    if m > 1:
        ps = ps[ps % m == 1]
    return [int(p) for p in ps]


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=4)
def _spf_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in primes_up_to(math.isqrt(limit)):
        p = int(p)
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = spf == 0
    spf[rest] = np.arange(limit + 1, dtype=np.int32)[rest]
    spf.flags.writeable = False
    return spf


def _spf_size(n: int) -> int:
    # grow in powers of two so repeated calls reuse a handful of tables
    return min(SPF_LIMIT, max(1 << 16, 1 << n.bit_length()))


def factorize(n: int) -> List[tuple]:
    """Prime factorisation of n >= 1 as ascending (p, exponent) pairs."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: List[tuple] = []
    if n < SPF_LIMIT:
        spf = _spf_table(_spf_size(n))
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def von_mangoldt(n: int) -> float:
    if n < 1:
        raise ValueError(f"Lambda is defined for n >= 1, got {n}")
    fac = factorize(n)
    return math.log(fac[0][0]) if len(fac) == 1 else 0.0


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def lambda_table(limit: int) -> LambdaTable:
    """Sieve Lambda(n) for every n <= limit."""
    values = np.zeros(limit + 1, dtype=np.float64)
    for p in primes_up_to(limit):
        p = int(p)
        logp = math.log(p)
        q = p
        while q <= limit:
            values[q] = logp
            q *= p
    values.flags.writeable = False
    return LambdaTable(limit, values)


def phi_table(limit: int) -> np.ndarray:
    """``phi[n]`` for 0 <= n <= limit (``phi[0]`` is 0)."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes_up_to(limit):
        p = int(p)
        phi[p::p] -= phi[p::p] // p
    return phi
