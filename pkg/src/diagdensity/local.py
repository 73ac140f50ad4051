"""
Value sets of diagonal forms modulo a prime, and the local densities
they induce.

Residue sets mod p are held as Python ints used as bit-vectors (bit r set
iff residue r is present).  A sumset A + B is the OR of the cyclic shifts
of A by each element of B, which costs |B| big-int shifts of p bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import FrozenSet, Iterable, Sequence, Tuple

import numpy as np

from diagdensity.arith import is_prime
from diagdensity.errors import ResourceError

__all__ = [
    "FormSpec",
    "LocalDensityRecord",
    "BITSET_CAP",
    "power_residues",
    "value_set",
    "value_set_mask",
    "local_density",
    "alpha_bound",
    "alpha_fraction",
    "coset_index",
]

BITSET_CAP = 10**6


@dataclass(frozen=True)
class FormSpec:
    """The diagonal form a_1 x_1^k + ... + a_s x_s^k."""

    coefficients: Tuple[int, ...]
    exponent: int

    def __post_init__(self):
        coeffs = tuple(int(a) for a in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) < 2:
            raise ValueError(f"need at least two coefficients, got {len(coeffs)}")
        if not any(coeffs):
            raise ValueError("all coefficients are zero")
        if int(self.exponent) < 1:
            raise ValueError(f"exponent must be >= 1, got {self.exponent}")
        object.__setattr__(self, "exponent", int(self.exponent))

    @property
    def s(self) -> int:
        return len(self.coefficients)

    @classmethod
    def parse(cls, text: str, exponent: int) -> "FormSpec":
        """Build from a comma separated coefficient list such as ``"1,1,-1"``."""
        try:
            coeffs = tuple(int(t) for t in text.split(",") if t.strip())
        except ValueError:
            raise ValueError(f"bad coefficient list {text!r}") from None
        return cls(coeffs, exponent)

    def with_exponent(self, exponent: int) -> "FormSpec":
        return FormSpec(self.coefficients, exponent)


@dataclass(frozen=True)
class LocalDensityRecord:
    prime: int
    coset_index: int
    value_set_size: int
    density: Fraction
    alpha: float
    alpha_capped: float

    @property
    def log_inv_density(self) -> float:
        return math.log(self.prime) - math.log(self.value_set_size)


def coset_index(k: int, p: int) -> int:
    """Number of nonzero k-th power residues mod p."""
    return (p - 1) // math.gcd(k, p - 1)


def alpha_fraction(k: int, p: int, s: int) -> Fraction:
    return Fraction((coset_index(k, p) + 1) ** s, p)


def alpha_bound(k: int, p: int, s: int) -> float:
    """((p-1)/gcd(k,p-1) + 1)^s / p, not capped at 1.

    It is below 1 exactly when (m + 1)^s < p with m the coset index, which
    is how callers should test it to avoid rounding.
    """
    if s < 2:
        raise ValueError(f"s must be >= 2, got {s}")
    return ((coset_index(k, p) + 1) ** s) / p


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > BITSET_CAP:
        raise ResourceError(f"p={p} exceeds the bit-vector cap {BITSET_CAP}")


def _mask_to_bits(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def _bits_to_mask(bits: int, p: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((p + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:p].astype(bool)


def _elements(bits: int, p: int) -> np.ndarray:
    return np.flatnonzero(_bits_to_mask(bits, p))


@lru_cache(maxsize=4096)
def _power_residue_elems(p: int, d: int) -> np.ndarray:
    # x^k and x^gcd(k, p-1) run over the same subgroup of units
    x = np.arange(p, dtype=np.int64)
    acc = np.ones(p, dtype=np.int64)
    base = x.copy()
    e = d
    while e:
        if e & 1:
            acc = acc * base % p
        base = base * base % p
        e >>= 1
    acc[0] = 0
    out = np.unique(acc)
    out.flags.writeable = False
    return out


def _scaled_bits(p: int, d: int, a: int) -> int:
    if a == 0:
        return 1
    mask = np.zeros(p, dtype=bool)
    mask[_power_residue_elems(p, d) * a % p] = True
    return _mask_to_bits(mask)


def _sumset(a: int, b: int, p: int, full: int) -> int:
    na, nb = a.bit_count(), b.bit_count()
    if na + nb > p:
        # x - B and A must meet for every x
        return full
    if na < nb:
        a, b = b, a
    acc = 0
    for r in _elements(b, p):
        r = int(r)
        acc |= ((a << r) | (a >> (p - r))) & full if r else a
        if acc == full:
            break
    return acc


@lru_cache(maxsize=65536)
def _value_set_bits(p: int, d: int, coeffs: Tuple[int, ...]) -> int:
    full = (1 << p) - 1
    acc = 1
    for a in coeffs:
        acc = _sumset(acc, _scaled_bits(p, d, a), p, full)
        if acc == full:
            break
    return acc


def _reduced_key(form: FormSpec, p: int) -> Tuple[int, int, Tuple[int, ...]]:
    d = math.gcd(form.exponent, p - 1)
    coeffs = tuple(sorted(a % p for a in form.coefficients))
    return p, d, coeffs


def power_residues(p: int, k: int) -> FrozenSet[int]:
    """{x^k mod p : x in F_p}, including 0."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_prime(p)
    return frozenset(int(r) for r in _power_residue_elems(p, math.gcd(k, p - 1)))


def value_set(form: FormSpec, p: int) -> FrozenSet[int]:
    """Residues mod p attained by the form over F_p^s."""
    _check_prime(p)
    return frozenset(int(r) for r in _elements(_value_set_bits(*_reduced_key(form, p)), p))


def value_set_mask(form: FormSpec, p: int) -> np.ndarray:
    """Boolean array of length p marking the value set."""
    _check_prime(p)
    return _bits_to_mask(_value_set_bits(*_reduced_key(form, p)), p)


def value_set_size(form: FormSpec, p: int) -> int:
    _check_prime(p)
    return _value_set_bits(*_reduced_key(form, p)).bit_count()


def local_density(form: FormSpec, p: int) -> LocalDensityRecord:
    size = value_set_size(form, p)
    alpha = alpha_bound(form.exponent, p, form.s)
    return LocalDensityRecord(
        prime=p,
        coset_index=coset_index(form.exponent, p),
        value_set_size=size,
        density=Fraction(size, p),
        alpha=alpha,
        alpha_capped=min(alpha, 1.0),
    )


def local_densities(form: FormSpec, primes: Iterable[int]) -> Sequence[LocalDensityRecord]:
    return [local_density(form, int(p)) for p in primes]
