"""
Upper bounds on the global density of a diagonal form, obtained by
multiplying local densities over a finite set of primes.

Two routes are offered:

* ``bound_alpha`` uses only the coefficient-free local bound
  ((p-1)/gcd(k,p-1) + 1)^s / p at primes p = 1 (mod k) below the cutoff
  Z = k^(1 + 1/(s-1)) / R.
* ``bound_exact`` computes the exact local density at every prime up to a
  limit.

Both report a lower bound on log(1/density).  Per-prime terms are
aggregated with ``math.fsum`` in ascending prime order, so the result is
independent of how the terms were produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from diagdensity.arith import primes_up_to
from diagdensity.local import FormSpec, value_set_size

__all__ = [
    "GlobalBoundConfig",
    "GlobalBoundReport",
    "prime_cutoff",
    "bound_alpha",
    "bound_exact",
    "bound",
    "conditional_reference",
]

MODES = ("alpha", "exact")


@dataclass(frozen=True)
class GlobalBoundConfig:
    """Parameters for the global bounds.

    ``R = 1`` makes the cutoff irrelevant: at p >= k^(1+1/(s-1)) the local
    bound is never below 1, so every useful prime is kept.
    """

    R: float = 4.0
    prime_limit: int = 10**4
    mode: str = "alpha"

    def __post_init__(self):
        if not self.R >= 1:
            raise ValueError(f"R must be >= 1, got {self.R}")
        if self.prime_limit < 2:
            raise ValueError(f"prime_limit must be >= 2, got {self.prime_limit}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class GlobalBoundReport:
    k: int
    s: int
    mode: str
    log_inv_density_lower: float
    density_upper: float
    contributing: List[Tuple[int, float]] = field(default_factory=list)
    conditional_reference: Optional[float] = None
    # reserved: exact zero density is never detected by finite products
    density_is_zero: bool = False


def prime_cutoff(k: int, s: int, R: float) -> float:
    """Z = k^(1 + 1/(s-1)) / R."""
    if s < 2:
        raise ValueError(f"s must be >= 2, got {s}")
    return k ** (1 + 1 / (s - 1)) / R


def conditional_reference(k: int, s: int) -> float:
    """k^(1/(s-1)) / log k, without any implied constant."""
    if k < 3:
        raise ValueError(f"reference curve needs k >= 3, got {k}")
    return k ** (1 / (s - 1)) / math.log(k)


def _report(k: int, s: int, mode: str, terms: List[Tuple[int, float]]) -> GlobalBoundReport:
    total = math.fsum(t for _, t in terms)
    return GlobalBoundReport(
        k=k,
        s=s,
        mode=mode,
        log_inv_density_lower=total,
        density_upper=math.exp(-total),
        contributing=terms,
        conditional_reference=conditional_reference(k, s) if k >= 3 else None,
    )


def bound_alpha(k: int, s: int, config: GlobalBoundConfig) -> GlobalBoundReport:
    """Coefficient-independent lower bound on log(1/delta_k).

    Sums log p - s log((p-1)/k + 1) over primes p = 1 (mod k) with p < Z and
    p <= prime_limit, keeping only primes where that term is positive.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    Z = prime_cutoff(k, s, config.R)
    top = min(config.prime_limit, math.ceil(Z) - 1)
    terms: List[Tuple[int, float]] = []
    if top >= 2:
        ps = primes_up_to(top)
        if k > 1:
            ps = ps[ps % k == 1]
        for p in ps:
            p = int(p)
            if p >= Z:
                break
            m = (p - 1) // k
            if (m + 1) ** s < p:
                terms.append((p, math.log(p) - s * math.log(m + 1)))
    return _report(k, s, "alpha", terms)


def bound_exact(form: FormSpec, config: GlobalBoundConfig) -> GlobalBoundReport:
    """Sum of log(1/delta_k(p)) over all primes p <= prime_limit."""
    terms: List[Tuple[int, float]] = []
    for p in primes_up_to(config.prime_limit):
        p = int(p)
        size = value_set_size(form, p)
        if size < p:
            terms.append((p, math.log(p) - math.log(size)))
    return _report(form.exponent, form.s, "exact", terms)


def bound(k: int, s: int, config: GlobalBoundConfig, form: Optional[FormSpec] = None) -> GlobalBoundReport:
    """Dispatch on ``config.mode``; exact mode needs a form."""
    if config.mode == "exact":
        if form is None:
            raise ValueError("exact mode needs coefficients")
        return bound_exact(form.with_exponent(k), config)
    return bound_alpha(k, s, config)
