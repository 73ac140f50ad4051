"""
Averaging over the exponent: Chebyshev psi in progressions, the
sum_{m<Y} psi(mX; m, 1) estimate with its error integral, Landau's
asymptotic for sum 1/phi(n), the (m, p) double sum that lower-bounds the
averaged log(1/density), and its partial-summation lower bound.

Conventions kept on purpose: psi counts n < X strictly, whereas the Landau
partial sum runs over n <= x.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from diagdensity.arith import lambda_table, phi_table, primes_up_to
from diagdensity.bounds import GlobalBoundConfig, bound_alpha, bound_exact
from diagdensity.errors import TableRangeError
from diagdensity.local import FormSpec

__all__ = [
    "PsiTable",
    "LandauConstants",
    "LandauComparison",
    "AverageConfig",
    "AverageReport",
    "zeta",
    "landau_constants",
    "psi",
    "lemma3_lhs",
    "lemma3_main_term",
    "error_integral_term",
    "lemma3_error_integral",
    "landau_sum",
    "double_sum_terms",
    "theorem1_double_sum",
    "s1_partial_summation_bound",
    "average_log_inv_density",
    "y_condition_holds",
]


@dataclass(frozen=True)
class PsiTable:
    limit: int
    lam: np.ndarray
    primes: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "PsiTable":
        return cls(limit, lambda_table(limit).values, primes_up_to(limit))

    def _check(self, X: float) -> None:
        if X > self.limit:
            raise TableRangeError(f"X={X} exceeds the psi table limit {self.limit}")


def psi(table: PsiTable, X: float, q: int, a: int) -> float:
    """Sum of Lambda(n) over 1 <= n < X with n = a (mod q)."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    table._check(X)
    hi = math.ceil(X) - 1
    start = a % q or q
    if hi < start:
        return 0.0
    return math.fsum(table.lam[start : hi + 1 : q])


def _m_range(Y: float) -> range:
    # integers 1 <= m < Y
    return range(1, max(1, math.ceil(Y)))


def _check_products(table: PsiTable, X: float, Y: float) -> None:
    ms = _m_range(Y)
    if len(ms):
        table._check(ms[-1] * X)


def lemma3_lhs(table: PsiTable, X: float, Y: float) -> float:
    """sum_{1 <= m < Y} psi(mX; m, 1), for Y <= sqrt(X)."""
    if Y > math.sqrt(X):
        raise ValueError(f"need Y <= X^(1/2), got X={X}, Y={Y}")
    _check_products(table, X, Y)
    return math.fsum(psi(table, m * X, m, 1) for m in _m_range(Y))


@dataclass(frozen=True)
class LandauConstants:
    C_L: float
    c3: float
    gamma: float
    prime_correction: float
    prime_bound: int

    def predicted(self, x: float) -> float:
        """Main term of sum_{n <= x} 1/phi(n)."""
        return self.C_L * (math.log(x) + self.gamma - self.prime_correction)


# B_2, B_4, ..., B_12
_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
)


def zeta(s: float, N: int = 12) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin summation."""
    if s <= 1:
        raise ValueError(f"zeta series needs s > 1, got {s}")
    head = math.fsum(n ** -s for n in range(1, N))
    tail = [N ** (1 - s) / (s - 1), N ** -s / 2]
    rising = s
    for j, b in enumerate(_BERNOULLI, start=1):
        # rising = s (s+1) ... (s + 2j - 2)
        tail.append(float(b) / math.factorial(2 * j) * rising * N ** (-s - 2 * j + 1))
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return head + math.fsum(tail)


def landau_constants(prime_bound: int = 10**6) -> LandauConstants:
    ps = primes_up_to(prime_bound).astype(np.float64)
    correction = math.fsum(np.log(ps) / (ps * ps - ps + 1))
    C_L = zeta(2) * zeta(3) / zeta(6)
    return LandauConstants(
        C_L=C_L,
        c3=C_L * math.log(2),
        gamma=float(np.euler_gamma),
        prime_correction=correction,
        prime_bound=prime_bound,
    )


def lemma3_main_term(constants: LandauConstants, X: float, Y: float) -> float:
    return constants.c3 * X * Y


def error_integral_term(table: PsiTable, X: float, m: int, s: int) -> float:
    """Integral of psi(t; m, 1) / (t log^2 t) over [(m+1)^s, mX].

    psi(t; m, 1) is a step function jumping by Lambda(n) just after t = n,
    so with the antiderivative -1/log t each jump n < mX contributes
    Lambda(n) (1/log max(n, (m+1)^s) - 1/log(mX)).
    """
    lo, hi = (m + 1) ** s, m * X
    if lo >= hi:
        return 0.0
    table._check(hi)
    n = np.arange(1, math.ceil(hi), m)
    w = table.lam[n]
    keep = w > 0
    n, w = n[keep], w[keep]
    if not len(n):
        return 0.0
    left = np.log(np.maximum(n, lo).astype(np.float64))
    return math.fsum(w * (1.0 / left - 1.0 / math.log(hi)))


def lemma3_error_integral(table: PsiTable, X: float, Y: float, s: int) -> float:
    if s < 2:
        raise ValueError(f"s must be >= 2, got {s}")
    _check_products(table, X, Y)
    return math.fsum(error_integral_term(table, X, m, s) for m in _m_range(Y))


@dataclass(frozen=True)
class LandauComparison:
    x: int
    partial_sum: float
    predicted: float

    @property
    def difference(self) -> float:
        return self.partial_sum - self.predicted


def landau_sum(x: int, constants: Optional[LandauConstants] = None) -> LandauComparison:
    """Exact sum_{n <= x} 1/phi(n) next to Landau's predicted main term."""
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    constants = constants or landau_constants()
    phi = phi_table(x)
    partial = math.fsum(1.0 / phi[1:].astype(np.float64))
    return LandauComparison(x, partial, constants.predicted(x))


def y_condition_holds(X: float, s: int, Y: float) -> bool:
    """(Y + 1)^s < X Y."""
    return (Y + 1) ** s < X * Y


def double_sum_terms(table: PsiTable, X: float, s: int, Y: float) -> List[Tuple[int, int, float]]:
    """(m, p, log p - s log(m+1)) for 1 <= m < Y, p = 1 (mod m), (m+1)^s < p < mX."""
    _check_products(table, X, Y)
    out = []
    for m in _m_range(Y):
        lo, hi = (m + 1) ** s, m * X
        if lo >= hi:
            continue
        i, j = np.searchsorted(table.primes, [lo, hi], side="right")
        ps = table.primes[i:j]
        ps = ps[ps < hi]
        if m > 1:
            ps = ps[ps % m == 1]
        shift = s * math.log(m + 1)
        out.extend((m, int(p), math.log(p) - shift) for p in ps)
    return out


def theorem1_double_sum(table: PsiTable, X: float, s: int, Y: float) -> float:
    """The (m, p) double sum restricted to 1 <= m < Y.

    The Y-condition (Y+1)^s < XY is not enforced here; the sum is well
    defined without it.  See ``AverageConfig`` for the validated path.
    """
    return math.fsum(t for _, _, t in double_sum_terms(table, X, s, Y))


def s1_partial_summation_bound(table: PsiTable, X: float, s: int, Y: float) -> float:
    """sum_{1<=m<Y} [psi(mX;m,1)(1 - s log(m+1)/log(mX)) - s log(m+1) E_m].

    E_m is ``error_integral_term``.  The psi term is kept even when
    (m+1)^s >= mX, where its weight is <= 0.  The result equals
    sum Lambda(n) (1 - s log(m+1)/log n) over n = 1 (mod m) in
    ((m+1)^s, mX), so proper prime powers in that window push it above
    ``theorem1_double_sum``.
    """
    if X <= 1:
        raise ValueError(f"X must exceed 1, got {X}")
    _check_products(table, X, Y)
    parts = []
    for m in _m_range(Y):
        shift = s * math.log(m + 1)
        weight = 1 - shift / math.log(m * X)
        parts.append(psi(table, m * X, m, 1) * weight)
        parts.append(-shift * error_integral_term(table, X, m, s))
    return math.fsum(parts)


@dataclass(frozen=True)
class AverageConfig:
    """X, s and a Y obeying (Y+1)^s < XY and Y <= X^(1/2).

    When ``Y`` is omitted it is derived as X^(1/(s-1+eta)); ``eta``
    defaults to C / log X.
    """

    X: float
    s: int
    Y: Optional[float] = None
    eta: Optional[float] = None
    C: float = 2.0

    def __post_init__(self):
        if self.s < 2:
            raise ValueError(f"s must be >= 2, got {self.s}")
        if self.X <= 1:
            raise ValueError(f"X must exceed 1, got {self.X}")
        Y = self.Y
        if Y is None:
            eta = self.eta if self.eta is not None else self.C / math.log(self.X)
            if not 0 < eta < 0.5:
                raise ValueError(f"eta must lie in (0, 1/2), got {eta}")
            object.__setattr__(self, "eta", eta)
            Y = self.X ** (1 / (self.s - 1 + eta))
            object.__setattr__(self, "Y", Y)
        if not y_condition_holds(self.X, self.s, Y):
            raise ValueError(f"(Y+1)^s < XY fails for X={self.X}, s={self.s}, Y={Y}")
        if Y > math.sqrt(self.X):
            raise ValueError(f"need Y <= X^(1/2), got X={self.X}, Y={Y}")


@dataclass
class AverageReport:
    X: int
    s: int
    average: float
    reference: float
    per_k: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def normalized(self) -> float:
        """average * log X / X^(1/(s-1))."""
        return self.average / self.reference


def average_log_inv_density(
    X: int,
    s: int,
    config: GlobalBoundConfig,
    coefficients: Optional[Sequence[int]] = None,
    threads: int = 1,
) -> AverageReport:
    """(1/X) sum_{1 <= k < X} of the per-k lower bound on log(1/delta_k).

    Alpha mode uses ``bound_alpha``; exact mode applies ``bound_exact`` to
    the given coefficients at every k (and then s is len(coefficients)).
    k = 1 always contributes 0.
    """
    if X < 2:
        raise ValueError(f"X must be >= 2, got {X}")
    if config.mode == "exact":
        if coefficients is None:
            raise ValueError("exact mode needs coefficients")
        s = len(coefficients)

        def one(k: int) -> float:
            return bound_exact(FormSpec(tuple(coefficients), k), config).log_inv_density_lower

    else:

        def one(k: int) -> float:
            return bound_alpha(k, s, config).log_inv_density_lower

    ks = range(2, X)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            values = list(pool.map(one, ks))
    else:
        values = [one(k) for k in ks]
    per_k = [(1, 0.0)] + list(zip(ks, values))
    return AverageReport(
        X=X,
        s=s,
        average=math.fsum(values) / X,
        reference=X ** (1 / (s - 1)) / math.log(X),
        per_k=per_k,
    )
