"""
Two-sided finite-window density measurement on [1, N].

``boxed_scan`` enumerates the form over the box [-B, B]^s and records which
n in [1, N] it hits (a lower count).  ``sieve_upper`` keeps the n whose
residues lie in the local value set at every sieve prime (an upper count).
Both numbers describe the window [1, N] only, never the limiting density.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from diagdensity.arith import is_prime
from diagdensity.errors import ResourceError
from diagdensity.local import FormSpec, value_set_mask

__all__ = [
    "ScanConfig",
    "ScanReport",
    "WORK_BUDGET",
    "MODULUS_BUDGET",
    "evaluate_form",
    "boxed_scan",
    "sieve_upper",
    "density_report",
    "is_admissible",
]

WORK_BUDGET = 10**9
MODULUS_BUDGET = 10**9
INT128_MAX = (1 << 127) - 1
# numpy fast path needs every partial sum inside int64
_INT64_SAFE = (1 << 62) - 1
_CHUNK = 1 << 20


@dataclass(frozen=True)
class ScanConfig:
    N: int
    B: int
    sieve_primes: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sieve_primes", tuple(int(p) for p in self.sieve_primes))
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.B < 0:
            raise ValueError(f"B must be >= 0, got {self.B}")
        if len(set(self.sieve_primes)) != len(self.sieve_primes):
            raise ValueError(f"sieve primes must be distinct: {self.sieve_primes}")
        for p in self.sieve_primes:
            if not is_prime(p):
                raise ValueError(f"sieve modulus {p} is not prime")

    @property
    def modulus(self) -> int:
        return math.prod(self.sieve_primes)


@dataclass
class ScanReport:
    N: int
    represented: Optional[FrozenSet[int]] = None
    witnesses: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    sieve_admissible_count: Optional[int] = None
    sieve_modulus: Optional[int] = None
    consistent: Optional[bool] = None

    @property
    def lower_density(self) -> Optional[Fraction]:
        if self.represented is None:
            return None
        return Fraction(len(self.represented), self.N)

    @property
    def sieve_upper_density(self) -> Optional[Fraction]:
        if self.sieve_admissible_count is None:
            return None
        return Fraction(self.sieve_admissible_count, self.N)

    @property
    def aligned(self) -> Optional[bool]:
        """True when N is a multiple of the sieve modulus, the only case in
        which lower <= upper is guaranteed."""
        if self.sieve_modulus is None:
            return None
        return self.N % self.sieve_modulus == 0


def evaluate_form(form: FormSpec, x: Sequence[int]) -> int:
    """Exact value of the form at x, checked against the signed 128-bit range."""
    if len(x) != form.s:
        raise ValueError(f"expected {form.s} coordinates, got {len(x)}")
    total = 0
    for i, (a, xi) in enumerate(zip(form.coefficients, x)):
        term = a * int(xi) ** form.exponent
        if abs(term) > INT128_MAX:
            raise OverflowError(f"term {i} ({a}*{xi}^{form.exponent}) overflows 128 bits")
        total += term
        if abs(total) > INT128_MAX:
            raise OverflowError(f"partial sum through term {i} overflows 128 bits")
    return total


def _term_values(form: FormSpec, B: int) -> List[np.ndarray]:
    xs = np.arange(-B, B + 1, dtype=np.int64)
    return [a * xs**form.exponent for a in form.coefficients]


def _first_hits(values: np.ndarray, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct values in [1, N] and the flat index of their first occurrence."""
    flat = values.ravel()
    idx = np.flatnonzero((flat >= 1) & (flat <= N))
    vals, first = np.unique(flat[idx], return_index=True)
    return vals, idx[first]


def _direct_chunk(terms: List[np.ndarray], N: int, i0: int) -> Tuple[np.ndarray, np.ndarray]:
    # all coordinates after the first, broadcast into one grid
    grid = terms[0][i0]
    for t in terms[1:]:
        grid = np.add.outer(grid, t)
    return _first_hits(np.asarray(grid), N)


def _mitm_chunk(terms: List[np.ndarray], N: int, i0: int) -> Tuple[np.ndarray, np.ndarray]:
    # first coordinate fixed at i0; split the rest into left/right halves
    rest = terms[1:]
    h = len(rest) // 2
    left = terms[0][i0]
    for t in rest[:h]:
        left = np.add.outer(left, t)
    right = np.zeros((), dtype=np.int64)
    for t in rest[h:]:
        right = np.add.outer(right, t)
    left, right = np.asarray(left).ravel(), np.asarray(right).ravel()
    order = np.argsort(right, kind="stable")
    rs = right[order]
    lo = np.searchsorted(rs, 1 - left, side="left")
    hi = np.searchsorted(rs, N - left, side="right")
    seen = np.zeros(N + 1, dtype=bool)
    vals, where = [], []
    nright = len(right)
    for li in np.flatnonzero(hi > lo):
        cand = left[li] + rs[lo[li] : hi[li]]
        fresh = ~seen[cand]
        if not fresh.any():
            continue
        c, first = np.unique(cand[fresh], return_index=True)
        seen[c] = True
        vals.append(c)
        where.append(li * nright + order[lo[li] : hi[li]][fresh][first])
    if not vals:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(vals), np.concatenate(where)


def _python_scan(form: FormSpec, N: int, B: int) -> Dict[int, Tuple[int, ...]]:
    found: Dict[int, Tuple[int, ...]] = {}
    for x in itertools.product(range(-B, B + 1), repeat=form.s):
        n = evaluate_form(form, x)
        if 1 <= n <= N and n not in found:
            found[n] = x
    return found


def boxed_scan(
    form: FormSpec,
    config: ScanConfig,
    work_budget: int = WORK_BUDGET,
    threads: int = 1,
) -> ScanReport:
    """Values of the form over [-B, B]^s that land in [1, N].

    The first coordinate is partitioned into independent chunks; results are
    merged in ascending chunk order, so the witness kept for each n (the
    first one found in that order) does not depend on ``threads``.
    """
    N, B, s, k = config.N, config.B, form.s, form.exponent
    side = 2 * B + 1
    if side**s > work_budget:
        raise ResourceError(
            f"box of {side}^{s} points exceeds the work budget {work_budget}; use a smaller B"
        )
    if B == 0:
        return ScanReport(N=N, represented=frozenset(), witnesses={})
    if sum(abs(a) for a in form.coefficients) * B**k > _INT64_SAFE:
        found = _python_scan(form, N, B)
        return ScanReport(N=N, represented=frozenset(found), witnesses=found)

    terms = _term_values(form, B)
    chunk = _mitm_chunk if s >= 4 else _direct_chunk
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda i: chunk(terms, N, i), range(side)))
    else:
        results = [chunk(terms, N, i) for i in range(side)]

    rest_shape = (side,) * (s - 1)
    witnesses: Dict[int, Tuple[int, ...]] = {}
    for i0, (vals, flat) in enumerate(results):
        for v, f in zip(vals.tolist(), flat.tolist()):
            if v not in witnesses:
                rest = np.unravel_index(f, rest_shape)
                witnesses[v] = (i0 - B,) + tuple(int(r) - B for r in rest)
    return ScanReport(N=N, represented=frozenset(witnesses), witnesses=witnesses)


def _masks(form: FormSpec, primes: Sequence[int]) -> List[Tuple[int, np.ndarray]]:
    return [(p, value_set_mask(form, p)) for p in primes]


def is_admissible(n: int, masks: List[Tuple[int, np.ndarray]]) -> bool:
    return all(mask[n % p] for p, mask in masks)


def sieve_upper(form: FormSpec, config: ScanConfig, modulus_budget: int = MODULUS_BUDGET) -> ScanReport:
    """Count n in [1, N] lying in the value set modulo every sieve prime."""
    Q = config.modulus
    if Q > modulus_budget:
        raise ResourceError(f"sieve modulus {Q} exceeds the budget {modulus_budget}")
    masks = _masks(form, config.sieve_primes)
    N = config.N
    # full periods of Q contribute prod |V_p| each
    per_period = math.prod(int(m.sum()) for _, m in masks)
    count = (N // Q) * per_period
    start = (N // Q) * Q + 1
    for lo in range(start, N + 1, _CHUNK):
        n = np.arange(lo, min(lo + _CHUNK, N + 1), dtype=np.int64)
        ok = np.ones(len(n), dtype=bool)
        for p, mask in masks:
            ok &= mask[n % p]
        count += int(ok.sum())
    return ScanReport(N=N, sieve_admissible_count=count, sieve_modulus=Q)


def density_report(
    form: FormSpec,
    config: ScanConfig,
    work_budget: int = WORK_BUDGET,
    modulus_budget: int = MODULUS_BUDGET,
    threads: int = 1,
) -> ScanReport:
    lower = boxed_scan(form, config, work_budget=work_budget, threads=threads)
    upper = sieve_upper(form, config, modulus_budget=modulus_budget)
    masks = _masks(form, config.sieve_primes)
    consistent = all(is_admissible(n, masks) for n in lower.represented)
    return ScanReport(
        N=config.N,
        represented=lower.represented,
        witnesses=lower.witnesses,
        sieve_admissible_count=upper.sieve_admissible_count,
        sieve_modulus=upper.sieve_modulus,
        consistent=consistent,
    )
