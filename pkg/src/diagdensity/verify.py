"""
Desk-scale property suite behind ``diagdensity verify``.

Each check returns a ``CheckResult``; the detail strings contain only
counts and rounded values, so a run is byte-reproducible for a given seed
whatever the thread count.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List

import numpy as np

from diagdensity.arith import euler_phi, gcd, lambda_table, primes_in_ap, primes_up_to
from diagdensity.avg import (
    PsiTable,
    double_sum_terms,
    error_integral_term,
    landau_constants,
    landau_sum,
    psi,
    s1_partial_summation_bound,
    theorem1_double_sum,
    y_condition_holds,
)
from diagdensity.bounds import GlobalBoundConfig, bound_alpha, bound_exact
from diagdensity.local import FormSpec, alpha_fraction, local_density, power_residues, value_set
from diagdensity.scan import ScanConfig, boxed_scan, density_report, sieve_upper


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_coefficients(rng: random.Random, s: int, bound: int = 50) -> tuple:
    while True:
        coeffs = tuple(rng.randint(-bound, bound) for _ in range(s))
        if any(coeffs):
            return coeffs


def _pmap(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def check_chebyshev_identity(limit: int = 10**4) -> CheckResult:
    lam = lambda_table(limit).values
    acc = np.zeros(limit + 1)
    for d in range(2, limit + 1):
        if lam[d]:
            acc[d::d] += lam[d]
    n = np.arange(1, limit + 1)
    worst = float(np.max(np.abs(acc[1:] - np.log(n))))
    return CheckResult("chebyshev_identity", worst < 1e-9, f"n<={limit} max_err={worst:.1e}")


def check_phi_multiplicative(rng: random.Random, trials: int = 300) -> CheckResult:
    bad = 0
    done = 0
    while done < trials:
        a, b = rng.randint(1, 100), rng.randint(1, 100)
        if gcd(a, b) != 1:
            continue
        done += 1
        bad += euler_phi(a * b) != euler_phi(a) * euler_phi(b)
    return CheckResult("phi_multiplicative", bad == 0, f"pairs={trials} violations={bad}")


def check_primes_in_ap(rng: random.Random) -> CheckResult:
    bad = 0
    for _ in range(50):
        m = rng.randint(1, 60)
        lo = rng.uniform(0, 500)
        hi = lo + rng.uniform(1, 500)
        got = primes_in_ap(m, lo, hi)
        ps = set(int(p) for p in primes_up_to(math.ceil(hi)))
        bad += any(p not in ps or p % m != 1 % m or not lo < p < hi for p in got)
    return CheckResult("primes_in_ap_subset", bad == 0, f"cases=50 violations={bad}")


def check_power_residue_sizes(pmax: int = 300, kmax: int = 60) -> CheckResult:
    bad = 0
    cases = 0
    for p in primes_up_to(pmax):
        p = int(p)
        for k in range(1, kmax + 1):
            cases += 1
            bad += len(power_residues(p, k)) != (p - 1) // gcd(k, p - 1) + 1
    return CheckResult("power_residue_sizes", bad == 0, f"cases={cases} violations={bad}")


def dominance_vectors(rng: random.Random, count: int = 20) -> List[tuple]:
    out = []
    for i in range(count):
        s = 3 if i % 2 == 0 else 4
        coeffs = list(random_coefficients(rng, s))
        if i % 5 == 4:
            coeffs[0] = 0  # divisible by every p
        if not any(coeffs):
            coeffs[-1] = 1
        out.append(tuple(coeffs))
    return out


def lemma2_violations(p: int, vectors: List[tuple], kmax: int) -> int:
    bad = 0
    for coeffs in vectors:
        for k in range(1, kmax + 1):
            rec = local_density(FormSpec(coeffs, k), p)
            bad += rec.density > min(alpha_fraction(k, p, len(coeffs)), 1)
            bad += float(rec.density) > rec.alpha_capped + 1e-12
    return bad


def check_lemma2(rng: random.Random, threads: int, pmax: int = 1000, kmax: int = 100, nvec: int = 20) -> CheckResult:
    vectors = dominance_vectors(rng, nvec)
    ps = [int(p) for p in primes_up_to(pmax)]
    bad = sum(_pmap(lambda p: lemma2_violations(p, vectors, kmax), ps, threads))
    cases = len(ps) * kmax * len(vectors)
    return CheckResult("lemma2_dominance", bad == 0, f"cases={cases} violations={bad}")


def brute_value_set(coeffs, k, n) -> set:
    # plain enumeration over (Z/n)^s
    vals = {0}
    powers = {pow(x, k, n) for x in range(n)}
    for a in coeffs:
        vals = {(v + a * t) % n for v in vals for t in powers}
    return vals


def check_sumset_oracle(rng: random.Random, pmax: int = 31, kmax: int = 12) -> CheckResult:
    bad = cases = 0
    for p in primes_up_to(pmax):
        p = int(p)
        for s in (2, 3):
            vecs = [random_coefficients(rng, s, 10) for _ in range(2)]
            for coeffs in vecs:
                for k in range(1, kmax + 1):
                    cases += 1
                    bad += set(value_set(FormSpec(coeffs, k), p)) != brute_value_set(coeffs, k, p)
    return CheckResult("sumset_oracle", bad == 0, f"cases={cases} violations={bad}")


def check_crt(rng: random.Random, pmax: int = 20, kmax: int = 6) -> CheckResult:
    ps = [int(p) for p in primes_up_to(pmax)]
    bad = cases = 0
    for i, p in enumerate(ps):
        for q in ps[i + 1 :]:
            for s in (2, 3):
                coeffs = random_coefficients(rng, s, 10)
                for k in range(1, kmax + 1):
                    cases += 1
                    f = FormSpec(coeffs, k)
                    whole = len(brute_value_set(coeffs, k, p * q))
                    bad += whole != len(value_set(f, p)) * len(value_set(f, q))
    return CheckResult("crt_multiplicativity", bad == 0, f"cases={cases} violations={bad}")


def check_p_minus_one(rng: random.Random, pmax: int = 500) -> CheckResult:
    bad = cases = 0
    for p in primes_up_to(pmax):
        p = int(p)
        for s in (3, 4):
            for coeffs in ((1,) * s, random_coefficients(rng, s)):
                cases += 1
                bad += local_density(FormSpec(coeffs, p - 1), p).density > Fraction(2**s, p)
    return CheckResult("p_minus_one_observation", bad == 0, f"cases={cases} violations={bad}")


def check_exact_vs_alpha(rng: random.Random) -> CheckResult:
    bad = cases = 0
    cfg = GlobalBoundConfig(R=1, prime_limit=2000)
    for k in range(2, 60):
        coeffs = random_coefficients(rng, 3, 20)
        a = dict(bound_alpha(k, 3, cfg).contributing)
        e = dict(bound_exact(FormSpec(coeffs, k), GlobalBoundConfig(prime_limit=2000, mode="exact")).contributing)
        for p, t in a.items():
            cases += 1
            bad += e.get(p, 0.0) < t - 1e-12
    return CheckResult("exact_dominates_alpha", bad == 0, f"shared_primes={cases} violations={bad}")


def check_psi_partition(rng: random.Random, table: PsiTable) -> CheckResult:
    worst = 0.0
    for _ in range(40):
        q = rng.randint(1, 50)
        X = rng.uniform(2, 10**4)
        total = math.fsum(psi(table, X, q, a) for a in range(q))
        worst = max(worst, abs(total - psi(table, X, 1, 0)))
    return CheckResult("psi_partition", worst < 1e-8, f"cases=40 max_err={worst:.1e}")


def riemann_error_term(table: PsiTable, X: float, m: int, s: int, steps: int = 20000) -> float:
    """Midpoint rule on each unit cell where psi is constant."""
    lo, hi = (m + 1) ** s, m * X
    if lo >= hi:
        return 0.0
    cuts = [lo] + [n for n in range(math.floor(lo) + 1, math.ceil(hi)) if n % m == 1 % m] + [hi]
    total = []
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        level = psi(table, (a + b) / 2, m, 1)
        if not level:
            continue
        t = np.linspace(a, b, steps + 1)
        mid = (t[1:] + t[:-1]) / 2
        total.append(level * float(np.sum(1 / (mid * np.log(mid) ** 2))) * (b - a) / steps)
    return math.fsum(total)


def check_error_integral(rng: random.Random, table: PsiTable, cases: int = 20) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        X = rng.uniform(20, 1000)
        s = rng.choice((2, 3))
        m = rng.randint(1, max(1, int(X**0.5) - 1))
        worst = max(worst, abs(error_integral_term(table, X, m, s) - riemann_error_term(table, X, m, s)))
    return CheckResult("error_integral_quadrature", worst < 1e-6, f"cases={cases} max_err={worst:.1e}")


def lambda_weighted_sum(table: PsiTable, X: float, s: int, Y: float) -> float:
    """sum over m < Y and n = 1 (mod m) in ((m+1)^s, mX) of Lambda(n)(1 - s log(m+1)/log n)."""
    parts = []
    for m in range(1, math.ceil(Y)):
        lo, hi = (m + 1) ** s, m * X
        n = np.arange(1, math.ceil(hi), m)
        n = n[(n > lo) & (table.lam[n] > 0)]
        if len(n):
            parts.append(math.fsum(table.lam[n] * (1 - s * math.log(m + 1) / np.log(n))))
    return math.fsum(parts)


def check_partial_summation(table: PsiTable) -> CheckResult:
    worst = 0.0
    below = 0
    cases = 0
    for X in (50, 100, 500):
        for Y in range(2, 200):
            if not y_condition_holds(X, 3, Y):
                continue
            cases += 1
            s1 = s1_partial_summation_bound(table, X, 3, Y)
            worst = max(worst, abs(s1 - lambda_weighted_sum(table, X, 3, Y)))
            below += theorem1_double_sum(table, X, 3, Y) <= s1 + 1e-9
    ok = worst < 1e-8 and below == cases
    return CheckResult(
        "partial_summation_identity", ok, f"cases={cases} max_err={worst:.1e} double_sum_le_bound={below}"
    )


def alpha_pair_sum(X: int, s: int, top: int) -> float:
    ps = primes_up_to(top)
    parts = []
    for k in range(1, X):
        m = (ps - 1) // np.gcd(k, ps - 1)
        good = (m + 1).astype(float) ** s < ps
        parts.append(math.fsum(np.log(ps[good]) - s * np.log(m[good] + 1.0)))
    return math.fsum(parts)


def check_double_sum_vs_pairs(table: PsiTable) -> CheckResult:
    bad = cases = 0
    for X in (20, 50, 100):
        for Y in range(2, 11):
            if not y_condition_holds(X, 3, Y):
                continue
            cases += 1
            lhs = theorem1_double_sum(table, X, 3, Y)
            bad += lhs > alpha_pair_sum(X, 3, X * Y) + 1e-9
            bad += any(t <= 0 for _, _, t in double_sum_terms(table, X, 3, Y))
    return CheckResult("double_sum_vs_pair_scan", bad == 0, f"cases={cases} violations={bad}")


def check_landau(table_constants=None) -> CheckResult:
    c = table_constants or landau_constants()
    a, b = landau_sum(10**4, c), landau_sum(10**5, c)
    drift = abs((b.partial_sum - c.C_L * math.log(1e5)) - (a.partial_sum - c.C_L * math.log(1e4)))
    envelope = 1.94 < c.C_L < 1.95 and 1.34 < c.c3 < 1.36
    return CheckResult("landau_stability", drift < 0.01 and envelope, f"drift={drift:.2e}")


def scan_configs(rng: random.Random, count: int = 10) -> List[tuple]:
    out = []
    for _ in range(count):
        s = rng.choice((2, 3))
        k = rng.randint(2, 6)
        coeffs = tuple(rng.choice((-3, -2, -1, 1, 2, 3)) for _ in range(s))
        out.append((coeffs, k, rng.randint(20, 300), rng.randint(1, 4)))
    return out


def check_scan(rng: random.Random, threads: int) -> CheckResult:
    bad = 0
    primes = [2, 3, 5, 7, 11, 13]
    for coeffs, k, N, B in scan_configs(rng):
        form = FormSpec(coeffs, k)
        rep = density_report(form, ScanConfig(N, B, tuple(primes[:3])), threads=threads)
        bad += not rep.consistent
        bigger = boxed_scan(form, ScanConfig(N, B + 1), threads=threads)
        bad += not rep.represented <= bigger.represented
        dens = [sieve_upper(form, ScanConfig(N, 0, tuple(primes[:j]))).sieve_upper_density for j in range(len(primes) + 1)]
        bad += any(b > a for a, b in zip(dens, dens[1:]))
    return CheckResult("scan_consistency", bad == 0, f"configs=10 violations={bad}")


def run_checks(seed: int = 0, threads: int = 1) -> List[CheckResult]:
    rng = random.Random(seed)
    table = PsiTable.build(5 * 10**4)
    checks: List[Callable[[], CheckResult]] = [
        check_chebyshev_identity,
        lambda: check_phi_multiplicative(rng),
        lambda: check_primes_in_ap(rng),
        check_power_residue_sizes,
        lambda: check_lemma2(rng, threads, pmax=300, kmax=100, nvec=8),
        lambda: check_sumset_oracle(rng),
        lambda: check_crt(rng),
        lambda: check_p_minus_one(rng),
        lambda: check_exact_vs_alpha(rng),
        lambda: check_psi_partition(rng, table),
        lambda: check_error_integral(rng, table),
        lambda: check_partial_summation(table),
        lambda: check_double_sum_vs_pairs(table),
        check_landau,
        lambda: check_scan(rng, threads),
    ]
    return [c() for c in checks]
