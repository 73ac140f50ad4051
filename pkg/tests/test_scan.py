import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagdensity.errors import ResourceError
from diagdensity.local import FormSpec, local_density, value_set
from diagdensity.scan import ScanConfig, boxed_scan, density_report, evaluate_form, sieve_upper
from oracles import box_values, residue_sieve_count, sumset_value_set


def test_evaluate_form():
    assert evaluate_form(FormSpec((1, 1, -1), 3), (1, 1, 1)) == 1
    assert evaluate_form(FormSpec((2, -3), 2), (3, 2)) == 6
    assert evaluate_form(FormSpec((1, 1, 1), 6), (0, 0, 0)) == 0
    with pytest.raises(ValueError):
        evaluate_form(FormSpec((1, 1), 2), (1, 2, 3))


def test_evaluate_form_overflow():
    with pytest.raises(OverflowError, match="term 1"):
        evaluate_form(FormSpec((1, 1), 130), (1, 2))
    with pytest.raises(OverflowError, match="partial sum"):
        evaluate_form(FormSpec((2**126, 2**126), 1), (1, 1))


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(-20, 20), min_size=2, max_size=4).filter(any),
    st.integers(1, 7),
    st.data(),
)
def test_evaluate_form_matches_direct(coeffs, k, data):
    x = data.draw(st.lists(st.integers(-50, 50), min_size=len(coeffs), max_size=len(coeffs)))
    assert evaluate_form(FormSpec(coeffs, k), x) == sum(a * xi**k for a, xi in zip(coeffs, x))


def test_scan_config_validation():
    with pytest.raises(ValueError):
        ScanConfig(0, 1)
    with pytest.raises(ValueError):
        ScanConfig(10, -1)
    with pytest.raises(ValueError):
        ScanConfig(10, 1, (7, 7))
    with pytest.raises(ValueError):
        ScanConfig(10, 1, (9,))


def test_boxed_scan_examples():
    assert box_values((1, 1, -1), 3, 2, 5) == {1, 2, 3}
    rep = boxed_scan(FormSpec((1, 1, -1), 3), ScanConfig(5, 2))
    assert rep.represented == {1, 2, 3}
    assert rep.lower_density == Fraction(3, 5)

    rep = boxed_scan(FormSpec((1, 1, -1), 2), ScanConfig(10, 6))
    assert rep.represented == set(range(1, 11)) and rep.lower_density == 1

    rep = boxed_scan(FormSpec((3, -1, 2), 5), ScanConfig(100, 0))
    assert rep.represented == set() and rep.lower_density == 0


def test_witnesses_evaluate_correctly():
    for coeffs, k, B in [((1, 1, -1), 3, 4), ((2, -3), 2, 9), ((1, -1, 1, -1), 3, 3), ((1, 2, 3, 4, -5), 2, 2)]:
        form = FormSpec(coeffs, k)
        rep = boxed_scan(form, ScanConfig(200, B))
        assert rep.represented == box_values(coeffs, k, B, 200)
        for n, x in rep.witnesses.items():
            assert evaluate_form(form, x) == n
            assert all(abs(v) <= B for v in x)


def test_meet_in_middle_matches_enumeration():
    rng = random.Random(4)
    for _ in range(6):
        s = rng.choice((4, 5))
        coeffs = tuple(rng.choice((-3, -1, 1, 2)) for _ in range(s))
        k = rng.randint(2, 4)
        rep = boxed_scan(FormSpec(coeffs, k), ScanConfig(150, 2))
        assert rep.represented == box_values(coeffs, k, 2, 150)


def test_python_fallback_for_huge_values():
    form = FormSpec((1, -1, 1), 41)
    rep = boxed_scan(form, ScanConfig(10, 3))
    assert rep.represented == box_values((1, -1, 1), 41, 3, 10)


def test_threads_do_not_change_witnesses():
    form = FormSpec((1, 2, -3), 3)
    a = boxed_scan(form, ScanConfig(500, 8), threads=1)
    b = boxed_scan(form, ScanConfig(500, 8), threads=8)
    assert a.witnesses == b.witnesses


def test_work_budget():
    with pytest.raises(ResourceError, match="smaller B"):
        boxed_scan(FormSpec((1, 1, 1), 2), ScanConfig(10, 1000))
    with pytest.raises(ResourceError):
        boxed_scan(FormSpec((1, 1, 1), 2), ScanConfig(10, 5), work_budget=100)


def test_sieve_upper_examples():
    form = FormSpec((1, 1, 1), 6)
    assert residue_sieve_count({7: {0, 1, 2, 3}}, 14) == 8
    rep = sieve_upper(form, ScanConfig(14, 0, (7,)))
    assert rep.sieve_admissible_count == 8 and rep.sieve_upper_density == Fraction(4, 7)

    sets = {7: sumset_value_set((1, 1, 1), 6, 7), 13: sumset_value_set((1, 1, 1), 6, 13)}
    assert residue_sieve_count(sets, 91) == 28
    rep = sieve_upper(form, ScanConfig(91, 0, (7, 13)))
    assert rep.sieve_admissible_count == 28 and rep.sieve_upper_density == Fraction(28, 91)

    assert sieve_upper(form, ScanConfig(50, 0)).sieve_upper_density == 1


def test_sieve_upper_unaligned_matches_oracle():
    form = FormSpec((2, -5, 1), 4)
    primes = (5, 13, 17)
    sets = {p: value_set(form, p) for p in primes}
    for N in (1, 100, 1105, 3000):
        assert sieve_upper(form, ScanConfig(N, 0, primes)).sieve_admissible_count == residue_sieve_count(sets, N)


def test_aligned_density_is_product():
    form = FormSpec((1, 3, -2), 6)
    primes = (7, 13, 19)
    Q = math.prod(primes)
    rep = sieve_upper(form, ScanConfig(Q, 0, primes))
    assert rep.aligned
    assert rep.sieve_upper_density == math.prod(local_density(form, p).density for p in primes)


def test_modulus_budget():
    with pytest.raises(ResourceError):
        sieve_upper(FormSpec((1, 1), 2), ScanConfig(10, 0, (1009, 1013, 1019)))


def test_density_report_examples():
    rep = density_report(FormSpec((1, 1, -1), 3), ScanConfig(5, 2))
    assert rep.lower_density == Fraction(3, 5) and rep.sieve_upper_density == 1

    rep = density_report(FormSpec((1, 1, 1), 6), ScanConfig(91, 3, (7, 13)))
    assert rep.sieve_upper_density == Fraction(28, 91)
    assert rep.lower_density <= rep.sieve_upper_density
    assert rep.consistent and rep.aligned

    assert box_values((1, 1, 1), 2, 2, 4) == {1, 2, 3, 4}
    rep = density_report(FormSpec((1, 1, 1), 2), ScanConfig(4, 2))
    assert rep.represented == {1, 2, 3, 4} and rep.lower_density == 1


def seeded_configs(seed, count=10):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        s = rng.choice((2, 3, 4))
        coeffs = tuple(rng.choice((-3, -2, -1, 1, 2, 3)) for _ in range(s))
        out.append((FormSpec(coeffs, rng.randint(2, 6)), rng.randint(20, 400), rng.randint(0, 3)))
    return out


@pytest.mark.parametrize("form, N, B", seeded_configs(2024))
def test_monotone_and_consistent(form, N, B):
    small = boxed_scan(form, ScanConfig(N, B))
    big = boxed_scan(form, ScanConfig(N, B + 1))
    assert small.represented <= big.represented
    primes = [2, 3, 5, 7, 11, 13]
    dens = [sieve_upper(form, ScanConfig(N, 0, tuple(primes[:j]))).sieve_upper_density for j in range(7)]
    assert all(b <= a for a, b in zip(dens, dens[1:]))
    rep = density_report(form, ScanConfig(N, B + 1, tuple(primes[:3])))
    assert rep.consistent
