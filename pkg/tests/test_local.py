import itertools
import math
import random
from fractions import Fraction

import pytest

from diagdensity.arith import primes_up_to
from diagdensity.errors import ResourceError
from diagdensity.local import (
    FormSpec,
    alpha_bound,
    alpha_fraction,
    local_density,
    power_residues,
    value_set,
    value_set_mask,
)
from oracles import enumerate_value_set, kth_powers, sumset_value_set


def test_formspec_validation():
    with pytest.raises(ValueError):
        FormSpec((1,), 3)
    with pytest.raises(ValueError):
        FormSpec((0, 0, 0), 3)
    with pytest.raises(ValueError):
        FormSpec((1, 1), 0)
    f = FormSpec.parse("1, 1,-1", 3)
    assert f.coefficients == (1, 1, -1) and f.s == 3


@pytest.mark.parametrize(
    "p, k, expected",
    [(7, 3, {0, 1, 6}), (7, 1, set(range(7))), (5, 4, {0, 1}), (2, 5, {0, 1})],
)
def test_power_residues(p, k, expected):
    assert kth_powers(p, k) == expected
    assert power_residues(p, k) == expected


def test_power_residues_rejects_composite():
    with pytest.raises(ValueError, match="not prime"):
        power_residues(9, 2)


def test_power_residue_cardinality():
    for p in primes_up_to(400):
        p = int(p)
        for k in range(1, 80):
            assert len(power_residues(p, k)) == (p - 1) // math.gcd(k, p - 1) + 1


@pytest.mark.parametrize(
    "coeffs, k, p, expected",
    [
        ((1, 1, 1), 6, 7, {0, 1, 2, 3}),
        ((1, 1, -1), 2, 7, set(range(7))),
        ((1, 1, 1), 40, 41, {0, 1, 2, 3}),
    ],
)
def test_value_set_examples(coeffs, k, p, expected):
    assert enumerate_value_set(coeffs, k, p) == expected
    assert value_set(FormSpec(coeffs, k), p) == expected


def test_value_set_mask_matches_set():
    f = FormSpec((3, -5, 7), 9)
    mask = value_set_mask(f, 37)
    assert set(int(i) for i in mask.nonzero()[0]) == value_set(f, 37)


def test_value_set_cap():
    with pytest.raises(ResourceError):
        value_set(FormSpec((1, 1), 2), 1000003)


def test_coefficients_divisible_by_p():
    # a_i = 0 mod p contributes only {0}
    assert value_set(FormSpec((7, 1, 14), 6), 7) == {0, 1}
    assert value_set(FormSpec((7, 14, 21), 6), 7) == {0}


@pytest.mark.parametrize(
    "coeffs, k, p, density, alpha",
    [
        ((1, 1, 1), 6, 7, Fraction(4, 7), Fraction(8, 7)),
        ((1, 1, 1), 40, 41, Fraction(4, 41), Fraction(8, 41)),
        ((1, 1, 1), 12, 13, Fraction(4, 13), Fraction(8, 13)),
    ],
)
def test_local_density_examples(coeffs, k, p, density, alpha):
    assert Fraction(len(enumerate_value_set(coeffs, k, p)), p) == density
    rec = local_density(FormSpec(coeffs, k), p)
    assert rec.density == density
    assert alpha_fraction(k, p, 3) == alpha
    assert rec.alpha == pytest.approx(float(alpha), rel=1e-15)
    assert rec.alpha_capped == min(rec.alpha, 1.0)
    assert (p - 1) % rec.coset_index == 0


def test_alpha_bound_examples():
    assert alpha_bound(40, 41, 3) == pytest.approx(8 / 41, rel=1e-15)
    assert alpha_bound(4, 13, 3) == pytest.approx(64 / 13, rel=1e-15)
    for p in (3, 7, 41, 997):
        for s in (2, 3, 5):
            assert alpha_fraction(p - 1, p, s) == Fraction(2**s, p)


def test_alpha_criterion():
    # alpha < 1 iff (p-1)/gcd(k,p-1) + 1 < p^(1/s); checked in exact integers
    for p in primes_up_to(500):
        p = int(p)
        for k in range(1, 60):
            m = (p - 1) // math.gcd(k, p - 1)
            assert (alpha_fraction(k, p, 3) < 1) == ((m + 1) ** 3 < p)


def test_sumset_matches_enumeration():
    rng = random.Random(7)
    for p in primes_up_to(31):
        p = int(p)
        for s in (2, 3):
            coeffs = tuple(rng.randint(-9, 9) or 1 for _ in range(s))
            for k in range(1, 13):
                assert value_set(FormSpec(coeffs, k), p) == enumerate_value_set(coeffs, k, p)


def test_k_equal_one_is_surjective():
    for p in primes_up_to(200):
        p = int(p)
        assert local_density(FormSpec((p, 1, 2 * p), 1), p).density == 1


def test_crt_small():
    f = FormSpec((1, 2, -3), 4)
    for p, q in itertools.combinations([3, 5, 7, 13], 2):
        assert len(sumset_value_set(f.coefficients, 4, p * q)) == len(value_set(f, p)) * len(value_set(f, q))


def test_value_set_order_independent():
    assert value_set(FormSpec((2, 5, -1), 3), 31) == value_set(FormSpec((-1, 2, 5), 3), 31)
