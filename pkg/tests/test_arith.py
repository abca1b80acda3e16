import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistmoments.arith import (
    TwistFamilySpec,
    enumerate_family,
    family_array,
    family_count,
    is_fundamental,
    kronecker,
    membership,
    primes_up_to,
    residue_classes_from_bad_ap,
    squarefree,
    squarefree_sieve,
)
from twistmoments.errors import DataError


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if any((x * x) % p == a for x in range(1, p)) else -1


def spec_11ai(bound):
    return TwistFamilySpec(
        "imaginary", 11, {11: 1}, 11, frozenset({1, 3, 4, 5, 9}), bound
    )


class TestKronecker:
    def test_examples(self):
        assert kronecker(-3, 11) == -1
        assert kronecker(-4, 11) == -1
        assert kronecker(5, 1) == 1

    def test_n_zero_convention(self):
        assert kronecker(1, 0) == 1
        assert kronecker(-1, 0) == 1
        assert kronecker(5, 0) == 0
        assert kronecker(-12, 0) == 0

    def test_matches_legendre(self):
        for p in [3, 5, 7, 11, 13, 17, 19, 23, 29]:
            for d in range(-40, 41):
                if d % p:
                    assert kronecker(d, p) == legendre(d, p), (d, p)

    def test_multiplicative_in_n(self):
        # spot the spec's range on a deterministic lattice of pairs
        ds = [d for d in range(-500, 501) if is_fundamental(d)]
        pairs = [(m, n) for m in (2, 3, 5, 8, 15, 977, 1000) for n in (3, 4, 7, 9, 999)]
        for d in ds[:: max(1, len(ds) // 60)]:
            for m, n in pairs:
                assert kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n)

    @given(
        d=st.integers(min_value=-300, max_value=300),
        m=st.integers(min_value=-1000, max_value=1000),
        n=st.integers(min_value=-1000, max_value=1000),
    )
    @settings(max_examples=300, deadline=None)
    def test_multiplicative_property(self, d, m, n):
        assert kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n)

    def test_periodicity(self):
        # period |d| for d = 1 mod 4, else 4|d|
        for d in (-3, -4, 5, -8, 13, 12):
            period = abs(d) if d % 4 == 1 else 4 * abs(d)
            for n in range(1, 3 * period):
                assert kronecker(d, n) == kronecker(d, n + period)


class TestFundamental:
    def test_examples(self):
        assert is_fundamental(-3)
        assert is_fundamental(-4)
        assert is_fundamental(-8)
        assert not is_fundamental(-5)
        assert is_fundamental(12)
        assert not is_fundamental(0)
        assert is_fundamental(1)

    def test_sieve_matches_scalar(self):
        sf = squarefree_sieve(500)
        for n in range(501):
            assert sf[n] == squarefree(n)

    @given(st.integers(min_value=-2000, max_value=2000))
    @settings(max_examples=200, deadline=None)
    def test_fundamental_congruences(self, d):
        if is_fundamental(d):
            assert d % 4 in (0, 1)
            if d % 4 == 0:
                assert (d // 4) % 4 in (2, 3)


class TestPrimes:
    def test_examples(self):
        assert primes_up_to(10).tolist() == [2, 3, 5, 7]
        assert squarefree(11)
        assert not squarefree(12)

    def test_count(self):
        assert len(primes_up_to(10_000)) == 1229


class TestFamily:
    def test_brute_force_x50(self):
        spec = spec_11ai(50)
        got = family_array(spec).tolist()
        brute = sorted(
            (
                d
                for d in range(-50, 0)
                if is_fundamental(d) and d % 11 != 0 and membership(spec, d)
            ),
            key=abs,
        )
        assert got == brute == [-3, -4, -15, -20, -23, -31, -47]

    def test_x2_empty(self):
        assert family_count(spec_11ai(2)) == 0

    def test_membership_examples(self):
        spec = spec_11ai(100)
        assert membership(spec, -3)
        assert 3 % 11 in spec.residue_classes
        assert membership(spec, -4)
        assert not membership(spec, -7)
        with pytest.raises(DataError):
            membership(spec, -11)

    def test_stream_matches_array(self):
        spec = spec_11ai(1000)
        assert list(enumerate_family(spec)) == family_array(spec).tolist()

    def test_residue_class_guard(self):
        with pytest.raises(DataError):
            TwistFamilySpec("imaginary", 11, {11: 1}, 11, frozenset({2, 6}), 100)

    def test_modulus_guard(self):
        with pytest.raises(DataError):
            TwistFamilySpec("imaginary", 11, {11: 1}, 44, frozenset({1, 3, 4, 5, 9}), 100)

    def test_counting_sanity(self):
        spec1 = spec_11ai(100_000)
        spec2 = spec_11ai(200_000)
        n1, n2 = family_count(spec1), family_count(spec2)
        assert n2 > n1
        assert abs(n1 / 1e5 - n2 / 2e5) < 5e-4  # density stable to 3 digits

    def test_even_conductor_classes(self):
        cls = residue_classes_from_bad_ap("imaginary", 14, {2: -1, 7: 1})
        assert cls == frozenset({15, 23, 39})

    def test_real_family(self):
        spec = TwistFamilySpec("real", 11, {11: 1}, 11, frozenset({1, 3, 4, 5, 9}), 50)
        assert family_array(spec).tolist() == [5, 12, 37]
        assert not membership(spec, 1)  # d > 1 required


class TestFamilyEquivalence:
    """Character predicate and residue-class predicate agree on all curves."""

    def test_all_fixture_curves_x10k(self, all_curves):
        for rec in all_curves:
            spec = rec.family_spec(10_000)
            fam = set(family_array(spec).tolist())
            sgn = -1 if spec.sign == "imaginary" else 1
            for n in range(3, 10_001):
                d = sgn * n
                if math.gcd(n, spec.conductor) != 1 or not is_fundamental(d):
                    continue
                assert membership(spec, d) == (d in fam), (rec.name, d)
