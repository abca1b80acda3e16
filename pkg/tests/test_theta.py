import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_representation_numbers
from twistmoments.errors import DataError
from twistmoments.theta import (
    CoefficientTable,
    HalfIntegralForm,
    TernaryForm,
    cache_load,
    cache_store,
    combine,
    lvalue_from_coefficient,
    representation_numbers,
)

FORM_A = TernaryForm((3, 15, 15, -14, -2, -2))
FORM_B = TernaryForm((4, 11, 12, 0, -4, 0))


class TestTernaryForm:
    def test_positive_definite_required(self):
        with pytest.raises(DataError):
            TernaryForm((1, 1, -1, 0, 0, 0))
        with pytest.raises(DataError):
            TernaryForm((0, 1, 1, 0, 0, 0))

    def test_evaluate(self):
        assert FORM_A(1, 0, 0) == 3
        assert FORM_A(0, 1, 1) == 15 + 15 - 14

    def test_coefficient_size_guard(self):
        with pytest.raises(DataError):
            TernaryForm((1 << 20, 1, 1, 0, 0, 0))


class TestRepresentationNumbers:
    def test_examples(self):
        r = representation_numbers(FORM_A, 10)
        assert r[3] == 2  # (+-1, 0, 0)
        assert r[0] == 1  # origin only
        assert representation_numbers(FORM_B, 10)[3] == 0

    def test_naive_agreement(self):
        for form in (FORM_A, FORM_B, TernaryForm((1, 1, 1, 0, 0, 0)),
                     TernaryForm((2, 3, 5, 1, 1, 1))):
            assert np.array_equal(
                representation_numbers(form, 400), naive_representation_numbers(form, 400)
            )

    def test_parity(self):
        r = representation_numbers(FORM_A, 3000)
        assert np.all(r[1:] % 2 == 0)

    @given(
        b1=st.integers(1, 6), b2=st.integers(1, 6), b3=st.integers(1, 6),
        b4=st.integers(-2, 2), b5=st.integers(-2, 2), b6=st.integers(-2, 2),
    )
    @settings(max_examples=40, deadline=None)
    def test_random_forms_vs_naive(self, b1, b2, b3, b4, b5, b6):
        beta = (b1, b2, b3, b4, b5, b6)
        try:
            form = TernaryForm(beta)
        except DataError:
            return
        assert np.array_equal(
            representation_numbers(form, 120), naive_representation_numbers(form, 120)
        )


class TestCombine:
    def test_11ai_coefficients(self):
        half = HalfIntegralForm((FORM_A, FORM_B), (Fraction(1, 2), Fraction(-1, 2)))
        tab = combine(half, 50, curve="11A_i")
        assert tab.coefficient(3) == 1
        assert tab.coefficient(4) == -1

    def test_gcd_normalised(self, curve_11ai):
        tab = combine(curve_11ai.half_form, 2000, curve="11A_i")
        vals = tab.values[2:]
        g = 0
        for v in vals[vals != 0]:
            g = math.gcd(g, int(abs(v)))
        assert g == 1

    def test_gcd_normalised_every_curve(self, all_curves):
        from twistmoments.theta import _consumable_mask

        for rec in all_curves:
            tab = rec.coefficient_table(2000)
            mask = _consumable_mask(2000, rec.sign, rec.modulus, rec.residue_classes)
            nz = tab.values[mask]
            nz = nz[nz != 0]
            g = 0
            for v in nz.tolist():
                g = math.gcd(g, abs(v))
                if g == 1:
                    break
            assert g == 1, rec.name

    def test_non_integral_rejected(self):
        half = HalfIntegralForm((FORM_A,), (Fraction(1, 3),))
        with pytest.raises(DataError):
            combine(half, 20)

    def test_out_of_range_lookup(self):
        half = HalfIntegralForm((FORM_A, FORM_B), (Fraction(1, 2), Fraction(-1, 2)))
        tab = combine(half, 20, curve="x")
        with pytest.raises(DataError):
            tab.coefficient(21)


class TestLValueFromCoefficient:
    def test_examples(self):
        assert abs(lvalue_from_coefficient(2.91763323388, 1, -3) - 1.684496) < 1e-5
        assert abs(lvalue_from_coefficient(2.91763323388, -1, -4) - 1.458817) < 1e-5

    def test_exact_zero(self):
        assert lvalue_from_coefficient(2.9, 0, -1234) == 0.0


class TestCache:
    def _table(self, bound=300):
        half = HalfIntegralForm((FORM_A, FORM_B), (Fraction(1, 2), Fraction(-1, 2)))
        return combine(half, bound, curve="11A_i")

    def test_round_trip(self, tmp_path):
        tab = self._table()
        path = tmp_path / "t.coeffs"
        cache_store(tab, path)
        back = cache_load("11A_i", 300, path)
        assert np.array_equal(back.values, tab.values)
        assert back.curve == tab.curve and back.bound == tab.bound

    def test_wrong_bound(self, tmp_path):
        tab = self._table()
        path = tmp_path / "t.coeffs"
        cache_store(tab, path)
        with pytest.raises(DataError):
            cache_load("11A_i", 301, path)

    def test_wrong_curve(self, tmp_path):
        tab = self._table()
        path = tmp_path / "t.coeffs"
        cache_store(tab, path)
        with pytest.raises(DataError):
            cache_load("11A_r", 300, path)

    def test_truncated_file(self, tmp_path):
        tab = self._table()
        path = tmp_path / "t.coeffs"
        cache_store(tab, path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-40])
        with pytest.raises(DataError):
            cache_load("11A_i", 300, path)

    def test_corrupted_payload(self, tmp_path):
        tab = self._table()
        path = tmp_path / "t.coeffs"
        cache_store(tab, path)
        blob = bytearray(path.read_bytes())
        blob[100] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(DataError):
            cache_load("11A_i", 300, path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "t.coeffs"
        path.write_bytes(b"NOTMAGIC" + b"\x00" * 100)
        with pytest.raises(DataError):
            cache_load("11A_i", 300, path)
