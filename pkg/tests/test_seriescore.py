"""Unit tests for seriescore module."""

import unittest
from fractions import Fraction

from src.exceptions import ScalarError
from src.seriescore import (
    RATIONAL,
    ComplexField,
    LaurentXi,
    QSeries,
    ZPoly,
    binomial,
    get_field,
    pochhammer,
    qs_inv,
    qs_mul,
    resolvent,
    unit_pow,
)


def series(*values):
    return QSeries([Fraction(v) for v in values], RATIONAL)


class TestScalarFields(unittest.TestCase):
    """Test cases for the rational and complex scalar fields."""

    def test_rational_coerce_accepts_exact_inputs(self):
        """Test rational coercion of ints, fraction strings and decimal strings."""
        self.assertEqual(RATIONAL.coerce(3), Fraction(3))
        self.assertEqual(RATIONAL.coerce("1/3"), Fraction(1, 3))
        self.assertEqual(RATIONAL.coerce("0.25"), Fraction(1, 4))
        self.assertEqual(RATIONAL.coerce(2.0), Fraction(2))

    def test_rational_coerce_rejects_inexact_inputs(self):
        """Test rational mode refuses non-integral floats and complex strings."""
        with self.assertRaises(ScalarError):
            RATIONAL.coerce(0.1)
        with self.assertRaises(ScalarError):
            RATIONAL.coerce("0.4+1j")
        with self.assertRaises(ScalarError):
            RATIONAL.coerce(True)

    def test_rational_division_by_zero(self):
        """Test exact division by zero raises ScalarError."""
        with self.assertRaises(ScalarError):
            RATIONAL.div(Fraction(1), Fraction(0))

    def test_complex_coerce_strings(self):
        """Test complex coercion of fraction, decimal and complex strings."""
        field = ComplexField()
        self.assertEqual(field.coerce("1/4"), 0.25 + 0j)
        self.assertEqual(field.coerce("0.4+0.1j"), 0.4 + 0.1j)
        self.assertEqual(field.coerce("2i"), 2j)

    def test_complex_tolerances(self):
        """Test complex equality and unit checks use the configured tolerances."""
        field = ComplexField(eps_eq=1e-8, eps_div=1e-6)
        self.assertTrue(field.equal(1.0, 1.0 + 1e-9))
        self.assertFalse(field.equal(1.0, 1.0 + 1e-6))
        self.assertFalse(field.is_unit(1e-7))
        with self.assertRaises(ScalarError):
            field.div(1.0, 1e-7)

    def test_integer_detection(self):
        """Test integer and non-positive integer detection in both fields."""
        self.assertTrue(RATIONAL.is_integer(Fraction(4, 2)))
        self.assertTrue(RATIONAL.is_nonpositive_integer(Fraction(-3)))
        self.assertFalse(RATIONAL.is_nonpositive_integer(Fraction(1)))
        field = ComplexField()
        self.assertTrue(field.is_nonpositive_integer(-2 + 1e-13j))
        self.assertFalse(field.is_integer(0.5))

    def test_serialize(self):
        """Test rationals serialize as p/q strings and complex values as pairs."""
        self.assertEqual(RATIONAL.serialize(Fraction(-3, 4)), "-3/4")
        self.assertEqual(RATIONAL.serialize(Fraction(2)), "2/1")
        self.assertEqual(ComplexField().serialize(1 - 2j), [1.0, -2.0])

    def test_get_field(self):
        """Test field lookup by name."""
        self.assertIs(get_field("rational"), RATIONAL)
        self.assertIsInstance(get_field("complex"), ComplexField)
        with self.assertRaises(ScalarError):
            get_field("quaternion")


class TestCombinatorics(unittest.TestCase):
    """Test cases for binomial and Pochhammer symbols."""

    def test_binomial_generalized(self):
        """Test binom(a, k) for rational a."""
        self.assertEqual(binomial(Fraction(5), 2, RATIONAL), 10)
        self.assertEqual(binomial(Fraction(-1, 2), 2, RATIONAL), Fraction(3, 8))
        self.assertEqual(binomial(Fraction(7), -1, RATIONAL), 0)

    def test_pochhammer_positive(self):
        """Test rising factorials."""
        self.assertEqual(pochhammer(Fraction(3), 3, RATIONAL), 60)
        self.assertEqual(pochhammer(Fraction(1, 2), 2, RATIONAL), Fraction(3, 4))
        self.assertEqual(pochhammer(Fraction(5), 0, RATIONAL), 1)

    def test_pochhammer_negative_index(self):
        """Test (x)_(-n) = 1/((x-1)...(x-n))."""
        self.assertEqual(pochhammer(Fraction(4), -2, RATIONAL), Fraction(1, 6))
        with self.assertRaises(ScalarError):
            pochhammer(Fraction(2), -3, RATIONAL)


class TestZPoly(unittest.TestCase):
    """Test cases for polynomials in z."""

    def test_trailing_zeros_trimmed(self):
        """Test the zero polynomial has degree -1 and trailing zeros are dropped."""
        self.assertEqual(ZPoly([1, 2, 0, 0], RATIONAL).degree, 1)
        self.assertEqual(ZPoly.zero(RATIONAL).degree, -1)
        self.assertFalse(ZPoly([0, 0], RATIONAL))

    def test_arithmetic(self):
        """Test addition, multiplication and evaluation."""
        z = ZPoly.z(RATIONAL)
        p = (z + 1) * (z - 1)
        self.assertEqual(p, ZPoly([-1, 0, 1], RATIONAL))
        self.assertEqual(p(Fraction(3)), 8)
        self.assertEqual((z ** 3)[3], 1)
        self.assertEqual(p[7], 0)
        self.assertEqual((2 * p).leading, 2)


class TestQSeries(unittest.TestCase):
    """Test cases for truncated power series in q."""

    def test_product_truncates(self):
        """Test the Cauchy product keeps orders up to N only."""
        a = series(1, 1, 0)
        self.assertEqual(qs_mul(a, a), series(1, 2, 1))
        self.assertEqual(qs_mul(series(1, 1), series(1, 1)), series(1, 2))

    def test_mismatched_orders(self):
        """Test combining series of different truncation order raises."""
        with self.assertRaises(ScalarError):
            series(1, 1) + series(1, 1, 1)

    def test_inverse(self):
        """Test 1/(1 - q) = 1 + q + q^2 + ..."""
        self.assertEqual(qs_inv(series(1, -1, 0, 0)), series(1, 1, 1, 1))
        self.assertEqual(qs_mul(series(2, 3, 5), qs_inv(series(2, 3, 5))), series(1, 0, 0))

    def test_inverse_needs_unit(self):
        """Test inversion of a series without constant term raises."""
        with self.assertRaises(ScalarError):
            qs_inv(series(0, 1))

    def test_resolvent(self):
        """Test 1/(b - e) against the inverse of (b - e)."""
        e = series(0, 1, 2, 0)
        b = Fraction(3)
        self.assertEqual(resolvent(b, e), qs_inv(series(3, -1, -2, 0)))

    def test_resolvent_rejects_constant_term(self):
        """Test the resolvent needs a perturbation vanishing at q = 0."""
        with self.assertRaises(ScalarError):
            resolvent(Fraction(2), series(1, 1))
        with self.assertRaises(ScalarError):
            resolvent(Fraction(0), series(0, 1))

    def test_resolvent_tolerates_rounding_in_complex_mode(self):
        """Test a constant term below the field tolerance counts as zero."""
        field = ComplexField()
        e = QSeries([1e-15, 0.5, 0.0], field)
        expected = qs_inv(QSeries([2.0, -0.5, 0.0], field))
        self.assertEqual(resolvent(2.0, e), expected)
        with self.assertRaises(ScalarError):
            resolvent(2.0, QSeries([1e-3, 0.5, 0.0], field))

    def test_q_derivative_and_evaluate(self):
        """Test q d/dq and Horner evaluation."""
        s = series(5, 1, 3)
        self.assertEqual(s.q_derivative(), series(0, 1, 6))
        self.assertEqual(s.evaluate(Fraction(1, 2)), Fraction(5) + Fraction(1, 2) + Fraction(3, 4))

    def test_truncate_cannot_extend(self):
        """Test truncation to a higher order raises."""
        self.assertEqual(series(1, 2, 3).truncate(1), series(1, 2))
        with self.assertRaises(ScalarError):
            series(1, 2).truncate(4)

    def test_valuation(self):
        """Test the index of the first nonzero coefficient."""
        self.assertEqual(series(0, 0, 4).valuation, 2)
        self.assertEqual(series(0, 0).valuation, 2)


class TestLaurentXi(unittest.TestCase):
    """Test cases for Laurent expansions in xi."""

    def test_window_clips_products(self):
        """Test exponents outside the window are dropped and counted."""
        one = series(1, 0)
        a = LaurentXi({0: one, 1: one}, 1, RATIONAL)
        product = a.mul(a, (0, 1))
        self.assertEqual(sorted(product.terms), [0, 1])
        self.assertEqual(product[1], series(2, 0))
        self.assertEqual(product.clipped, 1)

    def test_unit_pow_series(self):
        """Test (1 + q)^(1/2) squared gives back 1 + q."""
        root = unit_pow(series(1, 1, 0, 0), Fraction(1, 2))
        self.assertEqual(root, series(1, Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16)))
        self.assertEqual(qs_mul(root, root), series(1, 1, 0, 0))

    def test_unit_pow_laurent(self):
        """Test (1 - q xi)^(-1) expands as a geometric series in q xi."""
        factor = LaurentXi({0: series(1, 0, 0), 1: series(0, -1, 0)}, 2, RATIONAL)
        inverse = unit_pow(factor, Fraction(-1))
        self.assertEqual(inverse[0], series(1, 0, 0))
        self.assertEqual(inverse[1], series(0, 1, 0))
        self.assertEqual(inverse[2], series(0, 0, 1))

    def test_unit_pow_needs_constant_one(self):
        """Test unit_pow rejects a factor whose q = 0 part is not one."""
        with self.assertRaises(ScalarError):
            unit_pow(series(1, 1) + series(1, 0), Fraction(1, 2))


if __name__ == '__main__':
    unittest.main()
