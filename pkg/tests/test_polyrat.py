from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from scalar_linalg import APPROX, QI
from polyrat import (
    NEG_INF,
    Polynomial,
    RationalFunction,
    multiplicity,
    pole_order,
    poly_gcd,
    poly_sqrt,
    rf_eval,
    rf_is_square,
    squarefree_decomposition,
)
from hyperpoly_errors import ExactModeRequired, PoleError, PolynomialQueryError

x = Polynomial.x()


def poly(*coeffs):
    return Polynomial([QI(c) for c in coeffs])


small_polys = st.lists(st.integers(-5, 5), min_size=0, max_size=5).map(lambda cs: poly(*cs))
nonzero_polys = small_polys.filter(lambda p: not p.is_zero())
gaussian_polys = st.lists(
    st.builds(QI, st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=4,
).map(Polynomial).filter(lambda p: not p.is_zero())


class TestPolynomial:
    def test_trailing_zeros_stripped(self):
        p = poly(1, 2, 0, 0)
        assert p.degree == 1
        assert Polynomial().degree == NEG_INF
        assert poly(0, 0).is_zero()

    def test_arithmetic_and_evaluation(self):
        p = (x - 1) * (x + 2)
        assert p == poly(-2, 1, 1)
        assert p(QI(1)) == 0
        assert p(QI(3)) == 10
        assert p.derivative() == poly(1, 2)

    def test_division(self):
        q, r = divmod(poly(-2, 1, 1), poly(-1, 1))
        assert q == poly(2, 1)
        assert r.is_zero()
        with pytest.raises(ZeroDivisionError):
            divmod(poly(1), Polynomial())

    def test_leading_of_zero_raises(self):
        with pytest.raises(PolynomialQueryError):
            Polynomial().leading()

    def test_mixed_modes_fall_back_to_approx(self):
        p = poly(1, 1) * 0.5j
        assert p.mode == APPROX
        assert (poly(1) + Polynomial([1j])).mode == APPROX

    def test_from_roots(self):
        p = Polynomial.from_roots([QI(0), QI(1), QI(2)])
        assert p == poly(0, 2, -3, 1)

    @given(small_polys, nonzero_polys)
    def test_division_identity(self, a, b):
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.degree < b.degree


class TestGcd:
    def test_gcd_of_coprime(self):
        assert poly_gcd(x - 1, x - 2) == poly(1)

    def test_gcd_shared_factor(self):
        a = (x - 1) * (x - 2)
        b = (x - 1) * (x + 5)
        assert poly_gcd(a, b) == x - 1

    def test_gcd_with_zero(self):
        assert poly_gcd(Polynomial(), poly(2, 2)) == poly(1, 1)

    def test_gcd_undefined_for_two_zeros(self):
        with pytest.raises(PolynomialQueryError, match="gcd undefined"):
            poly_gcd(Polynomial(), Polynomial())

    def test_gcd_requires_exact(self):
        with pytest.raises(ExactModeRequired):
            poly_gcd(Polynomial([1j, 1]), Polynomial([1 + 0j]))

    @given(nonzero_polys, nonzero_polys, nonzero_polys)
    def test_gcd_divides_both(self, a, b, c):
        g = poly_gcd(a * c, b * c)
        assert ((a * c) % g).is_zero()
        assert ((b * c) % g).is_zero()
        assert ((g % c.monic()).is_zero())


class TestSquares:
    def test_squarefree_decomposition(self):
        f = (x - 1) * (x - 2) ** 2 * (x + 3) ** 3
        factors = squarefree_decomposition(f)
        assert factors == [x - 1, x - 2, x + 3]

    def test_poly_sqrt(self):
        r = (x - 1) * (x + QI(0, 1)) * 3
        assert poly_sqrt(r * r) * poly_sqrt(r * r) == r * r
        assert poly_sqrt(x * (x - 1)) is None
        assert poly_sqrt(poly(2)) is None
        assert poly_sqrt(poly(-4)) == Polynomial([QI(0, 2)])

    def test_rf_is_square(self):
        f = RationalFunction((x - 1) ** 2, (x + 1) ** 4)
        ok, r = rf_is_square(f)
        assert ok
        assert r * r == f

    @settings(max_examples=200)
    @given(gaussian_polys, gaussian_polys)
    def test_rf_is_square_finds_every_square(self, p, q):
        g = RationalFunction(p, q)
        ok, r = rf_is_square(g * g)
        assert ok
        assert r == g or r == -g

    def test_rf_is_square_rejects_odd_poles(self):
        f = RationalFunction(poly(-14), Polynomial.from_roots([QI(k) for k in range(4)]))
        assert rf_is_square(f) == (False, None)

    def test_rf_is_square_of_zero(self):
        ok, r = rf_is_square(RationalFunction(Polynomial()))
        assert ok and r.is_zero()

    def test_rf_is_square_requires_exact(self):
        with pytest.raises(ExactModeRequired, match="square detection requires exact scalars"):
            rf_is_square(RationalFunction(Polynomial([1 + 0j, 1 + 0j])))


class TestRationalFunction:
    def test_reduced_on_construction(self):
        f = RationalFunction((x - 1) * (x + 2), (x - 1) * 2)
        assert f.numerator == (x + 2) * Fraction(1, 2)
        assert f.denominator == poly(1)

    def test_zero_numerator_has_denominator_one(self):
        f = RationalFunction(Polynomial(), x - 3)
        assert f.is_zero()
        assert f.denominator == poly(1)

    def test_field_operations(self):
        f = RationalFunction(poly(1), x)
        g = RationalFunction(poly(1), x - 1)
        assert f + g == RationalFunction(x * 2 - 1, x * (x - 1))
        assert (f * g) / g == f
        assert f - f == RationalFunction(Polynomial())

    def test_evaluation_and_pole(self):
        f = RationalFunction(poly(1), x - 2)
        assert rf_eval(f, QI(3)) == 1
        with pytest.raises(PoleError, match="evaluation at pole"):
            rf_eval(f, QI(2))

    def test_pole_order(self):
        f = RationalFunction((x - 1) ** 2, x ** 3)
        assert pole_order(f, 0) == 3
        assert pole_order(f, 1) == -2
        assert pole_order(f, 5) == 0
        with pytest.raises(PolynomialQueryError, match="order of zero function"):
            pole_order(RationalFunction(Polynomial()), 0)

    @given(nonzero_polys, nonzero_polys, nonzero_polys, nonzero_polys, st.integers(-2, 2),
           st.integers(0, 3), st.integers(0, 3))
    def test_pole_order_adds_under_products(self, a, b, c, d, x0, i, j):
        bump = (x - x0) ** i
        f = RationalFunction(a * bump, b)
        g = RationalFunction(c, d * (x - x0) ** j)
        assert pole_order(f * g, x0) == pole_order(f, x0) + pole_order(g, x0)

    def test_multiplicity(self):
        assert multiplicity((x - 2) ** 3 * (x + 1), QI(2)) == 3
