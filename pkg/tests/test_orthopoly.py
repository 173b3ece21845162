import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavesbvp import orthopoly as op
from wavesbvp.errors import DomainError, ResolutionError, UnsupportedWeightError
from wavesbvp.orthopoly import Family, Polynomial

GEG15 = Family("gegenbauer", 1.5)
ALL = [op.CHEBYSHEV, op.HERMITE, op.LAGUERRE, op.LEGENDRE, Family("gegenbauer", 1.0), GEG15]
SYMMETRIC = [op.CHEBYSHEV, op.HERMITE, op.LEGENDRE, Family("gegenbauer", 1.0), GEG15]


def closed_form(fam, m, x):
    """Independent references (explicit sums, not recurrences)."""
    if fam.tag == "chebyshev":
        return math.cos(m * math.acos(x))
    if fam.tag == "legendre":
        # Rodrigues-derived explicit sum
        return sum(
            (-1) ** k * math.comb(m, k) * math.comb(2 * m - 2 * k, m) * x ** (m - 2 * k)
            for k in range(m // 2 + 1)
        ) / 2**m
    if fam.tag == "hermite":
        return math.factorial(m) * sum(
            (-1) ** k * (2 * x) ** (m - 2 * k) / (math.factorial(k) * math.factorial(m - 2 * k))
            for k in range(m // 2 + 1)
        )
    if fam.tag == "laguerre":
        return sum((-1) ** k * math.comb(m, k) * x**k / math.factorial(k) for k in range(m + 1))
    a = fam.alpha
    return sum(
        (-1) ** k * math.gamma(m - k + a) / (math.gamma(a) * math.factorial(k) * math.factorial(m - 2 * k))
        * (2 * x) ** (m - 2 * k)
        for k in range(m // 2 + 1)
    )


class TestPolyValue:
    def test_spec_examples(self):
        assert op.poly_value(op.LEGENDRE, 2, 1.0) == pytest.approx(1.0, abs=1e-15)
        assert op.poly_value(op.LAGUERRE, 1, 1.0) == pytest.approx(0.0, abs=1e-15)
        assert op.poly_value(op.CHEBYSHEV, 3, 0.5) == pytest.approx(-1.0, abs=1e-15)
        assert op.poly_value(op.HERMITE, 2, 0.0) == pytest.approx(-2.0, abs=1e-15)

    @pytest.mark.parametrize("fam", ALL, ids=str)
    @pytest.mark.parametrize("m", [0, 1, 2, 5, 9])
    def test_against_explicit_sums(self, fam, m):
        for x in np.linspace(-1, 1, 11):
            ref = closed_form(fam, m, x)
            assert op.poly_value(fam, m, x) == pytest.approx(ref, rel=1e-11, abs=1e-11)

    def test_order_cap(self):
        op.poly_value(op.LEGENDRE, 64, 0.3)
        with pytest.raises(ResolutionError):
            op.poly_value(op.LEGENDRE, 65, 0.3)

    @pytest.mark.parametrize("alpha", [0.0, -0.5, -1.0])
    def test_bad_gegenbauer_alpha(self, alpha):
        with pytest.raises(DomainError):
            Family("gegenbauer", alpha)

    def test_unknown_family(self):
        with pytest.raises(DomainError):
            op.family("jacobi")

    def test_values_all_orders(self):
        x = np.linspace(-1, 1, 7)
        V = op.values(op.LEGENDRE, 6, x)
        assert V.shape == (7, 7)
        for m in range(7):
            np.testing.assert_allclose(V[m], [op.poly_value(op.LEGENDRE, m, xi) for xi in x])

    def test_values_keep_long_double(self):
        x = np.linspace(-1, 1, 5, dtype=np.longdouble)
        assert op.values(op.CHEBYSHEV, 4, x).dtype == np.longdouble


class TestPolyCoeffs:
    def test_spec_examples(self):
        np.testing.assert_allclose(op.poly_coeffs(Family("gegenbauer", 1.0), 1).coeffs, [0, 2])
        np.testing.assert_allclose(op.poly_coeffs(op.LEGENDRE, 0).coeffs, [1])
        np.testing.assert_allclose(op.poly_coeffs(op.CHEBYSHEV, 2).coeffs, [-1, 0, 2])

    @pytest.mark.parametrize("fam", ALL, ids=str)
    def test_recurrence_agreement(self, fam):
        rng = np.random.default_rng(7)
        x = rng.uniform(-1, 1, 50)
        for m in range(13):
            pv = op.values(fam, m, x)[m]
            cv = op.poly_coeffs(fam, m)(x)
            assert np.all(np.abs(pv - cv) <= 1e-10 * np.maximum(1, np.abs(pv)))

    @pytest.mark.parametrize("fam", SYMMETRIC, ids=str)
    def test_parity(self, fam):
        x = np.linspace(0.05, 1, 20)
        for m in range(9):
            p = op.poly_coeffs(fam, m)
            np.testing.assert_allclose(p(-x), (-1) ** m * p(x), atol=1e-12, rtol=1e-12)

    def test_endpoint_identities(self):
        for m in range(13):
            assert abs(op.poly_value(op.CHEBYSHEV, m, 1.0) - 1) <= 1e-12
            assert abs(op.poly_value(op.LEGENDRE, m, 1.0) - 1) <= 1e-12


class TestPolynomial:
    def test_zero(self):
        assert Polynomial([]).degree == -1 or Polynomial([]).degree == 0
        assert Polynomial([0, 0, 0])(3.7) == 0
        assert Polynomial([])(np.array([1.0, 2.0])).tolist() == [0, 0]

    def test_trims_trailing_zeros(self):
        assert Polynomial([1, 2, 0, 0]).degree == 1

    @given(
        st.lists(st.floats(-10, 10), min_size=1, max_size=12),
        st.floats(-2, 2),
    )
    def test_horner_matches_term_sum(self, coeffs, x):
        p = Polynomial(coeffs)
        scale = sum(abs(c) * abs(x) ** i for i, c in enumerate(coeffs))
        assert abs(p(x) - p.sum_terms(x)) <= 1e-13 * max(scale, 1e-300) + 1e-300

    def test_arithmetic(self):
        p, q = Polynomial([1, 1]), Polynomial([-1, 1])
        assert (p * q).coeffs.tolist() == [-1, 0, 1]
        assert (p + q).coeffs.tolist() == [0, 2]
        assert (p - q).coeffs.tolist() == [2]
        assert Polynomial([3, 2, 1]).deriv().coeffs.tolist() == [2, 2]

    def test_compose_affine(self):
        p = Polynomial([0, 0, 1])  # x^2
        q = p.compose_affine(2.0, -1.0)  # (2t-1)^2
        np.testing.assert_allclose(q.coeffs, [1, -4, 4])


class TestWeights:
    def test_spec_examples(self):
        assert op.weight_moment(op.LEGENDRE, 0) == pytest.approx(2.0)
        assert op.weight_moment(op.CHEBYSHEV, 0) == pytest.approx(math.pi)
        assert op.weight_moment(op.CHEBYSHEV, 2) == pytest.approx(math.pi / 2)

    def test_legendre_moments(self):
        for k in range(0, 11, 2):
            assert abs(op.weight_moment(op.LEGENDRE, k) - 2 / (k + 1)) <= 1e-13

    @pytest.mark.parametrize("fam", [op.CHEBYSHEV, op.LEGENDRE, GEG15], ids=str)
    def test_odd_moments_vanish(self, fam):
        for k in (1, 3, 7):
            assert op.weight_moment(fam, k) == 0.0

    def test_gegenbauer_moment_by_quadrature(self):
        # substitute x = cos(theta): the weight becomes sin(theta)^(2 alpha)
        th = np.linspace(0, math.pi, 20001)
        for k in (0, 2, 4):
            g = np.cos(th) ** k * np.sin(th) ** 3.0
            ref = np.sum((g[1:] + g[:-1]) / 2) * (th[1] - th[0])
            assert op.weight_moment(GEG15, k) == pytest.approx(ref, rel=1e-7)

    @pytest.mark.parametrize("fam", [op.HERMITE, op.LAGUERRE], ids=str)
    def test_unbounded_weights_rejected(self, fam):
        with pytest.raises(UnsupportedWeightError):
            op.weight_moment(fam, 0)

    @pytest.mark.parametrize("fam", [op.LEGENDRE, op.CHEBYSHEV, GEG15], ids=str)
    def test_moment_orthogonality(self, fam):
        def inner(p, q):
            r = p * q
            return sum(c * op.weight_moment(fam, i) for i, c in enumerate(r.coeffs))

        for m in range(9):
            pm = op.poly_coeffs(fam, m)
            for n in range(m):
                assert abs(inner(pm, op.poly_coeffs(fam, n))) <= 1e-9
            # normalised: v_m^2 <p_m, p_m> = 1
            assert op.norm_constant(fam, m) ** 2 * inner(pm, pm) == pytest.approx(1.0, rel=1e-10)


class TestNormConstant:
    def test_spec_examples(self):
        assert op.norm_constant(op.LEGENDRE, 0) == pytest.approx(0.7071067812, abs=1e-10)
        assert op.norm_constant(op.LAGUERRE, 5) == 1.0
        assert op.norm_constant(op.CHEBYSHEV, 0) == pytest.approx(0.5641895835, abs=1e-10)

    def test_hermite(self):
        for m in range(6):
            ref = 1 / math.sqrt(math.factorial(m) * 2**m * math.sqrt(math.pi))
            assert op.norm_constant(op.HERMITE, m) == pytest.approx(ref)

    @settings(max_examples=30)
    @given(st.floats(0.5, 4.0), st.integers(0, 8))
    def test_gegenbauer_by_quadrature(self, alpha, m):
        fam = Family("gegenbauer", alpha)
        th = np.linspace(0, math.pi, 4001)
        g = op.poly_coeffs(fam, m)(np.cos(th)) ** 2 * np.sin(th) ** (2 * alpha)
        # Simpson on the theta grid; alpha >= 1/2 keeps the endpoint behaviour mild
        h = th[1] - th[0]
        norm2 = h / 3 * (g[0] + g[-1] + 4 * g[1:-1:2].sum() + 2 * g[2:-1:2].sum())
        assert op.norm_constant(fam, m) ** 2 * norm2 == pytest.approx(1.0, rel=1e-6)


def test_family_labels():
    assert [f.short for f in op.all_families()] == ["Ch", "Ge", "Le", "La", "He"]
    assert op.family("gegenbauer").alpha == op.DEFAULT_GEGENBAUER_ALPHA
