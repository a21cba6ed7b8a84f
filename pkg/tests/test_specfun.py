"""Oracle and property tests for the imaginary-order Bessel machinery.

The oracle is adaptive quadrature of the defining Laplace integral

    K_{i nu}(x) = Int_0^inf exp(-x cosh t) cos(nu t) dt

run through scipy's QUADPACK, entirely independent of the region-split
evaluator under test.
"""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special

from unruhkit import specfun


def k_oracle(nu: float, x: float, tol: float = 1e-13) -> float:
    """Independent quadrature of the Laplace integral in t-space."""
    tmax = math.acosh(745.0 / x) if x < 745.0 else 1.0
    val, err = scipy.integrate.quad(
        lambda t: math.exp(-x * math.cosh(t)) * math.cos(nu * t),
        0.0,
        tmax,
        epsabs=tol * math.exp(-x),
        epsrel=tol,
        limit=800,
    )
    return val


def i_oracle(nu: float, x: float) -> complex:
    """Power series for I_{i nu}(x) with explicit complex Gamma factors."""
    total = 0.0j
    for k in range(0, 200):
        term = (0.5 * x) ** (2 * k + 1j * nu) / (
            math.factorial(k) * scipy.special.gamma(k + 1.0 + 1j * nu)
        )
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return complex(total)


class TestBesselKImag:
    def test_k0_of_one_against_integral_oracle(self):
        assert specfun.bessel_k_imag(0.0, 1.0) == pytest.approx(k_oracle(0.0, 1.0), rel=1e-12)

    def test_even_in_order(self):
        assert specfun.bessel_k_imag(2.0, 3.0) == specfun.bessel_k_imag(-2.0, 3.0)

    def test_mid_order_against_oracle(self):
        assert specfun.bessel_k_imag(1.5, 0.7) == pytest.approx(k_oracle(1.5, 0.7), rel=1e-12)

    @pytest.mark.parametrize("nu", [0.0, 0.5, 2.0, 5.0, 9.5])
    @pytest.mark.parametrize("x", [0.05, 0.3, 1.0, 4.0, 11.0, 20.0])
    def test_oracle_grid(self, nu, x):
        got = specfun.bessel_k_imag(nu, x)
        ref = k_oracle(nu, x)
        assert got == pytest.approx(ref, rel=1e-10)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            specfun.bessel_k_imag(1.0, 0.0)
        with pytest.raises(ValueError):
            specfun.bessel_k_imag(1.0, -2.0)

    def test_real_valued(self):
        # the complex series path must deliver a clean real number
        vals = specfun.kscaled_grid(3.2, np.array([0.5, 2.0, 8.0]))
        assert vals.dtype == np.float64
        assert np.all(np.isfinite(vals))

    def test_monotone_exponential_decay_band(self):
        for nu in (0.0, 1.0, 2.0):
            x1 = max(5.0, nu * nu)
            for dx in (1.0, 3.0, 10.0):
                x2 = x1 + dx
                k1 = specfun.bessel_k_imag(nu, x1)
                k2 = specfun.bessel_k_imag(nu, x2)
                assert k2 < k1
                assert k2 / k1 < 2.0 * math.exp(-(x2 - x1)) * math.sqrt(x1 / x2)

    def test_underflow_is_signed_zero_not_garbage(self):
        val = specfun.bessel_k_imag(600.0, 1.0)
        assert val == 0.0

    def test_grid_matches_scalar(self):
        xs = np.geomspace(0.01, 60.0, 40)
        grid = specfun.kscaled_grid(4.2, xs)
        for x, g in zip(xs, grid):
            assert g == pytest.approx(specfun.bessel_k_imag_scaled(4.2, float(x)), rel=1e-12)


class TestBesselIImag:
    def test_zero_order_reduces_to_real_i0(self):
        val = specfun.bessel_i_imag(0.0, 2.0)
        assert val.imag == 0.0
        assert val.real == pytest.approx(float(scipy.special.iv(0, 2.0)), rel=1e-13)

    def test_series_oracle(self):
        got = specfun.bessel_i_imag(1.0, 1.0)
        ref = i_oracle(1.0, 1.0)
        assert got == pytest.approx(ref, rel=1e-12)

    def test_conjugation_symmetry(self):
        plus = specfun.bessel_i_imag(2.3, 0.9)
        minus = specfun.bessel_i_imag(-2.3, 0.9)
        assert np.conjugate(plus) == pytest.approx(minus, rel=1e-14)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            specfun.bessel_i_imag(1.0, -1.0)

    def test_overflow_flagged_infinite(self):
        val = specfun.bessel_i_imag(0.2, 800.0)
        assert math.isinf(abs(val))


class TestEnvelopeKernel:
    def test_vanishes_at_wedge_center(self):
        # at chi = 1/A the product is |I|^2, manifestly real
        scaled = specfun.envelope_kernel_scaled(4.71, 0.1, 0.1, np.asarray(10.0))
        mag = abs(specfun._i_hat_series(47.1, 1.0)) ** 2
        assert abs(float(scaled)) < 1e-14 * mag

    def test_against_series_oracle_product(self):
        Omega0, A, m, chi = 4.71, 0.1, 0.1, 12.0
        nu = Omega0 / A
        ref = (i_oracle(-nu, m / A) * i_oracle(nu, m * chi)).imag
        got = specfun.envelope_kernel(Omega0, A, m, chi)
        assert got == pytest.approx(ref, rel=1e-10)

    def test_massless_limit_zeros(self):
        Omega0, A = 4.71, 0.1
        for k in (-2, 1, 3):
            chi = (1.0 / A) * math.exp(k * math.pi * A / Omega0)
            val = specfun.envelope_kernel_scaled(Omega0, A, 0.0, np.asarray(chi))
            assert abs(float(val)) < 1e-12

    def test_massless_matches_small_mass(self):
        # m -> 0 continuously approaches the analytic massless form
        Omega0, A, chi = 3.0, 0.5, 3.1
        exact = specfun.envelope_kernel_scaled(Omega0, A, 0.0, np.asarray(chi))
        tiny = specfun.envelope_kernel_scaled(Omega0, A, 1e-6, np.asarray(chi))
        assert float(tiny) == pytest.approx(float(exact), abs=1e-6)

    def test_wedge_domain_error(self):
        with pytest.raises(ValueError):
            specfun.envelope_kernel(3.0, 0.5, 0.1, -1.0)
