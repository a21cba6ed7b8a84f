"""Quadrature and Fourier-transform contracts."""

import math

import numpy as np
import pytest
import scipy.integrate

from unruhkit import quad, specfun


class TestIntegrate1D:
    def test_polynomial(self):
        res = quad.integrate_1d(lambda x: x * x, 0.0, 1.0, tol=1e-12)
        assert res.value.real == pytest.approx(1.0 / 3.0, rel=1e-12)
        assert res.value.imag == 0.0

    def test_damped_cosine_semi_infinite(self):
        res = quad.integrate_1d(lambda x: math.exp(-x) * math.cos(10 * x), 0.0, math.inf,
                                tol=1e-10)
        assert res.value.real == pytest.approx(1.0 / 101.0, rel=1e-9)
        assert res.meta["transform"] == "explog"

    def test_cosh_integral_matches_romberg_and_specfun(self):
        # independent high-resolution Romberg on the truncated range
        tmax = math.acosh(745.0)
        ts = np.linspace(0.0, tmax, 2**14 + 1)
        fs = np.exp(-np.cosh(ts)) * np.cos(2 * ts)
        romberg = scipy.integrate.romb(fs, dx=ts[1] - ts[0])
        res = quad.integrate_1d(lambda t: math.exp(-math.cosh(t)) * math.cos(2 * t),
                                0.0, math.inf, tol=1e-12)
        assert res.value.real == pytest.approx(romberg, rel=1e-9)
        assert res.value.real == pytest.approx(specfun.bessel_k_imag(2.0, 1.0), rel=1e-10)

    def test_complex_integrand(self):
        res = quad.integrate_1d(lambda x: complex(math.cos(x), math.sin(x)), 0.0, math.pi / 2,
                                tol=1e-12)
        assert res.value == pytest.approx(complex(1.0, 1.0), rel=1e-12)

    def test_linearity(self):
        f = lambda x: math.exp(-x * x)
        g = lambda x: math.sin(3 * x) * math.exp(-x)
        a, b = 2.0, -0.7
        lhs = quad.integrate_1d(lambda x: a * f(x) + b * g(x), 0.0, 5.0, tol=1e-11)
        rf = quad.integrate_1d(f, 0.0, 5.0, tol=1e-11)
        rg = quad.integrate_1d(g, 0.0, 5.0, tol=1e-11)
        combined_err = lhs.err_estimate + abs(a) * rf.err_estimate + abs(b) * rg.err_estimate
        assert abs(lhs.value - (a * rf.value + b * rg.value)) <= max(combined_err, 1e-13)

    def test_budget_failure_carries_partial(self):
        with pytest.raises(quad.QuadratureError) as exc:
            quad.integrate_1d(lambda x: math.cos(200.0 * x), 0.0, 20.0, tol=1e-14,
                              max_evals=200)
        partial = exc.value.partial
        assert partial.evaluations >= 120
        assert partial.meta["converged"] is False

    def test_counts_evaluations(self):
        res = quad.integrate_1d(lambda x: 1.0, 0.0, 1.0, tol=1e-3)
        assert res.evaluations >= 15


class TestIntegrate2D:
    def test_separable_polynomial(self):
        res = quad.integrate_2d(lambda x, y: x * y, ((0, 1), (0, 1)), tol=1e-10)
        assert res.value.real == pytest.approx(0.25, rel=1e-9)

    def test_double_exponential(self):
        res = quad.integrate_2d(lambda x, y: math.exp(-x - y),
                                ((0.0, math.inf), (0.0, math.inf)), tol=1e-8)
        assert res.value.real == pytest.approx(1.0, rel=1e-7)

    def test_adaptive_vs_tensor_grid(self):
        # thermal-style integrand: adaptive and plain tensor Simpson agree
        def f(u, v):
            return math.exp(-2.0 * u) * u * math.exp(-(v - 1.0) ** 2) / (1.0 + u + v)

        res = quad.integrate_2d(f, ((0.0, 12.0), (0.0, 8.0)), tol=1e-8)
        us = np.linspace(0.0, 12.0, 801)
        vs = np.linspace(0.0, 8.0, 801)
        grid = np.array([[f(u, v) for v in vs] for u in us])
        tensor = scipy.integrate.simpson(scipy.integrate.simpson(grid, x=vs), x=us)
        assert res.value.real == pytest.approx(tensor, rel=1e-6)

    def test_tolerance_halving_within_estimate(self):
        f = lambda x, y: math.cos(3 * x) * math.exp(-y) / (1 + x)
        coarse = quad.integrate_2d(f, ((0.0, 3.0), (0.0, math.inf)), tol=2e-6)
        fine = quad.integrate_2d(f, ((0.0, 3.0), (0.0, math.inf)), tol=1e-6)
        assert abs(coarse.value - fine.value) <= max(coarse.err_estimate, 1e-12)


class TestFFT1D:
    def test_delta_sample(self):
        n = 64
        dy = 0.25
        samples = np.zeros(n, dtype=complex)
        origin = -dy * (n // 2)
        samples[n // 2] = 1.0  # the sample sitting at y = 0
        g = quad.GridFunction1D(origin=origin, spacing=dy, samples=samples)
        out = quad.fft_1d(g)
        assert np.allclose(out.samples, dy, atol=1e-14)

    def test_gaussian_pair(self):
        n = 256
        dy = 0.15
        origin = -dy * (n // 2)
        y = origin + dy * np.arange(n)
        g = quad.GridFunction1D(origin, dy, np.exp(-0.5 * y * y))
        out = quad.fft_1d(g)
        k = out.points
        band = np.abs(k) < 6.0
        expect = math.sqrt(2.0 * math.pi) * np.exp(-0.5 * k[band] ** 2)
        assert np.max(np.abs(out.samples[band] - expect)) < 1e-8

    def test_matches_direct_summation(self):
        rng = np.random.default_rng(7)
        n = 128
        dy = 0.3
        origin = -2.0
        samples = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g = quad.GridFunction1D(origin, dy, samples)
        out = quad.fft_1d(g)
        y = g.points
        direct = np.array([dy * np.sum(samples * np.exp(-1j * k * y)) for k in out.points])
        assert np.max(np.abs(out.samples - direct)) < 1e-10 * np.max(np.abs(direct))

    def test_round_trip_identity(self):
        rng = np.random.default_rng(3)
        n = 64
        dy = 0.11
        origin = -dy * (n // 2)
        samples = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g = quad.GridFunction1D(origin, dy, samples)
        back = quad.ifft_1d(quad.fft_1d(g), origin_y=origin)
        assert np.max(np.abs(back.samples - samples)) < 1e-12
        assert back.origin == pytest.approx(origin)
        assert back.spacing == pytest.approx(dy)

    def test_power_of_two_required(self):
        g = quad.GridFunction1D(0.0, 0.1, np.ones(48, dtype=complex))
        with pytest.raises(ValueError):
            quad.fft_1d(g)
