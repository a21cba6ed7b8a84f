"""Modified Bessel functions of imaginary order and the accelerated-envelope kernel.

K_{i nu}(x) is real for real nu and x > 0, and even in nu.  Everything here
is organized around the exponentially scaled variant

    kscale(nu, x) = exp(pi nu / 2) * K_{i nu}(x)

which stays O(1) through the oscillatory region x < nu; the bare function
carries an exp(-pi nu/2) prefactor that underflows long before the physics
does.  Evaluation is split by region:

* ascending series via Im I_{i nu}(x), used while the predicted largest
  series term stays small enough that the imaginary part survives double
  rounding (the predictor is the saddle estimate of the term magnitudes);
* steepest-descent Laplace integral on the monotone side x > nu, where the
  integrand magnitude at the saddle equals the result magnitude, so there
  is no cancellation at any order;
* leading uniform asymptotics deep in the tail, where the value is
  negligible but must decay with the right exponent.

Region boundaries are frozen by the golden tests in tests/test_specfun.py.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.special as _sp

__all__ = [
    "bessel_k_imag",
    "bessel_k_imag_scaled",
    "kscaled_grid",
    "bessel_i_imag",
    "envelope_kernel",
    "envelope_kernel_scaled",
]

_ENVELOPE_CUT = 40.0   # e^{-40} envelope truncation of Laplace integrals
_SERIES_BUDGET = 7.0   # max ln(maxterm) - ln|result| tolerated by the series
_ASYM_LOG_CUT = -120.0  # leading-order tail once the value is utterly negligible
_SADDLE_MIN_ZETA = 3.0  # saddle path needs to sit clear of the turning point

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _tail_log(nu: float, x: np.ndarray) -> np.ndarray:
    """ln kscale to leading order for x > nu: -zeta + nu*arccos(nu/x)."""
    x = np.asarray(x, dtype=float)
    zeta = np.sqrt(x * x - nu * nu)
    beta = np.arccos(np.clip(nu / np.maximum(x, nu), -1.0, 1.0))
    return -zeta + nu * beta


def _series_maxterm_log(nu: float, x: np.ndarray) -> np.ndarray:
    """ln of the largest magnitude in the scaled ascending series.

    The term ladder (x^2/4)^k / (k! Gamma(k+1+i nu)) peaks at
    k* sqrt(k*^2 + nu^2) = x^2/4; the peak value controls how many digits
    the alternating imaginary part loses to rounding.
    """
    x = np.asarray(x, dtype=float)
    q = 0.25 * x * x
    kstar = np.sqrt(0.5 * (np.sqrt(nu**4 + 4.0 * q * q) - nu * nu))
    kstar = np.maximum(kstar, 1e-9)
    z = kstar + 1.0 + 1j * nu
    lg = _sp.loggamma(z).real
    return 2.0 * kstar * np.log(x / 2.0) - _sp.gammaln(kstar + 1.0) - lg - 0.5 * math.pi * nu


def _series_scaled(nu: float, x: np.ndarray) -> np.ndarray:
    """exp(pi nu/2) K_{i nu}(x) from the ascending series of Im I_{i nu}.

    The start term carries exp(-pi nu/2) folded in, so intermediates stay
    inside double range for any order.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    log_t0 = 1j * nu * np.log(x / 2.0) - _sp.loggamma(1.0 + 1j * nu) - 0.5 * math.pi * nu
    t = np.exp(log_t0)
    total = t.copy()
    q = 0.25 * x * x
    qmax = float(q.max())
    kmax = int(2.2 * math.sqrt(qmax) + 1.5 * nu + 60.0)
    kmin = math.sqrt(qmax)
    for k in range(1, kmax + 1):
        t = t * (q / (k * (k + 1j * nu)))
        total += t
        if k > kmin and bool(np.all(np.abs(t) < 1e-18 * np.abs(total))):
            break
    denom = -np.expm1(-2.0 * math.pi * nu)  # 1 - exp(-2 pi nu)
    return -2.0 * math.pi * total.imag / denom


def _saddle_scaled_many(nu: float, x: np.ndarray) -> np.ndarray:
    """Scaled K_{i nu}(x) for x > nu from the saddle-path Laplace integral.

    Deforming t -> i*arcsin(nu/x) + s turns the defining integral into

        kscale = e^{V} Int_0^inf e^{-zeta(cosh s - 1)} cos(nu(sinh s - s)) ds,

    V = -zeta + nu*arccos(nu/x), zeta = sqrt(x^2 - nu^2).  The magnitude at
    s = 0 equals the result scale, so double precision holds everywhere.
    Substituting zeta(cosh s - 1) = w^2 puts every argument on one shared
    Gauss grid in w:

        kscale = e^{V} Int_0^W e^{-w^2} cos(nu (q - asinh q)) 2/sqrt(2 zeta + w^2) dw,

    q = w sqrt(2 zeta + w^2)/zeta, W = sqrt of the envelope cut.  Arguments
    are bucketed by total phase so panel counts match the oscillation.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    zeta = np.sqrt(x * x - nu * nu)
    v = -zeta + nu * np.arccos(np.clip(nu / x, 0.0, 1.0))
    out = np.zeros_like(x)
    live = v >= -745.0
    if not live.any():
        return out
    wmax = math.sqrt(_ENVELOPE_CUT)
    qmax = wmax * np.sqrt(2.0 * zeta + wmax * wmax) / zeta
    phase_tot = nu * (qmax - np.arcsinh(qmax))
    panels_needed = np.maximum(3, (phase_tot / (6.0 * math.pi)).astype(int) + 3)
    for p in np.unique(panels_needed[live]):
        sel = live & (panels_needed == p)
        edges = np.linspace(0.0, wmax, p + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        w = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        wt = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        zs = zeta[sel][:, None]
        q = w[None, :] * np.sqrt(2.0 * zs + w[None, :] ** 2) / zs
        f = (np.exp(-w * w)[None, :]
             * np.cos(nu * (q - np.arcsinh(q)))
             * (2.0 / np.sqrt(2.0 * zs + w[None, :] ** 2)))
        out[sel] = np.exp(v[sel]) * (f @ wt)
    return out


def _asym_scaled(nu: float, x: np.ndarray) -> np.ndarray:
    zeta2 = x * x - nu * nu
    return math.sqrt(math.pi / 2.0) * zeta2 ** (-0.25) * np.exp(_tail_log(nu, x))


def _mp_scaled(nu: float, x: np.ndarray) -> np.ndarray:
    """Arbitrary-precision fallback for the turning-point strip at large order."""
    import mpmath as mp

    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    with mp.workdps(30):
        scale = mp.exp(0.5 * mp.pi * nu)
        for i, xv in enumerate(xs):
            out[i] = float(mp.re(mp.besselk(mp.mpc(0, nu), mp.mpf(float(xv)))) * scale)
    return out


def kscaled_grid(nu: float, x: np.ndarray) -> np.ndarray:
    """Vectorized exp(pi nu/2) K_{i nu}(x) for one order and an array of arguments.

    Production path for the mode-spectrum quadratures; region selection is
    by the frozen series-budget / tail map.
    """
    nu = abs(float(nu))
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x <= 0.0):
        raise ValueError("argument of K_{i nu} must be positive")
    out = np.empty_like(x)
    if nu < 1e-8:
        # K even in nu; the O(nu^2) error is below double rounding here
        out[:] = _sp.kve(0, x) * np.exp(-x)
        return out[0] if scalar else out

    vb = np.where(x > nu, _tail_log(nu, np.maximum(x, nu)), 0.0)
    series = _series_maxterm_log(nu, x) - vb <= _SERIES_BUDGET
    if series.any():
        out[series] = _series_scaled(nu, x[series])
    rest = ~series
    if rest.any():
        xr = x[rest]
        sub = np.empty_like(xr)
        monotone = xr * xr - nu * nu >= _SADDLE_MIN_ZETA**2
        deep = monotone & (vb[rest] <= _ASYM_LOG_CUT)
        saddle = monotone & ~deep
        strip = ~monotone  # turning-point strip: only the slow exact path is safe
        if deep.any():
            sub[deep] = _asym_scaled(nu, xr[deep])
        if saddle.any():
            sub[saddle] = _saddle_scaled_many(nu, xr[saddle])
        if strip.any():
            sub[strip] = _mp_scaled(nu, xr[strip])
        out[rest] = sub
    return out[0] if scalar else out


def bessel_k_imag_scaled(nu: float, x: float) -> float:
    """exp(pi nu/2) K_{i nu}(x) for scalar arguments."""
    return float(kscaled_grid(nu, np.asarray(float(x))))


def bessel_k_imag(nu: float, x: float) -> float:
    """K_{i nu}(x), real for real order parameter nu and x > 0; even in nu.

    Raises ValueError for x <= 0.  The result underflows to 0 smoothly once
    pi nu/2 + x leaves the double range; there is no overflow regime.
    """
    if not math.isfinite(nu):
        raise ValueError("order parameter must be finite")
    x = float(x)
    if x <= 0.0:
        raise ValueError(f"bessel_k_imag requires x > 0, got x={x}")
    nu = abs(float(nu))
    scaled = bessel_k_imag_scaled(nu, x)
    arg = -0.5 * math.pi * nu
    if arg < -745.0:  # exp underflow; keep the sign
        return math.copysign(0.0, scaled)
    return scaled * math.exp(arg)


def _i_hat_series(nu: float, z: float) -> complex:
    """Ihat_{i nu}(z) = sum_k (z^2/4)^k / (k! (1+i nu)_k): I_{i nu} with the
    (z/2)^{i nu}/Gamma(1+i nu) front factor stripped; -> 1 as z -> 0."""
    q = 0.25 * z * z
    t = 1.0 + 0.0j
    total = t
    k = 1
    while True:
        t *= q / (k * (k + 1j * nu))
        total += t
        if abs(t) <= 1e-18 * abs(total) or k > 20000:
            break
        k += 1
    return total


def bessel_i_imag(nu: float, x: float) -> complex:
    """I_{i nu}(x) as a complex number; I_{-i nu}(x) is its conjugate for x real.

    Raises ValueError for x <= 0 and signals overflow with an infinite
    result instead of silently saturating.
    """
    x = float(x)
    if x <= 0.0:
        raise ValueError(f"bessel_i_imag requires x > 0, got x={x}")
    nu = float(nu)
    if nu < 0.0:
        return complex(np.conjugate(bessel_i_imag(-nu, x)))
    if nu == 0.0:
        return complex(_sp.ive(0, x) * math.exp(x))
    log_front = 1j * nu * math.log(0.5 * x) - _sp.loggamma(1.0 + 1j * nu)
    # |I_{i nu}| <= e^x; the front factor carries the e^{pi nu/2} growth
    if log_front.real + x > 705.0:
        return complex(math.inf, math.inf)
    return complex(np.exp(log_front) * _i_hat_series(nu, x))


def envelope_kernel_scaled(Omega0: float, A: float, m: float, chi) -> np.ndarray:
    """Oscillatory radial factor of the accelerated wavepacket, scaled O(1).

    Returns Im{(A chi)^{i nu} Ihat_{-i nu}(m/A) Ihat_{i nu}(m chi)} with
    nu = Omega0/A, i.e. the literal Im{I I} product divided by
    sinh(pi nu)/(pi nu).  For m = 0 this is sin(nu ln(A chi)) exactly.
    """
    if A <= 0.0:
        raise ValueError("proper acceleration A must be positive")
    if m < 0.0:
        raise ValueError("mass must be nonnegative")
    chi = np.asarray(chi, dtype=float)
    if np.any(chi <= 0.0):
        raise ValueError("chi must lie inside the wedge (chi > 0)")
    nu = Omega0 / A
    if m == 0.0:
        return np.sin(nu * np.log(A * chi))
    left = np.conjugate(_i_hat_series(nu, m / A))
    flat = np.atleast_1d(chi).ravel()
    vals = np.array([_i_hat_series(nu, m * float(c)) for c in flat]).reshape(np.atleast_1d(chi).shape)
    phase = np.exp(1j * nu * np.log(A * np.atleast_1d(chi)))
    out = np.imag(phase * left * vals)
    return out.reshape(chi.shape) if chi.ndim else out[0]


def envelope_kernel(Omega0: float, A: float, m: float, chi: float) -> float:
    """Im{ I_{-i Omega0/A}(m/A) I_{i Omega0/A}(m chi) } for chi inside the wedge.

    Vanishes identically at chi = 1/A, where the product becomes |I|^2.
    The m -> 0 limit is sin(nu ln(A chi)) * sinh(pi nu)/(pi nu).  Raises
    OverflowError when sinh(pi Omega0/A) exceeds the double range; use
    envelope_kernel_scaled in that regime (packet normalization absorbs
    the constant anyway).
    """
    nu = Omega0 / A if A > 0 else math.inf
    if math.pi * nu > 705.0:
        raise OverflowError(
            "envelope modulus sinh(pi Omega0/A) overflows; use envelope_kernel_scaled"
        )
    scale = math.sinh(math.pi * nu) / (math.pi * nu) if nu > 0 else 1.0
    return float(envelope_kernel_scaled(Omega0, A, m, np.asarray(float(chi)))) * scale
