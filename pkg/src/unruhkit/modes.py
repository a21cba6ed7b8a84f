"""Wavepacket construction, Klein-Gordon products and mode spectra.

Conventions used throughout:

* natural units, metric signature (+,-,-,-); the scalar product is
  (f, g) = i Int d^dx (f* dg/dt - g df*/dt) on the t = 0 slice;
* wedge coordinate zeta = |z -+ D/2| measured from the wedge apex, so both
  wedges share one radial profile and the mirror bookkeeping lives in the
  grid, not in the formulas;
* the chart parameter ``a`` of the accelerated coordinates is a global
  configuration constant, distinct from any observer's proper acceleration
  ``A`` (an observer at wedge coordinate zeta = 1/A has proper acceleration
  A regardless of a);
* accelerated-mode prefactors are evaluated in exponentially scaled form,
  pairing sqrt(sinh(pi Omega/a)) growth against the exp(-pi Omega/2a)
  decay of the imaginary-order Bessel kernel.

Time-derivative rule for the accelerated packets: the proper-time condition
fixes d/dtau psi = -+ i Omega0 psi on the central trajectory.  Read locally
it gives d/dt psi = -i Omega0 psi / (A zeta) at t = 0 in both wedges
("local" rule, the default); reading it as a rigid frequency stamp gives
d/dt psi = -i Omega0 psi ("constant" rule).  Both are implemented.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.interpolate
import scipy.special

from . import quad, specfun

__all__ = [
    "WavepacketSpec",
    "Axis",
    "RectGrid",
    "FieldSlice",
    "SpectralTable",
    "RadialSpectrum",
    "GridResolutionError",
    "eval_minkowski_mode",
    "eval_rindler_mode",
    "kg_inner_product",
    "default_grid",
    "build_inertial_wavepacket",
    "build_accelerated_wavepacket",
    "minkowski_spectrum",
    "rindler_spectrum",
    "project_positive",
    "radial_spectrum_analytic",
    "rindler_norm_prefactor",
]


class GridResolutionError(ValueError):
    """A grid undersamples an oscillation it is asked to carry."""


# --------------------------------------------------------------------------
# specs and grids
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WavepacketSpec:
    """Physical parameters of one localized mode.

    A           proper acceleration of the packet center (1/length)
    L_par       longitudinal width of the log-Gaussian envelope
    L_perp      transverse Gaussian width
    Omega0      central proper frequency
    m           field mass
    kappa_perp  transverse modulation wavenumber
    wedge       "I" (right) or "II" (left)
    D           wedge separation: apexes sit at +-D/2
    orientation "counter" or "parallel" (sign conventions of the pairing)
    dim         "3+1" or "2+1"
    theta, D_y, D_z   rotated-frame placement (skew scenarios only)
    """

    A: float
    L_par: float
    L_perp: float
    Omega0: float
    m: float = 0.0
    kappa_perp: float = 0.0
    wedge: str = "I"
    D: float = 0.0
    orientation: str = "counter"
    dim: str = "3+1"
    theta: float = math.pi
    D_y: float = 0.0
    D_z: float = 0.0

    def __post_init__(self):
        if self.A <= 0 or self.L_par <= 0 or self.L_perp <= 0:
            raise ValueError("A, L_par, L_perp must be positive")
        if self.Omega0 <= 0:
            raise ValueError("Omega0 must be positive")
        if self.m < 0 or self.kappa_perp < 0:
            raise ValueError("m and kappa_perp must be nonnegative")
        if self.wedge not in ("I", "II"):
            raise ValueError(f"unknown wedge {self.wedge!r}")
        if self.orientation not in ("counter", "parallel"):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.dim not in ("3+1", "2+1"):
            raise ValueError(f"unknown dimension tag {self.dim!r}")
        if self.Omega0 ** 2 <= self.m ** 2:
            raise ValueError("Omega0 must exceed the mass for an oscillatory packet")
        if self.Omega0 * self.L_par < 10.0:
            warnings.warn(
                f"Omega0*L_par = {self.Omega0 * self.L_par:.2f} < 10: "
                "negative-frequency contamination may not be negligible",
                stacklevel=2,
            )

    def content_hash(self) -> str:
        payload = json.dumps(
            {k: getattr(self, k) for k in self.__dataclass_fields__}, sort_keys=True
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @property
    def k_long(self) -> float:
        """Longitudinal wavenumber of the inertial carrier."""
        return math.sqrt(self.Omega0 ** 2 - self.m ** 2)

    @property
    def ndim_space(self) -> int:
        return 3 if self.dim == "3+1" else 2


def _simpson_weights(n: int, h: float) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        w = np.full(n, h)
        w[0] = w[-1] = 0.5 * h
        return w
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


@dataclass(frozen=True)
class Axis:
    name: str
    points: np.ndarray
    weights: np.ndarray

    @classmethod
    def uniform(cls, name: str, lo: float, hi: float, n: int) -> "Axis":
        pts = np.linspace(lo, hi, n)
        return cls(name, pts, _simpson_weights(n, pts[1] - pts[0]))

    @property
    def spacing(self) -> float:
        return float(self.points[1] - self.points[0])


@dataclass(frozen=True)
class RectGrid:
    axes: tuple[Axis, ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.points.size for ax in self.axes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(ax.name for ax in self.axes)

    def axis(self, name: str) -> Axis:
        for ax in self.axes:
            if ax.name == name:
                return ax
        raise KeyError(name)

    def weight_array(self) -> np.ndarray:
        w = self.axes[0].weights
        for ax in self.axes[1:]:
            w = np.multiply.outer(w, ax.weights)
        return w

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*(ax.points for ax in self.axes), indexing="ij")

    def compatible(self, other: "RectGrid") -> bool:
        return self.shape == other.shape and all(
            np.array_equal(a.points, b.points) for a, b in zip(self.axes, other.axes)
        )


@dataclass
class FieldSlice:
    """Field value and time derivative on the t = 0 surface."""

    grid: RectGrid
    value: np.ndarray
    tderiv: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=complex)
        self.tderiv = np.asarray(self.tderiv, dtype=complex)
        if self.value.shape != self.grid.shape or self.tderiv.shape != self.grid.shape:
            raise ValueError("field arrays must match the grid shape")
        if not (np.all(np.isfinite(self.value)) and np.all(np.isfinite(self.tderiv))):
            raise ValueError("field arrays must be finite")

    def conjugate(self) -> "FieldSlice":
        return FieldSlice(self.grid, np.conjugate(self.value),
                          np.conjugate(self.tderiv), dict(self.meta))


def kg_inner_product(f: FieldSlice, g: FieldSlice) -> complex:
    """Klein-Gordon product i Int (f* dg - g df*) over the shared slice."""
    if not f.grid.compatible(g.grid):
        raise ValueError("incongruent grids in Klein-Gordon product")
    w = f.grid.weight_array()
    fc = np.conjugate(f.value)
    return complex(1j * np.sum(w * (fc * g.tderiv - g.value * np.conjugate(f.tderiv))))


# --------------------------------------------------------------------------
# continuum modes
# --------------------------------------------------------------------------

def eval_minkowski_mode(k, x, t: float, m: float) -> complex:
    """Plane-wave solution e^{-i w t + i k.x} / sqrt((2 pi)^d 2 w)."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if k.shape != x.shape:
        raise ValueError("k and x must have the same dimension")
    w = math.sqrt(float(k @ k) + m * m)
    d = k.size
    norm = math.sqrt((2.0 * math.pi) ** d * 2.0 * w)
    return complex(np.exp(-1j * w * t + 1j * float(k @ x)) / norm)


def rindler_norm_prefactor(Omega: float, a: float, dim: str) -> float:
    """Scaled normalization B(Omega): the mode prefactor with exp(-pi Omega/2a)
    of the Bessel kernel absorbed, so B * kscale is the physical product."""
    nu = Omega / a
    one = -np.expm1(-2.0 * math.pi * nu) if nu > 0 else 0.0
    if dim == "3+1":
        return math.sqrt(one / (8.0 * math.pi ** 4 * a))
    return math.sqrt(one / (4.0 * math.pi ** 3 * a))


def eval_rindler_mode(Omega: float, kperp, wedge: str, chi: float, xperp,
                      eta: float, a: float, m: float, dim: str = "3+1") -> complex:
    """Boost-mode solution in the given wedge; exactly 0 outside it."""
    if a <= 0:
        raise ValueError("chart parameter a must be positive")
    sign = 1.0 if wedge == "I" else -1.0
    if chi * sign <= 0.0:
        return 0.0 + 0.0j
    kperp = np.atleast_1d(np.asarray(kperp, dtype=float))
    xperp = np.atleast_1d(np.asarray(xperp, dtype=float))
    mu = math.sqrt(float(kperp @ kperp) + m * m)
    kernel = specfun.kscaled_grid(Omega / a, np.asarray(mu * abs(chi)))
    phase = np.exp(1j * float(kperp @ xperp) - 1j * sign * Omega * eta)
    return complex(rindler_norm_prefactor(Omega, a, dim) * float(kernel) * phase)


# --------------------------------------------------------------------------
# packet construction
# --------------------------------------------------------------------------

def _wedge_sign(spec: WavepacketSpec) -> float:
    return 1.0 if spec.wedge == "I" else -1.0


def _zeta_of_z(spec: WavepacketSpec, z: np.ndarray) -> np.ndarray:
    """Wedge coordinate |z -+ D/2| for points inside the packet's wedge."""
    return _wedge_sign(spec) * (z - _wedge_sign(spec) * 0.5 * spec.D)


def default_grid(spec: WavepacketSpec, points_per_cycle: int = 12,
                 support_efold: float = 4.0, transverse_widths: float = 4.0) -> RectGrid:
    """Uniform rectilinear wedge grid sized to the packet's support and carriers."""
    r = support_efold * spec.A * spec.L_par
    zeta_lo = math.exp(-r) / spec.A
    zeta_hi = math.exp(r) / spec.A
    dz = 2.0 * math.pi / (points_per_cycle * spec.k_long)
    nz = int(math.ceil((zeta_hi - zeta_lo) / dz)) + 1
    if nz % 2 == 0:
        nz += 1
    sgn = _wedge_sign(spec)
    z0 = sgn * (zeta_lo + 0.5 * spec.D) if sgn > 0 else -(zeta_hi + 0.5 * spec.D)
    z1 = sgn * (zeta_hi + 0.5 * spec.D) if sgn > 0 else -(zeta_lo + 0.5 * spec.D)
    z_axis = Axis.uniform("z", z0, z1, nz)

    half = transverse_widths * spec.L_perp
    k_t = max(spec.kappa_perp, 3.0 / spec.L_perp)
    dt = 2.0 * math.pi / (points_per_cycle * k_t)
    nt = int(math.ceil(2.0 * half / dt)) + 1
    if nt % 2 == 0:
        nt += 1
    t_axes = [Axis.uniform(nm, -half, half, nt)
              for nm in (("x", "y") if spec.dim == "3+1" else ("y",))]
    return RectGrid(tuple(t_axes) + (z_axis,))


def _check_resolution(spec: WavepacketSpec, grid: RectGrid):
    z = grid.axis("z")
    lam_z = 2.0 * math.pi / spec.k_long
    if z.spacing > lam_z / 8.0:
        raise GridResolutionError(
            f"z spacing {z.spacing:.4g} undersamples the longitudinal wavelength "
            f"{lam_z:.4g} (need >= 8 points per cycle)")
    if spec.kappa_perp > 0:
        lam_t = 2.0 * math.pi / spec.kappa_perp
        for name in ("x", "y"):
            try:
                ax = grid.axis(name)
            except KeyError:
                continue
            if ax.spacing > lam_t / 8.0:
                raise GridResolutionError(
                    f"{name} spacing {ax.spacing:.4g} undersamples the transverse "
                    f"wavelength {lam_t:.4g} (need >= 8 points per cycle)")


def _transverse_profile(spec: WavepacketSpec, grid: RectGrid) -> np.ndarray:
    axes = grid.names
    prof = None
    for name in ("x", "y"):
        if name not in axes:
            continue
        u = grid.axis(name).points
        f = np.exp(-2.0 * u * u / spec.L_perp ** 2)
        if spec.kappa_perp > 0:
            f = f * np.sin(spec.kappa_perp * u)
        prof = f if prof is None else np.multiply.outer(prof, f)
    return prof


def _longitudinal_envelope(spec: WavepacketSpec, zeta: np.ndarray) -> np.ndarray:
    u = np.log(spec.A * zeta)
    return np.exp(-2.0 * (u / (spec.A * spec.L_par)) ** 2)


def _normalize(f: FieldSlice) -> FieldSlice:
    norm2 = kg_inner_product(f, f).real
    if norm2 <= 0:
        raise ValueError("packet has non-positive Klein-Gordon norm")
    s = 1.0 / math.sqrt(norm2)
    f.value *= s
    f.tderiv *= s
    return f


def build_inertial_wavepacket(spec: WavepacketSpec, grid: RectGrid | None = None,
                              points_per_cycle: int = 12) -> FieldSlice:
    """Inertial packet: log-Gaussian envelope, sinusoidal carrier, unit KG norm."""
    if grid is None:
        grid = default_grid(spec, points_per_cycle)
    _check_resolution(spec, grid)
    z = grid.axis("z").points
    zeta = _zeta_of_z(spec, z)
    inside = zeta > 0
    zeta_safe = np.where(inside, zeta, 1.0)
    carrier = np.sin(spec.k_long * _wedge_sign(spec) * (zeta_safe - 1.0 / spec.A))
    radial = np.where(inside, _longitudinal_envelope(spec, zeta_safe) * carrier, 0.0)
    trans = _transverse_profile(spec, grid)
    value = trans[..., None] * radial
    tderiv = -1j * spec.Omega0 * value
    out = FieldSlice(grid, value, tderiv, {"spec": spec, "kind": "inertial"})
    return _normalize(out)


def build_accelerated_wavepacket(spec: WavepacketSpec, grid: RectGrid | None = None,
                                 points_per_cycle: int = 12,
                                 time_rule: str = "local") -> FieldSlice:
    """Accelerated packet with the imaginary-order Bessel carrier, unit KG norm.

    ``time_rule`` selects how the proper-time frequency condition is read:
    "local" (default) applies it pointwise, "constant" stamps the inertial
    rule on the slice.
    """
    if time_rule not in ("local", "constant"):
        raise ValueError(f"unknown time rule {time_rule!r}")
    if grid is None:
        grid = default_grid(spec, points_per_cycle)
    _check_resolution(spec, grid)
    z = grid.axis("z").points
    zeta = _zeta_of_z(spec, z)
    inside = zeta > 0
    zeta_safe = np.where(inside, zeta, 1.0)
    kernel = specfun.envelope_kernel_scaled(spec.Omega0, spec.A, spec.m, zeta_safe)
    radial = np.where(inside, _longitudinal_envelope(spec, zeta_safe) * kernel, 0.0)
    trans = _transverse_profile(spec, grid)
    value = trans[..., None] * radial
    if time_rule == "local":
        rate = np.where(inside, 1.0 / (spec.A * zeta_safe), 0.0)
        tderiv = -1j * spec.Omega0 * value * rate
    else:
        tderiv = -1j * spec.Omega0 * value
    out = FieldSlice(grid, value, tderiv,
                     {"spec": spec, "kind": "accelerated", "time_rule": time_rule})
    return _normalize(out)


# --------------------------------------------------------------------------
# spectra
# --------------------------------------------------------------------------

@dataclass
class SpectralTable:
    """Overlap amplitudes of a packet against a discretized continuum basis."""

    basis: str  # "minkowski_k" or "rindler_omega_kperp"
    axes: tuple[Axis, ...]
    amplitudes: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != tuple(ax.points.size for ax in self.axes):
            raise ValueError("amplitude array must match the axes")

    def axis(self, name: str) -> Axis:
        for ax in self.axes:
            if ax.name == name:
                return ax
        raise KeyError(name)

    def weight_array(self) -> np.ndarray:
        w = self.axes[0].weights
        for ax in self.axes[1:]:
            w = np.multiply.outer(w, ax.weights)
        return w

    def squared_norm(self) -> float:
        return float(np.sum(self.weight_array() * np.abs(self.amplitudes) ** 2))


def _fourier_axes(grid: RectGrid, names) -> list[Axis]:
    axes = []
    for nm in names:
        ax = grid.axis(nm)
        n = ax.points.size
        k = 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(n, d=ax.spacing))
        axes.append(Axis(f"k{nm}", k, _simpson_weights(n, float(k[1] - k[0]))))
    return axes


def _forward_fft(values: np.ndarray, grid: RectGrid, names) -> np.ndarray:
    """Continuum FT over the named axes: Int dx f e^{-i k x} on the shifted grid."""
    idx = [grid.names.index(nm) for nm in names]
    out = np.fft.fftn(values, axes=idx)
    out = np.fft.fftshift(out, axes=idx)
    for nm, ax_i in zip(names, idx):
        ax = grid.axis(nm)
        n = ax.points.size
        k = 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(n, d=ax.spacing))
        phase = ax.spacing * np.exp(-1j * k * ax.points[0])
        shape = [1] * values.ndim
        shape[ax_i] = n
        out = out * phase.reshape(shape)
    return out


def minkowski_spectrum(f: FieldSlice, tail_tol: float = 1e-6) -> SpectralTable:
    """Positive-frequency plane-wave amplitudes (u_k, f) on the FFT k-grid."""
    spec: WavepacketSpec = f.meta["spec"]
    names = f.grid.names
    fv = _forward_fft(f.value, f.grid, names)
    ft = _forward_fft(f.tderiv, f.grid, names)
    axes = _fourier_axes(f.grid, names)
    mesh = np.meshgrid(*(ax.points for ax in axes), indexing="ij")
    k2 = sum(k * k for k in mesh)
    omega = np.sqrt(k2 + spec.m ** 2)
    d = len(names)
    amp = (1j * ft + omega * fv) / np.sqrt((2.0 * math.pi) ** d * 2.0 * omega)
    peak = float(np.max(np.abs(amp)))
    edge = max(
        float(np.max(np.abs(amp[tuple(slice(None) if i != j else [0, -1]
                                      for i in range(d))])))
        for j in range(d)
    )
    if edge > tail_tol * peak:
        raise ValueError(
            f"spectrum not decayed at grid edge (edge/peak = {edge / peak:.2e}); "
            "refine the spatial grid")
    return SpectralTable("minkowski_k", tuple(axes), amp, {"spec": spec})


def rindler_spectrum(f: FieldSlice, wedge: str, a: float,
                     omega_axis: Axis | None = None) -> SpectralTable:
    """Boost-mode amplitudes (w_{wedge,Omega,kperp}, f) by slice quadrature.

    Transverse directions go через FFT, the wedge coordinate by weighted
    summation against the scaled Bessel kernel.
    """
    spec: WavepacketSpec = f.meta["spec"]
    if omega_axis is None:
        omega_axis = default_omega_axis(spec, a)
    names = [nm for nm in f.grid.names if nm != "z"]
    g1 = np.conjugate(_forward_fft(f.value, f.grid, names))   # Int f* e^{+ikx}
    g2 = np.conjugate(_forward_fft(f.tderiv, f.grid, names))
    k_axes = _fourier_axes(f.grid, names)
    mesh = np.meshgrid(*(ax.points for ax in k_axes), indexing="ij")
    mu = np.sqrt(sum(k * k for k in mesh) + spec.m ** 2)

    z_ax = f.grid.axis("z")
    sgn = 1.0 if wedge == "I" else -1.0
    zeta = sgn * (z_ax.points - sgn * 0.5 * spec.D)
    inside = zeta > 0
    wz = z_ax.weights * inside
    zeta_safe = np.where(inside, zeta, 1.0)

    n_omega = omega_axis.points.size
    out_shape = (n_omega,) + tuple(ax.points.size for ax in k_axes)
    amp = np.zeros(out_shape, dtype=complex)
    mu_flat = mu.ravel()
    for i, omega in enumerate(omega_axis.points):
        xargs = np.multiply.outer(mu_flat, zeta_safe)  # (nk, nz)
        kern = specfun.kscaled_grid(omega / a, np.clip(xargs.ravel(), 1e-290, None))
        kern = kern.reshape(xargs.shape)
        slope = -1j * (omega / a) / zeta_safe
        g1f = g1.reshape(-1, zeta.size)
        g2f = g2.reshape(-1, zeta.size)
        integ = kern * (slope[None, :] * g1f - g2f)
        amp[i] = (1j * rindler_norm_prefactor(omega, a, spec.dim)
                  * (integ @ wz)).reshape(mu.shape)
    return SpectralTable("rindler_omega_kperp", (omega_axis,) + tuple(k_axes), amp,
                         {"spec": spec, "wedge": wedge, "a": a})


def default_omega_axis(spec: WavepacketSpec, a: float, n_ir: int = 48,
                       n_peak: int = 96, sigmas: float = 5.0) -> Axis:
    """Frequency axis: dense in the infrared, covering the spectral peak."""
    center = a * spec.Omega0 / spec.A
    width = 2.0 * a / (spec.A * spec.L_par)
    lo_band = min(0.5 * center, 3.0 * a)
    hi = center + sigmas * width
    ir = np.linspace(0.0, lo_band, n_ir, endpoint=False)
    main = np.linspace(lo_band, hi, n_peak)
    pts = np.concatenate([ir, main])
    w = np.gradient(pts)
    w[0] *= 0.5
    w[-1] *= 0.5
    return Axis("Omega", pts, w)


def project_positive(f: FieldSlice, basis: str, a: float = 1.0,
                     omega_axis: Axis | None = None) -> FieldSlice:
    """Reconstruct the slice from positive-frequency amplitudes and renormalize.

    Raises ValueError when the reconstruction retains less than half of the
    original norm (the packet was predominantly negative-frequency).
    """
    spec: WavepacketSpec = f.meta["spec"]
    if basis == "minkowski":
        table = minkowski_spectrum(f)
        names = f.grid.names
        d = len(names)
        mesh = np.meshgrid(*(ax.points for ax in table.axes), indexing="ij")
        omega = np.sqrt(sum(k * k for k in mesh) + spec.m ** 2)
        h = table.amplitudes / np.sqrt((2.0 * math.pi) ** d * 2.0 * omega)
        value = _inverse_fft(h, table.axes, f.grid, names)
        tderiv = _inverse_fft(-1j * omega * h, table.axes, f.grid, names)
    elif basis == "rindler":
        wedge = spec.wedge
        table = rindler_spectrum(f, wedge, a, omega_axis)
        value, tderiv = _reconstruct_rindler(table, f.grid)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    out = FieldSlice(f.grid, value, tderiv, dict(f.meta))
    kept = kg_inner_product(out, out).real
    if kept < 0.25:  # norm scales quadratically with amplitude retention
        raise ValueError(
            f"positive-frequency reconstruction keeps only norm {kept:.3f} < 0.5^2 "
            "of the packet")
    out.meta["negative_fraction"] = max(0.0, 1.0 - kept)
    return _normalize(out)


def _inverse_fft(h: np.ndarray, axes, grid: RectGrid, names) -> np.ndarray:
    """Int d^dk h(k) e^{+i k x} evaluated on the original grid."""
    out = h.astype(complex).copy()
    for i, nm in enumerate(names):
        kax = axes[i]
        xax = grid.axis(nm)
        n = xax.points.size
        shape = [1] * h.ndim
        shape[i] = n
        # undo forward phases, then inverse FFT (numpy normalizes by 1/n)
        out = out * np.exp(1j * kax.points * xax.points[0]).reshape(shape) / xax.spacing
        out = np.fft.ifftshift(out, axes=i)
        out = np.fft.ifftn(out, axes=[i])
    return out


def _reconstruct_rindler(table: SpectralTable, grid: RectGrid):
    spec: WavepacketSpec = table.meta["spec"]
    a = table.meta["a"]
    wedge = table.meta["wedge"]
    z_ax = grid.axis("z")
    sgn = 1.0 if wedge == "I" else -1.0
    zeta = sgn * (z_ax.points - sgn * 0.5 * spec.D)
    inside = zeta > 0
    zeta_safe = np.where(inside, zeta, 1.0)
    omega_ax = table.axes[0]
    k_axes = table.axes[1:]
    names = [nm for nm in grid.names if nm != "z"]
    mesh = np.meshgrid(*(ax.points for ax in k_axes), indexing="ij")
    mu_flat = np.sqrt(sum(k * k for k in mesh) + spec.m ** 2).ravel()

    nkf = mu_flat.size
    acc_v = np.zeros((nkf, zeta.size), dtype=complex)
    acc_t = np.zeros_like(acc_v)
    xargs = np.clip(np.multiply.outer(mu_flat, zeta_safe), 1e-290, None)
    for i, omega in enumerate(omega_ax.points):
        b = rindler_norm_prefactor(omega, a, spec.dim)
        kern = specfun.kscaled_grid(omega / a, xargs.ravel()).reshape(xargs.shape)
        coeff = (omega_ax.weights[i] * b) * table.amplitudes[i].ravel()
        acc_v += coeff[:, None] * kern
        acc_t += (-1j * omega / a) * coeff[:, None] * kern / zeta_safe[None, :]
    acc_v *= inside[None, :]
    acc_t *= inside[None, :]

    # explicit transverse transform e^{+i kperp.xperp} back to the grid
    kw = k_axes[0].weights
    for ax in k_axes[1:]:
        kw = np.multiply.outer(kw, ax.weights)
    kw_flat = kw.ravel()
    xmesh = np.meshgrid(*(grid.axis(nm).points for nm in names), indexing="ij")
    x_flat = [xm.ravel() for xm in xmesh]
    k_flat = [km.ravel() for km in mesh]
    phase_arg = sum(np.multiply.outer(xf, kf) for xf, kf in zip(x_flat, k_flat))
    phase = np.exp(1j * phase_arg) * kw_flat[None, :]
    nx = tuple(grid.axis(nm).points.size for nm in names)
    value = (phase @ acc_v).reshape(nx + (zeta.size,))
    tderiv = (phase @ acc_t).reshape(nx + (zeta.size,))
    return value, tderiv


# --------------------------------------------------------------------------
# analytic radial spectra (production path for the channel integrals)
# --------------------------------------------------------------------------

@dataclass
class RadialSpectrum:
    """Factorized boost spectrum of an analytic packet.

    amplitude(Omega, kperp) = B(Omega) * s(Omega, mu) * prod_axis T(k_axis),
    with mu = sqrt(|kperp|^2 + m^2), T the transverse overlap, and s the
    normalized radial profile tabulated here on (omega_axis, mu_axis).
    """

    spec: WavepacketSpec
    a: float
    omega_axis: Axis
    mu_axis: np.ndarray
    s_values: np.ndarray  # real, shape (n_omega, n_mu)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._spline = scipy.interpolate.RectBivariateSpline(
            self.omega_axis.points, self.mu_axis, self.s_values, kx=3, ky=3)

    def s(self, omega, mu) -> np.ndarray:
        return self._spline(np.atleast_1d(omega), np.atleast_1d(mu), grid=True)

    def s_at(self, omega: float, mu: np.ndarray) -> np.ndarray:
        return self._spline(np.full(1, omega), np.atleast_1d(mu), grid=True)[0]

    @property
    def omega_max(self) -> float:
        return float(self.omega_axis.points[-1])

    def transverse_overlap(self, k: np.ndarray) -> np.ndarray:
        """T(k) = i sqrt(pi/2) L e^{-L^2(k^2+kappa^2)/8} sinh(L^2 kappa k / 4)."""
        s = self.spec
        L, kap = s.L_perp, s.kappa_perp
        mag = (math.sqrt(math.pi / 2.0) * L
               * np.exp(-L * L * (k * k + kap * kap) / 8.0)
               * np.sinh(L * L * kap * k / 4.0))
        return 1j * mag

    def dense_table(self, k_axes: tuple[Axis, ...]) -> SpectralTable:
        """Materialize amplitudes on a dense (Omega, k...) grid."""
        mesh = np.meshgrid(*(ax.points for ax in k_axes), indexing="ij")
        mu = np.sqrt(sum(k * k for k in mesh) + self.spec.m ** 2)
        trans = np.ones(mu.shape, dtype=complex)
        for kmesh in mesh:
            trans = trans * self.transverse_overlap(kmesh)
        b = np.array([rindler_norm_prefactor(om, self.a, self.spec.dim)
                      for om in self.omega_axis.points])
        svals = self._spline(self.omega_axis.points, np.clip(mu.ravel(), self.mu_axis[0],
                                                             self.mu_axis[-1]), grid=True)
        amp = (b[:, None] * svals).reshape((self.omega_axis.points.size,) + mu.shape) \
            * trans[None, ...]
        return SpectralTable("rindler_omega_kperp", (self.omega_axis,) + tuple(k_axes),
                             amp, {"spec": self.spec, "wedge": self.spec.wedge,
                                   "a": self.a, "radial": self})


def _radial_gbar_row(spec: WavepacketSpec, a: float, omega: float,
                     mu: np.ndarray, env_u: np.ndarray, u_nodes: np.ndarray,
                     u_weights: np.ndarray) -> np.ndarray:
    """One row of the scaled radial overlap integral over the wedge coordinate."""
    zeta = np.exp(u_nodes) / spec.A
    xargs = np.multiply.outer(mu, zeta)
    kern = specfun.kscaled_grid(omega / a, np.clip(xargs.ravel(), 1e-290, None))
    kern = kern.reshape(xargs.shape)
    return kern @ (u_weights * env_u)


def radial_spectrum_analytic(spec: WavepacketSpec, a: float,
                             omega_axis: Axis | None = None,
                             n_mu: int = 64, k_max: float | None = None,
                             time_rule: str = "local") -> RadialSpectrum:
    """Normalized radial boost spectrum of the analytic accelerated packet.

    The overlap against a boost mode factorizes into transverse Fourier
    factors and the radial integral

        s(Omega, mu) ~ (Omega/a + Omega0/A) Int dzeta/zeta kscale * envelope,

    evaluated per frequency with shared log-coordinate quadrature nodes.
    With the "constant" time rule the frequency prefactor is replaced by
    the mode-weighted pair (Omega/a * <1/(A zeta)> + Omega0 pattern) folded
    into the integrand.
    """
    if omega_axis is None:
        omega_axis = default_omega_axis(spec, a)
    if k_max is None:
        k_max = transverse_k_cutoff(spec, spec)
    mu_lo = spec.m if spec.m > 0 else 1e-4
    mu_hi = math.sqrt(k_max ** 2 + spec.m ** 2)
    mu_axis = np.geomspace(mu_lo, mu_hi, n_mu)

    # log-coordinate panels across the envelope support, sized per frequency
    umax = spec.A * spec.L_par * math.sqrt(0.5 * math.log(1e14))
    nu0 = spec.Omega0 / spec.A
    nodes, weights = np.polynomial.legendre.leggauss(24)

    def u_rule(omega: float):
        cycles = (nu0 + omega / a) * (2.0 * umax) / (2.0 * math.pi)
        n_panel = max(4, int(0.6 * cycles) + 1)
        edges = np.linspace(-umax, umax, n_panel + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        un = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        uw = (half[:, None] * weights[None, :]).ravel()
        return un, uw

    # node sets are bucketed so the envelope series is evaluated once each
    n_omega = omega_axis.points.size
    panel_counts = np.array([u_rule(om)[0].size for om in omega_axis.points])
    s_raw = np.empty((n_omega, n_mu))
    env_cache: dict[int, tuple] = {}
    for i, omega in enumerate(omega_axis.points):
        n_sz = int(panel_counts[i])
        if n_sz not in env_cache:
            un, uw = u_rule(omega)
            zn = np.exp(un) / spec.A
            env = (np.exp(-2.0 * (un / (spec.A * spec.L_par)) ** 2)
                   * specfun.envelope_kernel_scaled(spec.Omega0, spec.A, spec.m, zn))
            env_cache[n_sz] = (un, uw, zn, env)
        un, uw, zn, env = env_cache[n_sz]
        row = _radial_gbar_row(spec, a, omega, mu_axis, env, un, uw)
        if time_rule == "local":
            s_raw[i] = (omega / a + spec.Omega0 / spec.A) * row
        else:
            # constant rule: the Omega0 term carries 1/(A zeta) inside the integral
            xargs = np.multiply.outer(mu_axis, zn)
            kern = specfun.kscaled_grid(omega / a, np.clip(xargs.ravel(), 1e-290, None))
            kern = kern.reshape(xargs.shape)
            row2 = kern @ (uw * env * (spec.A * zn))
            s_raw[i] = (omega / a) * row + (spec.Omega0 / spec.A) * row2

    rad = RadialSpectrum(spec, a, omega_axis, mu_axis, s_raw,
                         {"time_rule": time_rule, "k_max": k_max})
    norm2 = radial_pair_integral(rad, rad, "norm").value.real
    rad.s_values = rad.s_values / math.sqrt(norm2)
    rad.__post_init__()
    rad.meta["norm_check"] = radial_pair_integral(rad, rad, "norm").value.real
    return rad


def transverse_k_cutoff(spec_i: WavepacketSpec, spec_ii: WavepacketSpec,
                        log_floor: float = -34.0) -> float:
    """Transverse wavenumber beyond which the radial weight is negligible."""
    gamma = (spec_i.L_perp ** 2 + spec_ii.L_perp ** 2) / 8.0
    alpha = (spec_i.L_perp ** 2 * spec_i.kappa_perp
             + spec_ii.L_perp ** 2 * spec_ii.kappa_perp) / 4.0
    ks = np.linspace(0.1, 120.0, 6000)
    expo = math.sqrt(2.0) * alpha * ks - gamma * ks * ks
    peak = float(np.max(expo))
    above = np.nonzero(expo > peak + log_floor)[0]
    return float(ks[above[-1]]) if above.size else 10.0


def transverse_radial_weight(k: np.ndarray, spec_i: WavepacketSpec,
                             spec_ii: WavepacketSpec) -> np.ndarray:
    """Angular-reduced transverse weight of the planar wavenumber integrals.

    Int d^2 kperp of the two packets' transverse overlap product reduces to
    Int_0^inf k dk W(k) with

        W(k) = C (pi/2) [I0(sqrt(2) a+ k) - 2 I0(sqrt(a+^2 + a-^2) k)
                          + I0(sqrt(2) a- k)] e^{-(L1^2+L2^2) k^2 / 8},

    where a+- are the sum and difference of the per-packet sinh slopes
    L^2 kappa / 4.  Evaluated with exponentially scaled I0 so large
    arguments cannot overflow.
    """
    li, ki_ = spec_i.L_perp, spec_i.kappa_perp
    lii, kii = spec_ii.L_perp, spec_ii.kappa_perp
    ci = li * li * ki_ / 4.0
    cii = lii * lii * kii / 4.0
    alpha, beta = ci + cii, abs(ci - cii)
    gamma = (li * li + lii * lii) / 8.0
    const = ((math.pi / 2.0) ** 2 * li ** 2 * lii ** 2
             * math.exp(-(li ** 2 * ki_ ** 2 + lii ** 2 * kii ** 2) / 4.0))
    k = np.asarray(k, dtype=float)
    gauss_log = -gamma * k * k

    def bessel_term(c: float) -> np.ndarray:
        arg = c * k
        return scipy.special.i0e(arg) * np.exp(arg + gauss_log)

    ang = (math.pi / 2.0) * (bessel_term(math.sqrt(2.0) * alpha)
                             - 2.0 * bessel_term(math.hypot(alpha, beta))
                             + bessel_term(math.sqrt(2.0) * beta))
    return const * ang


def transverse_radial_weight_numeric(k: np.ndarray, spec_i: WavepacketSpec,
                                     spec_ii: WavepacketSpec,
                                     n_phi: int = 4096) -> np.ndarray:
    """Direct angular quadrature of the transverse weight (validation path)."""
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    out = np.empty(np.shape(k))
    for idx, kv in enumerate(np.atleast_1d(k)):
        kx = kv * np.cos(phi)
        ky = kv * np.sin(phi)

        def t_mag(s, u):
            return (math.sqrt(math.pi / 2.0) * s.L_perp
                    * np.exp(-s.L_perp ** 2 * (u * u + s.kappa_perp ** 2) / 8.0)
                    * np.sinh(s.L_perp ** 2 * s.kappa_perp * u / 4.0))

        prod = (t_mag(spec_i, kx) * t_mag(spec_ii, kx)
                * t_mag(spec_i, ky) * t_mag(spec_ii, ky))
        out[idx] = np.sum(prod) * (2.0 * math.pi / n_phi)
    return out


def _omega_weight(name: str, omega: np.ndarray, a: float) -> np.ndarray:
    """Stable thermal weights paired with the scaled mode normalization."""
    nu = np.asarray(omega, dtype=float) / a
    if name == "norm":          # plain |amplitude|^2 measure
        return np.ones_like(nu)
    if name == "thermal":       # e^{-pi nu} / sinh with B^2 folded: e^{-2 pi nu}
        return np.exp(-2.0 * math.pi * nu)
    if name == "counter":       # 1 / sinh with B^2 folded: e^{-pi nu}
        return np.exp(-math.pi * nu)
    if name == "parallel":      # e^{+pi nu} / sinh with B^2 folded: 1
        return np.ones_like(nu)
    raise ValueError(f"unknown weight {name!r}")


def radial_pair_integral(rad_i: RadialSpectrum, rad_ii: RadialSpectrum,
                         weight: str, tol: float = 1e-9,
                         conj_ii: bool = False) -> quad.QuadResult:
    """Int dOmega w(Omega) Int k dk W_T(k) s_i(Omega,mu) s_ii(Omega,mu).

    Shared building block of the norm and the equal-frequency noise
    integrals.  The transverse weight subsumes the angular integral; the
    prefactor bookkeeping (powers of pi and a) lives in the callers.
    The radial profiles are real, so ``conj_ii`` only matters for dense
    generality and is accepted for interface symmetry.
    """
    del conj_ii  # radial profiles are real by construction
    a = rad_i.a
    spec_i, spec_ii = rad_i.spec, rad_ii.spec
    k_hi = transverse_k_cutoff(spec_i, spec_ii)
    nodes, wts = np.polynomial.legendre.leggauss(64)
    k_nodes = 0.5 * k_hi * (nodes + 1.0)
    k_wts = 0.5 * k_hi * wts
    wt_k = transverse_radial_weight(k_nodes, spec_i, spec_ii) * k_nodes * k_wts
    mu_nodes = np.sqrt(k_nodes ** 2 + spec_i.m ** 2)
    mu_lo = max(rad_i.mu_axis[0], rad_ii.mu_axis[0])
    mu_hi = min(rad_i.mu_axis[-1], rad_ii.mu_axis[-1])
    mu_nodes = np.clip(mu_nodes, mu_lo, mu_hi)
    omega_hi = min(rad_i.omega_max, rad_ii.omega_max)

    def integrand(omega: float) -> complex:
        si = rad_i.s_at(omega, mu_nodes)
        sii = rad_ii.s_at(omega, mu_nodes)
        wo = float(_omega_weight(weight, np.asarray(omega), a))
        return complex(wo * np.sum(wt_k * si * sii))

    return quad.integrate_1d(integrand, 0.0, omega_hi, tol=tol)
