"""Numerical toolkit for Gaussian channels seen by uniformly accelerated observers.

Submodules
----------
specfun       modified Bessel functions of imaginary order, envelope kernel
quad          adaptive quadrature and the 1-D continuum Fourier transform
modes         wavepacket construction, Klein-Gordon products, mode spectra
channel       Gaussian channel (M, N) assembly for collinear scenarios
skew          rotated-frame (non-collinear) noise elements in 2+1 D
entanglement  vacuum output state and logarithmic negativity
cache         content-addressed binary disk cache
cli           configuration-driven batch front end
"""

__version__ = "0.1.0"
