"""Analytic frequency-domain forward model.

Sensor data is synthesized by summing the 2D free-space Green's function
G0_hat(x, y, omega) = (i/4) H_0^(1)(omega |x-y|/c0) over source pixels, so
no grid solver is involved on the data-generation side. That deliberately
breaks the inverse crime against the grid-based time-reversal solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, specfun
from .core import (
    AcquisitionConfig,
    ImageGrid,
    SensorData,
    SourceSpectrum,
    Spectrum,
    dft_inverse,
)


@dataclass(frozen=True)
class PointSource:
    """One acoustic point source strictly inside the sensor circle."""

    position: tuple[float, float]
    spectrum: SourceSpectrum


def greens0_hat(x, y, omega, c0: float):
    """Outgoing 2D Helmholtz point response (i/4) H_0^(1)(omega r / c0).

    `x` and `y` are positions with shape (..., 2); `omega` is a scalar or an
    array broadcastable against the pairwise distances. Negative omega
    returns the conjugate of the value at |omega| so that time-domain
    kernels built from the spectrum stay real. Coincident points raise
    (the kernel is singular there).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    r = np.linalg.norm(x - y, axis=-1)
    if np.any(r == 0.0):
        raise ValueError("greens0_hat is singular at coincident points")
    w = np.asarray(omega, dtype=np.float64)
    if np.any(w == 0.0):
        raise ValueError("greens0_hat requires omega != 0")
    val = 0.25j * specfun.hankel1(0, np.abs(w) * r / c0)
    val = np.where(w < 0, np.conj(val), val)
    if val.ndim == 0:
        return complex(val)
    return val


def point_source_spectrum(
    source: PointSource, sensor, config: AcquisitionConfig, n_bins: int | None = None
) -> np.ndarray:
    """Single-sensor half-spectrum -i omega F(omega) G0_hat(y, a, omega).

    The omega = 0 bin is exactly zero (the -i omega factor). Uses the same
    tabulated-Hankel path as :func:`forward_project`, so a one-pixel raster
    reproduces this spectrum exactly (scaled by the pixel area).
    """
    a = np.asarray(source.position, dtype=np.float64)
    y = np.asarray(sensor, dtype=np.float64)
    r = float(np.hypot(*(y - a)))
    if r == 0.0:
        raise ValueError("sensor coincides with the source")
    d_omega = 2.0 * np.pi / (config.n_t * config.dt)
    if n_bins is None:
        n_bins = config.n_t // 2 + 1
    omegas = np.arange(n_bins) * d_omega
    out = np.zeros(n_bins, dtype=np.complex128)
    scale = d_omega / config.c0
    j0t, y0t, du = _kernels.hankel0_table((n_bins - 1) * scale * r)
    sre = np.zeros(n_bins)
    sim = np.zeros(n_bins)
    _kernels.forward_accumulate(
        sre, sim, np.ones(1), np.array([r]), scale, j0t, y0t, du
    )
    f = source.spectrum(omegas[1:])
    out[1:] = -1j * omegas[1:] * f * 0.25j * (sre[1:] + 1j * sim[1:])
    return out


def _band_bins(config: AcquisitionConfig, spectrum: SourceSpectrum) -> int:
    """Number of DFT bins needed to cover F's support (plus the DC bin)."""
    d_omega = 2.0 * np.pi / (config.n_t * config.dt)
    full = config.n_t // 2 + 1
    return min(full, int(np.floor(spectrum.omega_max / d_omega)) + 2)


def _synthesize_bins(
    p0: ImageGrid, config: AcquisitionConfig, spectrum: SourceSpectrum, n_bins: int
) -> np.ndarray:
    """Per-sensor half-spectrum bins of the pixel-superposition forward model."""
    values = np.asarray(p0.values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("initial pressure must be finite")
    iy, ix = np.nonzero(values)
    d_omega = 2.0 * np.pi / (config.n_t * config.dt)
    spec = np.zeros((config.n_sensors, n_bins), dtype=np.complex128)
    if not iy.size:
        return spec
    xs = p0.axis_coords(0)[ix]
    ys = p0.axis_coords(1)[iy]
    if np.any(np.hypot(xs, ys) >= config.radius):
        raise ValueError("nonzero pixels must lie strictly inside the array circle")
    amps = values[iy, ix] * p0.pitch**2
    omegas = np.arange(n_bins) * d_omega
    modulation = np.zeros(n_bins, dtype=np.complex128)
    modulation[1:] = -1j * omegas[1:] * spectrum(omegas[1:]) * 0.25j
    scale = d_omega / config.c0
    max_r = max(
        float(np.hypot(xs - pos[0], ys - pos[1]).max()) for pos in config.sensor_positions
    )
    j0t, y0t, du = _kernels.hankel0_table((n_bins - 1) * scale * max_r)
    for n, pos in enumerate(config.sensor_positions):
        dists = np.hypot(xs - pos[0], ys - pos[1])
        sre = np.zeros(n_bins)
        sim = np.zeros(n_bins)
        _kernels.forward_accumulate(sre, sim, amps, dists, scale, j0t, y0t, du)
        spec[n] = modulation * (sre + 1j * sim)
    return spec


def forward_project(
    p0: ImageGrid, config: AcquisitionConfig, spectrum: SourceSpectrum
) -> SensorData:
    """Sensor data from an initial-pressure raster by pixelwise superposition.

    Every nonzero pixel acts as a point source of weight p0(x) dx^2
    (midpoint quadrature). Nonzero pixels on or outside the array circle
    are rejected. Returns real time series shaped (N, n_t).
    """
    n_bins = _band_bins(config, spectrum)
    full_bins = config.n_t // 2 + 1
    spec = np.zeros((config.n_sensors, full_bins), dtype=np.complex128)
    spec[:, :n_bins] = _synthesize_bins(p0, config, spectrum, n_bins)
    samples = dft_inverse(spec, config.dt, config.n_t)
    return SensorData(config, samples)


def forward_spectrum(
    p0: ImageGrid, config: AcquisitionConfig, spectrum: SourceSpectrum
) -> Spectrum:
    """Forward data as a band-trimmed Spectrum, synthesized directly in the
    frequency domain (bins beyond F's support are exact zeros, no transform
    round trip)."""
    n_bins = _band_bins(config, spectrum)
    d_omega = 2.0 * np.pi / (config.n_t * config.dt)
    return Spectrum(config, _synthesize_bins(p0, config, spectrum, n_bins), d_omega)
