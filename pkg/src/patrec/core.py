"""Scene, grid, and signal containers shared by every stage of the pipeline.

Conventions fixed here and relied on everywhere else:

* Fourier transform with the e^{+i omega t} kernel:
  f_hat(omega) = integral f(t) e^{+i omega t} dt. Discretely that is
  ``dt * conj(rfft(f))`` on the nonnegative-frequency half; signals are
  real so the negative half is the conjugate mirror.
* Angular-frequency bins omega_k = k * d_omega with d_omega = 2 pi/(n_t dt).
* Image grids are squares centered on the origin, pixel centers at
  (i - (M-1)/2) * pitch, stored values[row=iy, col=ix].
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

BINARY_MAGIC = b"PATD"


def fft_workers() -> int:
    """Worker cap from PATREC_THREADS; defaults to 1 (fully deterministic)."""
    raw = os.environ.get("PATREC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ----------------------------------------------------------------------------
# acquisition geometry


@dataclass(frozen=True)
class AcquisitionConfig:
    """Physical scene: homogeneous medium, circular equispaced sensor array.

    theta0 rotates the whole array; the sensors stay exactly equispaced at
    theta_n = theta0 + 2 pi (n-1)/N. The default 0 puts sensor 1 at (R, 0).
    """

    c0: float = 1500.0
    radius: float = 0.1
    n_sensors: int = 16
    record_t: float = 1e-4
    dt: float = 1e-7
    theta0: float = 0.0

    @property
    def n_t(self) -> int:
        return int(round(self.record_t / self.dt)) + 1

    @property
    def h_n(self) -> float:
        """Arc step between adjacent sensors, 2 pi R / N."""
        return 2.0 * np.pi * self.radius / self.n_sensors

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_t) * self.dt

    @property
    def sensor_angles(self) -> np.ndarray:
        return self.theta0 + 2.0 * np.pi * np.arange(self.n_sensors) / self.n_sensors

    @property
    def sensor_positions(self) -> np.ndarray:
        """(N, 2) array of sensor coordinates on the circle of radius R."""
        th = self.sensor_angles
        return self.radius * np.stack([np.cos(th), np.sin(th)], axis=1)


def validate_config(config: AcquisitionConfig) -> list[str]:
    """Return every violated invariant; an empty list means the config is valid."""
    errors = []
    if not (np.isfinite(config.c0) and config.c0 > 0):
        errors.append("sound speed must be positive and finite")
    if not (np.isfinite(config.radius) and config.radius > 0):
        errors.append("array radius must be positive and finite")
    if config.n_sensors < 1:
        errors.append("sensor count must be at least 1")
    if not (np.isfinite(config.record_t) and config.record_t > 0):
        errors.append("record length must be positive and finite")
    if not (np.isfinite(config.dt) and config.dt > 0):
        errors.append("time step must be positive and finite")
    elif config.dt > config.record_t:
        errors.append("time step must not exceed the record length")
    return errors


# ----------------------------------------------------------------------------
# image grid


@dataclass
class ImageGrid:
    """Square ROI raster centered on `origin` (default the array center)."""

    side: float
    m: int
    values: np.ndarray = None
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.side <= 0 or self.m < 1:
            raise ValueError("ImageGrid needs side > 0 and m >= 1")
        if self.values is None:
            self.values = np.zeros((self.m, self.m))
        else:
            self.values = np.asarray(self.values, dtype=np.float64)
            if self.values.shape != (self.m, self.m):
                raise ValueError("values must be an m-by-m array")

    @property
    def pitch(self) -> float:
        return self.side / self.m

    def axis_coords(self, axis: int = 0) -> np.ndarray:
        """Pixel-center coordinates along one axis (0 = x, 1 = y)."""
        return self.origin[axis] + (np.arange(self.m) - (self.m - 1) / 2.0) * self.pitch

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid (X, Y) of pixel centers, each shaped (m, m) as values."""
        x = self.axis_coords(0)
        y = self.axis_coords(1)
        return np.meshgrid(x, y, indexing="xy")

    def nearest_index(self, point) -> tuple[int, int]:
        """(row, col) of the pixel nearest to a physical point; raises if outside."""
        ix = int(round((point[0] - self.origin[0]) / self.pitch + (self.m - 1) / 2.0))
        iy = int(round((point[1] - self.origin[1]) / self.pitch + (self.m - 1) / 2.0))
        if not (0 <= ix < self.m and 0 <= iy < self.m):
            raise ValueError(f"point {tuple(point)} lies outside the ROI")
        return iy, ix

    def blank_like(self) -> "ImageGrid":
        return ImageGrid(self.side, self.m, np.zeros((self.m, self.m)), self.origin)

    def with_values(self, values: np.ndarray) -> "ImageGrid":
        return ImageGrid(self.side, self.m, values, self.origin)


# ----------------------------------------------------------------------------
# source spectrum F(omega)


@dataclass(frozen=True)
class SourceSpectrum:
    """Real, even, band-limited spectral weight F(omega).

    Shapes:
      hann  -- 0.5 (1 + cos(pi omega/omega_max)) inside the band (default)
      flat  -- 1 inside the band
      gauss -- exp(-(|omega| - center)^2 / (2 sigma^2)), truncated at the band
      mix   -- sum of weighted gaussian humps, components = ((center, sigma,
               weight), ...), truncated at the band

    F vanishes for |omega| > omega_max in every shape.
    """

    omega_max: float
    shape: str = "hann"
    center: float = 0.0
    sigma: float = 0.0
    components: tuple[tuple[float, float, float], ...] = ()

    def __post_init__(self):
        if self.omega_max <= 0:
            raise ValueError("omega_max must be positive")
        if self.shape not in ("hann", "flat", "gauss", "mix"):
            raise ValueError(f"unknown source-spectrum shape {self.shape!r}")
        if self.shape == "gauss" and self.sigma <= 0:
            raise ValueError("gauss shape needs sigma > 0")
        if self.shape == "mix" and not self.components:
            raise ValueError("mix shape needs at least one component")

    def __call__(self, omega) -> np.ndarray:
        w = np.abs(np.asarray(omega, dtype=np.float64))
        inside = w <= self.omega_max
        if self.shape == "hann":
            f = 0.5 * (1.0 + np.cos(np.pi * w / self.omega_max))
        elif self.shape == "flat":
            f = np.ones_like(w)
        elif self.shape == "gauss":
            f = np.exp(-0.5 * ((w - self.center) / self.sigma) ** 2)
        else:
            f = np.zeros_like(w)
            for center, sigma, weight in self.components:
                f = f + weight * np.exp(-0.5 * ((w - center) / sigma) ** 2)
        return np.where(inside, f, 0.0)

    @property
    def omega_c(self) -> float:
        """Amplitude-weighted mean |omega| of F, the band center."""
        w = np.linspace(0.0, self.omega_max, 20001)
        f = self(w)
        denom = np.trapezoid(f, w)
        if denom <= 0:
            raise ValueError("source spectrum has zero mass")
        return float(np.trapezoid(w * f, w) / denom)

    def wavelength_c(self, c0: float) -> float:
        """Center wavelength lambda_c = 2 pi c0 / omega_c."""
        return 2.0 * np.pi * c0 / self.omega_c


# ----------------------------------------------------------------------------
# discrete Fourier transform in the paper's sign convention


def dft_forward(signal: np.ndarray, dt: float) -> np.ndarray:
    """Half-spectrum of a real time series with the e^{+i omega t} kernel.

    Returns bins k = 0..n//2 (omega_k = 2 pi k/(n dt)); the negative half is
    implicitly the Hermitian mirror. Works on the last axis of 2-D input.
    """
    signal = np.asarray(signal, dtype=np.float64)
    if signal.shape[-1] < 2:
        raise ValueError("need at least two samples")
    return dt * np.conj(sfft.rfft(signal, axis=-1))


def dft_inverse(spectrum: np.ndarray, dt: float, n_t: int) -> np.ndarray:
    """Invert `dft_forward`; exact round trip up to float rounding."""
    spectrum = np.asarray(spectrum)
    return sfft.irfft(np.conj(spectrum), n=n_t, axis=-1) / dt


def spectrum_bin_weights(n_t: int, n_bins: int) -> np.ndarray:
    """Multiplicities turning a half-spectrum sum into the full +-omega sum.

    Interior bins count twice (Hermitian mirror); the DC bin and, for even
    n_t, the Nyquist bin count once. Identical to trapezoid quadrature over
    [-omega_nyq, omega_nyq] for integrands vanishing at the ends.
    """
    w = np.full(n_bins, 2.0)
    w[0] = 1.0
    if n_t % 2 == 0 and n_bins == n_t // 2 + 1:
        w[-1] = 1.0
    return w


# ----------------------------------------------------------------------------
# sensor data and spectra


@dataclass
class SensorData:
    """Per-sensor real time series g(y_n, t_k), samples shaped (N, n_t)."""

    config: AcquisitionConfig
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        expected = (self.config.n_sensors, self.config.n_t)
        if self.samples.shape != expected:
            raise ValueError(f"samples must have shape {expected}, got {self.samples.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples must be finite")

    def spectrum(self, n_bins: int | None = None) -> "Spectrum":
        """Nonnegative-frequency spectrum; optionally truncated to n_bins."""
        values = dft_forward(self.samples, self.config.dt)
        if n_bins is not None:
            values = values[:, :n_bins]
        d_omega = 2.0 * np.pi / (self.config.n_t * self.config.dt)
        return Spectrum(self.config, values, d_omega)


@dataclass
class Spectrum:
    """Retained nonnegative-frequency bins of Hermitian sensor spectra."""

    config: AcquisitionConfig
    values: np.ndarray
    d_omega: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 2 or self.values.shape[0] != self.config.n_sensors:
            raise ValueError("values must be (N, n_omega)")
        if self.omega_max > np.pi / self.config.dt * (1 + 1e-12):
            raise ValueError("retained band exceeds the Nyquist limit")

    @property
    def n_omega(self) -> int:
        return self.values.shape[1]

    @property
    def omegas(self) -> np.ndarray:
        return np.arange(self.n_omega) * self.d_omega

    @property
    def omega_max(self) -> float:
        return (self.n_omega - 1) * self.d_omega

    def bin_weights(self) -> np.ndarray:
        return spectrum_bin_weights(self.config.n_t, self.n_omega)

    def to_series(self) -> np.ndarray:
        """Real time series on the config's time axis (Hermitian synthesis)."""
        full_bins = self.config.n_t // 2 + 1
        vals = self.values
        if self.n_omega < full_bins:
            vals = np.pad(vals, ((0, 0), (0, full_bins - self.n_omega)))
        return dft_inverse(vals, self.config.dt, self.config.n_t)


# ----------------------------------------------------------------------------
# serialization: CSV (self-describing) and the compact binary layout


def save_sensor_csv(path, data: SensorData) -> None:
    """One row per sensor; header comments carry the acquisition config."""
    cfg = data.config
    with open(path, "w") as f:
        f.write("# patrec sensor data\n")
        f.write(
            f"# c0={cfg.c0!r} radius={cfg.radius!r} n_sensors={cfg.n_sensors}"
            f" record_t={cfg.record_t!r} dt={cfg.dt!r} theta0={cfg.theta0!r}\n"
        )
        for row in data.samples:
            f.write(",".join(repr(float(v)) for v in row))
            f.write("\n")


def load_sensor_csv(path) -> SensorData:
    with open(path) as f:
        lines = [ln.rstrip("\n") for ln in f]
    header = next(ln for ln in lines if ln.startswith("# c0="))
    fields = dict(tok.split("=", 1) for tok in header[2:].split())
    cfg = AcquisitionConfig(
        c0=float(fields["c0"]),
        radius=float(fields["radius"]),
        n_sensors=int(fields["n_sensors"]),
        record_t=float(fields["record_t"]),
        dt=float(fields["dt"]),
        theta0=float(fields.get("theta0", 0.0)),
    )
    rows = [
        np.fromiter((float(v) for v in ln.split(",")), dtype=np.float64)
        for ln in lines
        if ln and not ln.startswith("#")
    ]
    return SensorData(cfg, np.vstack(rows))


def save_sensor_binary(path, data: SensorData) -> None:
    """Little-endian layout: magic 'PATD', u32 N, u32 n_t, f64 dt, f64 samples."""
    with open(path, "wb") as f:
        f.write(BINARY_MAGIC)
        f.write(struct.pack("<II", data.config.n_sensors, data.config.n_t))
        f.write(struct.pack("<d", data.config.dt))
        f.write(data.samples.astype("<f8").tobytes(order="C"))


def load_sensor_binary(path, config: AcquisitionConfig | None = None):
    """Read the binary layout; returns SensorData if a config is supplied,
    else the raw (samples, dt) pair (the layout does not store geometry)."""
    with open(path, "rb") as f:
        raw = f.read()
    buf = io.BytesIO(raw)
    if buf.read(4) != BINARY_MAGIC:
        raise ValueError("not a PATD sensor-data file")
    n, n_t = struct.unpack("<II", buf.read(8))
    (dt,) = struct.unpack("<d", buf.read(8))
    samples = np.frombuffer(buf.read(8 * n * n_t), dtype="<f8").reshape(n, n_t)
    if config is None:
        return samples.copy(), dt
    if (config.n_sensors, config.n_t) != (n, n_t) or abs(config.dt - dt) > 1e-15 * dt:
        raise ValueError("binary file does not match the supplied config")
    return SensorData(config, samples.copy())


def default_dt(omega_max: float) -> float:
    """Time step giving 2x Nyquist oversampling of an omega_max-limited band."""
    return 0.5 * np.pi / omega_max
