"""Kernel-level image-quality theory and measurement.

One source-sensor pair (a, y) has the exact back-projection integrand

    K_BP(x, omega) = (omega^2 / c0) G0_hat(x, y, omega) conj(G0_hat(y, a, omega)),

whose far-field leading behavior splits into an isotropic main lobe
proportional to J0(omega |x-a| / c0) and, for the TR-minus-BP discrepancy,
a side lobe proportional to J1 with an e^{i Theta} geometric phase. The
closed forms here use the main-lobe normalization in which the J0 term is
exactly 2 omega c0 / (pi |y-a|); the reduced kernel 32 pi c0^3 K_BP equals
that normalization times 2 pi c0^2 (constant in omega and position, so all
dB maps and ratios are unaffected).

Measurement side: FWHM by linear interpolation of half-max crossings,
contrast as the normalized in-source peak plus the out-of-lobe side-lobe
level, grid coarseness as PPW = 2 pi c0 / (omega dx), and Shannon-style
sensor-count classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from . import specfun
from .core import AcquisitionConfig, ImageGrid

def mainlobe_per_reduced(c0: float) -> float:
    """Bridge constant: reduced kernel / (2 pi c0^2) has the closed-form
    leading term (2 omega c0 / pi |y-a|) J0."""
    return 1.0 / (2.0 * np.pi * c0**2)

FWHM_MAIN_FACTOR = 0.48  # main-lobe width in units of lambda_c
FWHM_SIDE_FACTOR = 0.40  # side-lobe width in units of lambda_c

# reference scene for sensor-count classification: 256 elements are full
# sampling at R omega_max / c0 = 0.1 * 1.82e7 / 1500
_NFULL_REF = 256.0
_RWC_REF = 0.1 * 1.82e7 / 1500.0


@dataclass(frozen=True)
class PairConfiguration:
    """One source position a, one sensor position y, and the sound speed."""

    a: tuple[float, float]
    y: tuple[float, float]
    c0: float = 1500.0

    def __post_init__(self):
        if not all(map(math.isfinite, (*self.a, *self.y, self.c0))):
            raise ValueError("positions and sound speed must be finite")
        if self.a == tuple(self.y):
            raise ValueError("source and sensor must not coincide")

    @property
    def sensor_source_distance(self) -> float:
        return math.hypot(self.y[0] - self.a[0], self.y[1] - self.a[1])


@dataclass
class QualityReport:
    """Resolution/contrast summary for one reconstructed image."""

    method: str
    fwhm: float | None
    peak: float
    side_lobe_db: float | None
    ppw: float
    regime: str

    def as_dict(self) -> dict:
        d = asdict(self)
        if d["side_lobe_db"] is not None and not math.isfinite(d["side_lobe_db"]):
            d["side_lobe_db"] = None
        return d


# ----------------------------------------------------------------------------
# kernels


def _dists(x, pair: PairConfiguration):
    x = np.asarray(x, dtype=np.float64)
    r_xa = np.linalg.norm(x - np.asarray(pair.a), axis=-1)
    r_xy = np.linalg.norm(x - np.asarray(pair.y), axis=-1)
    return r_xa, r_xy


def kernel_bp(x, omega, pair: PairConfiguration):
    """Exact pair kernel (omega^2/c0) G0_hat(x,y) conj(G0_hat(y,a))."""
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("omega must be positive")
    _, r_xy = _dists(x, pair)
    if np.any(r_xy == 0.0):
        raise ValueError("kernel is singular where x hits the sensor")
    c0 = pair.c0
    g_xy = 0.25j * specfun.hankel1(0, np.asarray(omega) * r_xy / c0)
    g_ya = 0.25j * specfun.hankel1(0, np.asarray(omega) * pair.sensor_source_distance / c0)
    return (np.asarray(omega) ** 2 / c0) * g_xy * np.conj(g_ya)


def kernel_bp_reduced(x, omega, pair: PairConfiguration):
    """Reduced kernel 32 pi c0^3 K_BP (shares its main lobe with reduced TR)."""
    return 32.0 * np.pi * pair.c0**3 * kernel_bp(x, omega, pair)


def kernel_main_lobe(x, omega, pair: PairConfiguration):
    """Leading main-lobe term (2 omega c0 / pi |y-a|) J0(omega |x-a| / c0)."""
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("omega must be positive")
    r_xa, _ = _dists(x, pair)
    d = np.asarray(omega) * r_xa / pair.c0
    return (2.0 * np.asarray(omega) * pair.c0 / (np.pi * pair.sensor_source_distance)) * (
        specfun.bessel_j(0, d)
    )


def triangle_angle_at_source(x, pair: PairConfiguration):
    """Angle Theta at vertex a opposite the side |x-y|, by the law of cosines.

    Defined as 0 when x coincides with a (degenerate triangle, continuity).
    """
    r_xa, r_xy = _dists(x, pair)
    r_ya = pair.sensor_source_distance
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_t = (r_xa**2 + r_ya**2 - r_xy**2) / (2.0 * r_xa * r_ya)
    cos_t = np.clip(cos_t, -1.0, 1.0)
    theta = np.arccos(cos_t)
    return np.where(r_xa == 0.0, 0.0, theta)


def kernel_side_lobe(x, omega, pair: PairConfiguration):
    """Leading TR-minus-BP term e^{i Theta} (2 c0^2 / pi |y-a|^2) J1(omega|x-a|/c0).

    The amplitude is omega-independent: low frequencies are exactly where
    the side lobe overtakes the (omega-proportional) main lobe.
    """
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("omega must be positive")
    r_xa, _ = _dists(x, pair)
    d = np.asarray(omega) * r_xa / pair.c0
    theta = triangle_angle_at_source(x, pair)
    amp = 2.0 * pair.c0**2 / (np.pi * pair.sensor_source_distance**2)
    return np.exp(1j * theta) * amp * specfun.bessel_j(1, d)


def asymptotic_regime_ok(x, omega, pair: PairConfiguration, threshold: float = 1.0):
    """True where omega min(|y-a|, |y-x|)/c0 clears the far-field threshold."""
    _, r_xy = _dists(x, pair)
    scale = np.minimum(r_xy, pair.sensor_source_distance)
    return np.asarray(omega) * scale / pair.c0 >= threshold


REFERENCE_OMEGA = 2.0 * np.pi * 1.0e5  # 0.1 MHz dB reference


def intensity_profile_db(
    kernel: str,
    axial_offsets: np.ndarray,
    omegas: np.ndarray,
    pair: PairConfiguration,
    reference_omega: float = REFERENCE_OMEGA,
) -> np.ndarray:
    """dB map of a pair kernel along the axial ray, per angular frequency.

    kernel = "BP" evaluates the exact reduced BP kernel; "TR_minus_BP" the
    side-lobe closed form. Values are 20 log10(|K| / |K_ref|) with the
    reference taken from the BP kernel at the source point and
    `reference_omega` (0.1 MHz by default). Rows index omegas, columns the
    axial offsets from the source toward the sensor (signed, meters).
    """
    a = np.asarray(pair.a)
    u = np.asarray(pair.y) - a
    u = u / np.linalg.norm(u)
    pts = a[None, :] + np.asarray(axial_offsets)[:, None] * u[None, :]
    scale = mainlobe_per_reduced(pair.c0)
    ref = abs(kernel_bp_reduced(a, reference_omega, pair)) * scale
    if ref == 0.0:
        raise ValueError("zero dB reference")
    out = np.empty((len(omegas), len(axial_offsets)))
    for i, w in enumerate(np.asarray(omegas, dtype=np.float64)):
        if kernel == "BP":
            vals = np.abs(kernel_bp_reduced(pts, w, pair)) * scale
        elif kernel == "TR_minus_BP":
            vals = np.abs(kernel_side_lobe(pts, w, pair))
        else:
            raise ValueError(f"unknown kernel {kernel!r}")
        with np.errstate(divide="ignore"):
            out[i] = 20.0 * np.log10(vals / ref)
    return out


# ----------------------------------------------------------------------------
# profile metrology


def measure_fwhm(profile: np.ndarray, pitch: float) -> float:
    """Width between the half-max crossings adjacent to the global peak.

    Crossings are linearly interpolated between samples. Raises ValueError
    ("unresolved") when the profile never drops below half max on one side,
    or when the peak is not positive.
    """
    v = np.asarray(profile, dtype=np.float64)
    if v.ndim != 1 or v.size < 3:
        raise ValueError("profile must be a 1-D array with at least 3 samples")
    ipk = int(np.argmax(v))
    vmax = v[ipk]
    if not (vmax > 0):
        raise ValueError("unresolved: profile peak is not positive")
    half = 0.5 * vmax

    left = None
    for i in range(ipk - 1, -1, -1):
        if v[i] < half:
            left = i + (half - v[i]) / (v[i + 1] - v[i])
            break
    right = None
    for i in range(ipk + 1, v.size):
        if v[i] < half:
            right = (i - 1) + (v[i - 1] - half) / (v[i - 1] - v[i])
            break
    if left is None or right is None:
        raise ValueError("unresolved: no half-max crossing on one side")
    return float((right - left) * pitch)


def predicted_fwhm(kind: str, wavelength_c: float) -> float:
    """Closed-form width: 0.48 lambda_c (main lobe) or 0.40 lambda_c (side lobe)."""
    if wavelength_c <= 0:
        raise ValueError("wavelength must be positive")
    if kind == "main":
        return FWHM_MAIN_FACTOR * wavelength_c
    if kind == "side":
        return FWHM_SIDE_FACTOR * wavelength_c
    raise ValueError(f"unknown lobe kind {kind!r}")


def axial_profile(image: ImageGrid, through, axis: str = "x"):
    """(offsets, values) along the grid row (axis='x') or column through a point."""
    iy, ix = image.nearest_index(through)
    if axis == "x":
        values = image.values[iy, :]
        offsets = image.axis_coords(0) - through[0]
    elif axis == "y":
        values = image.values[:, ix]
        offsets = image.axis_coords(1) - through[1]
    else:
        raise ValueError("axis must be 'x' or 'y'")
    return offsets, values.copy()


def contrast_metrics(
    image: ImageGrid,
    source_truth,
    fwhm: float | None = None,
):
    """(peak, side_lobe_db) of a normalized image against true source positions.

    peak: largest |value| within 2 pixels (Chebyshev) of any true source.
    side lobe: largest |value| outside a 3*FWHM exclusion disc around every
    source, in dB relative to the peak; -inf when that region is all zero.
    When no FWHM is supplied it is measured on the row through the first
    source, falling back to 3 pixels if unresolved.
    """
    truths = np.atleast_2d(np.asarray(source_truth, dtype=np.float64))
    if truths.size == 0:
        raise ValueError("need at least one true source position")
    vals = np.abs(image.values)
    if vals.max() > 1.0 + 1e-9:
        raise ValueError("contrast metrics expect a normalized image")

    peak = 0.0
    for t in truths:
        iy, ix = image.nearest_index(t)
        lo_y, hi_y = max(0, iy - 2), min(image.m, iy + 3)
        lo_x, hi_x = max(0, ix - 2), min(image.m, ix + 3)
        peak = max(peak, float(vals[lo_y:hi_y, lo_x:hi_x].max()))

    if fwhm is None:
        try:
            _, prof = axial_profile(image, truths[0])
            fwhm = measure_fwhm(np.abs(prof), image.pitch)
        except ValueError:
            fwhm = 3.0 * image.pitch
    radius = max(3.0 * fwhm, 3.0 * image.pitch)

    x, y = image.pixel_centers()
    excluded = np.zeros_like(vals, dtype=bool)
    for t in truths:
        excluded |= np.hypot(x - t[0], y - t[1]) <= radius
    outside = vals[~excluded]
    side = float(outside.max()) if outside.size else 0.0
    if peak == 0.0:
        raise ValueError("no signal near any true source")
    side_db = 20.0 * math.log10(side / peak) if side > 0 else float("-inf")
    return peak, side_db


def pearson_correlation(image: ImageGrid, truth: ImageGrid) -> float:
    """Pearson r between an image and a ground-truth raster (same grid)."""
    if image.values.shape != truth.values.shape:
        raise ValueError("grids must match")
    a = image.values.ravel()
    b = truth.values.ravel()
    if a.std() == 0 or b.std() == 0:
        raise ValueError("degenerate image for correlation")
    return float(np.corrcoef(a, b)[0, 1])


# ----------------------------------------------------------------------------
# sampling calculators


def ppw(dx: float, omega: float, c0: float) -> float:
    """Grid points per wavelength, 2 pi c0 / (omega dx)."""
    if dx <= 0 or omega <= 0 or c0 <= 0:
        raise ValueError("all arguments must be positive")
    return 2.0 * np.pi * c0 / (omega * dx)


def full_sampling_count(config: AcquisitionConfig, omega_max: float) -> int:
    """Sensor count treated as full sampling, scaled from the reference scene."""
    return max(1, int(round(_NFULL_REF * (config.radius * omega_max / config.c0) / _RWC_REF)))


def classify_sampling(n_sensors: int, config: AcquisitionConfig, omega_max: float) -> str:
    """'under' | 'critical' | 'full' against the scaled Shannon-style threshold.

    critical covers [N_full/4, N_full); the threshold defaults to 256
    elements for the reference scene geometry and scales with
    R omega_max / c0.
    """
    if n_sensors < 1:
        raise ValueError("sensor count must be at least 1")
    n_full = full_sampling_count(config, omega_max)
    if n_sensors >= n_full:
        return "full"
    if n_sensors >= n_full / 4.0:
        return "critical"
    return "under"
