"""Back-projection family of imaging functions, plus TR delegation.

The canonical BP implementation works in the frequency domain: per pixel x,

    I_BP(x) = -(h_N / 2 pi c0) * Re sum_n sum_k w_k i w_k_freq G0_hat(x, y_n)
              conj(g_hat(y_n)) d_omega,

with the Hermitian doubling weights of :func:`patrec.core.spectrum_bin_weights`
(trapezoid over bins). TBP is the same sum with bins at or above the cutoff
mu zeroed first, so mu = omega_max reproduces BP bit for bit. The direct
time-domain quadrature form is kept as a cross-check oracle; by Parseval the
two agree to float rounding on band-limited data.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import ImageGrid, SensorData, Spectrum, dft_inverse
from .wavesolver import run_time_reversal

# Pixel-sensor distances below this fraction of the array radius count as
# sensor-coincident: the Green's kernel is singular, the pixel is zeroed.
SINGULAR_FRACTION = 1e-9

# Above this many kernel evaluations (pixels * sensors * bins) the per-pixel
# exact path hands over to the radial-profile path.
EXACT_BUDGET = 3.0e8

# Radial-profile table sampling: points per wavelength of the band top.
RADIAL_OVERSAMPLE = 32.0


@dataclass
class ReconstructionRequest:
    """One reconstruction job: method, data, target grid, options."""

    method: str  # "tr" | "bp" | "tbp"
    data: SensorData
    roi: ImageGrid
    mu: float | None = None
    normalize: bool = True

    def __post_init__(self):
        self.method = self.method.lower()
        if self.method not in ("tr", "bp", "tbp"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "tbp":
            if self.mu is None or self.mu <= 0:
                raise ValueError("tbp needs a positive truncation bound mu")


def _as_spectrum(data) -> Spectrum:
    if isinstance(data, Spectrum):
        return data
    if isinstance(data, SensorData):
        return data.spectrum()
    raise TypeError("expected SensorData or Spectrum")


def _check_interior(roi: ImageGrid, radius: float) -> None:
    x, y = roi.pixel_centers()
    outside = np.hypot(x, y) >= radius
    if outside.any():
        warnings.warn(
            f"{int(outside.sum())} ROI pixels lie on or outside the sensor circle; "
            "the adjoint identities assume an interior ROI",
            stacklevel=3,
        )


def normalize_image(image: ImageGrid) -> tuple[ImageGrid, float]:
    """Divide by the maximum absolute value (first row-major pixel on ties).

    Returns the scaled image and the normalization constant (1.0 for an
    all-zero image, which is left untouched).
    """
    peak = float(np.max(np.abs(image.values)))
    if peak == 0.0:
        return image, 1.0
    return image.with_values(image.values / peak), peak


def _bp_core(
    spectrum: Spectrum,
    roi: ImageGrid,
    bin_mask: np.ndarray | None,
    mode: str,
    stats: dict | None,
) -> ImageGrid:
    cfg = spectrum.config
    n_bins = spectrum.n_omega
    d_omega = spectrum.d_omega
    omegas = spectrum.omegas
    weights = spectrum.bin_weights()
    # real per-bin prefactor of conj(g_hat); bin 0 carries no weight
    coef = (cfg.h_n / (8.0 * np.pi * cfg.c0)) * weights * omegas * d_omega
    values = spectrum.values
    if bin_mask is not None:
        values = values * bin_mask

    x, y = roi.pixel_centers()
    px = x.ravel()
    py = y.ravel()
    n_px = px.size
    out = np.zeros(n_px)
    singular_tol = SINGULAR_FRACTION * cfg.radius
    singular = np.zeros(n_px, dtype=bool)

    if mode == "auto":
        mode = "exact" if n_px * cfg.n_sensors * n_bins <= EXACT_BUDGET else "radial"

    scale = d_omega / cfg.c0
    positions = cfg.sensor_positions
    dists_all = [np.hypot(px - p[0], py - p[1]) for p in positions]
    r_max = max(float(d.max()) for d in dists_all)
    omega_top = omegas[-1] if n_bins > 1 else d_omega
    dr = 2.0 * np.pi * cfg.c0 / (omega_top * RADIAL_OVERSAMPLE)
    # cover the radial tables' overshoot past the largest pixel distance
    j0t, y0t, du = _kernels.hankel0_table((n_bins - 1) * scale * (r_max + 8 * dr))

    for n in range(cfg.n_sensors):
        dists = dists_all[n]
        bad = dists < singular_tol
        singular |= bad
        c = coef * np.conj(values[n])
        cre = np.ascontiguousarray(c.real)
        cim = np.ascontiguousarray(c.imag)
        if mode == "exact":
            d_ok = np.where(bad, singular_tol, dists)
            _kernels.bp_accumulate(out, d_ok, scale, cre, cim, j0t, y0t, du)
        else:
            r_lo = float(np.min(dists[~bad])) if (~bad).any() else singular_tol
            r_hi = float(dists.max())
            n_r = int(np.ceil((r_hi - r_lo) / dr)) + 8
            table_r = r_lo + (np.arange(n_r) - 2) * dr
            table_r = np.maximum(table_r, 0.5 * singular_tol)
            profile = np.zeros(n_r)
            _kernels.bp_accumulate(profile, table_r, scale, cre, cim, j0t, y0t, du)
            _kernels.interp_radial(profile, table_r[0], dr, dists, out)

    image = out.reshape(roi.m, roi.m)
    if singular.any():
        image.ravel()[singular] = 0.0
    if stats is not None:
        stats["singular_pixels"] = int(singular.sum())
        stats["mode"] = mode
    return roi.with_values(image)


def reconstruct_bp(data, roi: ImageGrid, mode: str = "auto", stats: dict | None = None) -> ImageGrid:
    """Frequency-domain back-projection onto the ROI grid.

    `mode` picks the evaluation path: "exact" sums Hankel kernels per pixel,
    "radial" tabulates each sensor's radial profile and interpolates (the
    profiles are exact functions of pixel-sensor distance), "auto" switches
    on problem size. Sensor-coincident pixels are zeroed and counted in
    `stats["singular_pixels"]` when a dict is passed.
    """
    spectrum = _as_spectrum(data)
    _check_interior(roi, spectrum.config.radius)
    return _bp_core(spectrum, roi, None, mode, stats)


def reconstruct_tbp(
    data, roi: ImageGrid, mu: float, mode: str = "auto", stats: dict | None = None
) -> ImageGrid:
    """Truncated back-projection: BP restricted to bins with omega < mu."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    spectrum = _as_spectrum(data)
    if mu > spectrum.omega_max * (1 + 1e-12):
        raise ValueError("mu exceeds the data band")
    _check_interior(roi, spectrum.config.radius)
    mask = (spectrum.omegas < mu).astype(np.float64)
    if stats is not None:
        stats["mu"] = float(mu)
        stats["bins_kept"] = int(mask.sum())
    return _bp_core(spectrum, roi, mask, mode, stats)


def reconstruct_bp_timedomain(data, roi: ImageGrid, stats: dict | None = None) -> ImageGrid:
    """Direct time-domain BP quadrature (retarded-time kernel); oracle path.

    Evaluates -(h_N/c0) dt sum_n sum_j a_n(x, t_j) g_n(t_j) with the kernel
    a = inverse transform of i omega G0_hat band-limited to the data band.
    Cost grows as pixels * sensors * record length; intended for small
    cross-check scenes, not production grids.
    """
    spectrum = _as_spectrum(data)
    if isinstance(data, SensorData):
        samples = data.samples
    else:
        samples = spectrum.to_series()
    cfg = spectrum.config
    _check_interior(roi, cfg.radius)
    from . import specfun  # local import keeps module load light

    omegas = spectrum.omegas
    full_bins = cfg.n_t // 2 + 1
    x, y = roi.pixel_centers()
    px = x.ravel()
    py = y.ravel()
    out = np.zeros(px.size)
    singular_tol = SINGULAR_FRACTION * cfg.radius
    singular = np.zeros(px.size, dtype=bool)
    for n, pos in enumerate(cfg.sensor_positions):
        dists = np.hypot(px - pos[0], py - pos[1])
        bad = dists < singular_tol
        singular |= bad
        d_ok = np.where(bad, singular_tol, dists)
        # kernel spectrum (n_px, n_bins): i omega (i/4) H0(omega r / c0)
        arg = np.outer(d_ok, omegas[1:]) / cfg.c0
        h = specfun.bessel_j(0, arg) + 1j * specfun.bessel_y(0, arg)
        khat = np.zeros((px.size, full_bins), dtype=np.complex128)
        khat[:, 1 : len(omegas)] = -0.25 * omegas[1:] * h
        kernel = dft_inverse(khat, cfg.dt, cfg.n_t)
        out -= (cfg.h_n / cfg.c0) * cfg.dt * kernel @ samples[n]
    image = out.reshape(roi.m, roi.m)
    if singular.any():
        image.ravel()[singular] = 0.0
    if stats is not None:
        stats["singular_pixels"] = int(singular.sum())
    return roi.with_values(image)


def reconstruct_tr(data: SensorData, roi: ImageGrid, stats: dict | None = None, **solver_kw) -> ImageGrid:
    """Time-reversal image via the pseudospectral cavity solver."""
    return run_time_reversal(data, roi, stats=stats, **solver_kw)


def recommend_mu(m: int, t_m: float, ppw_target: float) -> float:
    """Truncation bound 2 pi M / (T_M PPW) for an M-per-side ROI grid.

    T_M is the ROI traverse time (side length over sound speed); PPW_target
    is the grid coarseness one wants the kept band to respect.
    """
    if m <= 0 or t_m <= 0 or ppw_target <= 0:
        raise ValueError("all arguments must be positive")
    return 2.0 * np.pi * m / (t_m * ppw_target)


def run_request(request: ReconstructionRequest, stats: dict | None = None, **kw) -> ImageGrid:
    """Execute a ReconstructionRequest; applies the normalize flag."""
    if request.method == "bp":
        image = reconstruct_bp(request.data, request.roi, stats=stats, **kw)
    elif request.method == "tbp":
        image = reconstruct_tbp(request.data, request.roi, request.mu, stats=stats, **kw)
    else:
        image = reconstruct_tr(request.data, request.roi, stats=stats, **kw)
    if request.normalize:
        image, peak = normalize_image(image)
        if stats is not None:
            stats["normalization"] = peak
    return image
