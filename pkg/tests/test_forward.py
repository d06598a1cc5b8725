"""Analytic forward model: Green's function, point sources, pixel superposition."""

import numpy as np
import pytest

from patrec.core import AcquisitionConfig, ImageGrid, SourceSpectrum, default_dt
from patrec.forward import (
    PointSource,
    forward_project,
    forward_spectrum,
    greens0_hat,
    point_source_spectrum,
)
from patrec.phantom import make_point

from conftest import rel_l2


# ----------------------------------------------------------------------------
# greens0_hat


def test_greens_large_argument_magnitude():
    # |G0_hat| ~ (1/4) sqrt(2 c0 / (pi omega r)) in the far field
    c0, r, omega = 1500.0, 0.01, 20 * 1500.0 / 0.01
    val = greens0_hat((0.0, 0.0), (r, 0.0), omega, c0)
    expected = 0.25 * np.sqrt(2 * c0 / (np.pi * omega * r))
    assert abs(val) == pytest.approx(expected, rel=0.02)


def test_greens_far_field_decay_one_over_sqrt_r():
    c0 = 1500.0
    omega = 40 * c0 / 0.01
    v1 = abs(greens0_hat((0.0, 0.0), (0.01, 0.0), omega, c0))
    v4 = abs(greens0_hat((0.0, 0.0), (0.04, 0.0), omega, c0))
    assert v1 / v4 == pytest.approx(2.0, rel=0.02)


def test_greens_singular_at_coincident_points():
    with pytest.raises(ValueError):
        greens0_hat((0.01, 0.0), (0.01, 0.0), 1e6, 1500.0)


def test_greens_negative_omega_conjugates():
    v = greens0_hat((0.0, 0.0), (0.01, 0.0), 2e6, 1500.0)
    vm = greens0_hat((0.0, 0.0), (0.01, 0.0), -2e6, 1500.0)
    assert vm == pytest.approx(np.conj(v), rel=1e-12)


def test_greens_rejects_zero_omega():
    with pytest.raises(ValueError):
        greens0_hat((0.0, 0.0), (0.01, 0.0), 0.0, 1500.0)


# ----------------------------------------------------------------------------
# point_source_spectrum


def test_zero_source_spectrum_gives_zero():
    cfg = AcquisitionConfig(radius=0.02, n_sensors=1, record_t=1e-5, dt=1e-7)
    zero_f = SourceSpectrum(1e6, "mix", components=((1e5, 1e4, 0.0),))
    src = PointSource((0.005, 0.0), zero_f)
    spec = point_source_spectrum(src, (0.02, 0.0), cfg)
    assert np.all(spec == 0)


def test_point_spectrum_dc_bin_zero_and_real_inverse():
    omega_max = 3e6
    cfg = AcquisitionConfig(radius=0.02, n_sensors=1, record_t=3e-5, dt=default_dt(omega_max))
    src = PointSource((0.005, 0.001), SourceSpectrum(omega_max, "hann"))
    spec = point_source_spectrum(src, (0.02, 0.0), cfg)
    assert spec[0] == 0
    # Hermitian extension must synthesize a real time series
    n = cfg.n_t
    full = np.zeros(n, dtype=complex)
    full[: len(spec)] = spec
    full[n - len(spec) + 1 :] = np.conj(spec[1:][::-1])[: n - len(spec) + 1 - 1 or None]
    full[-(len(spec) - 1) :] = np.conj(spec[1:])[::-1]
    series = np.fft.fft(full) / (n * cfg.dt)
    assert np.abs(series.imag).max() < 1e-10 * np.abs(series.real).max()


def test_point_spectrum_rejects_coincident_sensor():
    cfg = AcquisitionConfig(radius=0.02, n_sensors=1, record_t=1e-5, dt=1e-7)
    src = PointSource((0.02, 0.0), SourceSpectrum(1e6, "hann"))
    with pytest.raises(ValueError):
        point_source_spectrum(src, (0.02, 0.0), cfg)


def test_sec41_geometry_arrival_time():
    # source (-12.5, 0) mm, sensor (-100, 0) mm: wavefront peak at |y-a|/c0
    omega_max = 2.73e7
    cfg = AcquisitionConfig(
        c0=1500.0, radius=0.1, n_sensors=1, record_t=1.0e-4, dt=default_dt(omega_max), theta0=np.pi
    )
    assert cfg.sensor_positions[0] == pytest.approx([-0.1, 0.0])
    src = PointSource((-0.0125, 0.0), SourceSpectrum(omega_max, "hann"))
    spec = point_source_spectrum(src, cfg.sensor_positions[0], cfg)
    from patrec.core import dft_inverse

    full = np.zeros(cfg.n_t // 2 + 1, dtype=complex)
    full[: len(spec)] = spec
    g = dft_inverse(full, cfg.dt, cfg.n_t)
    t_peak = np.argmax(np.abs(g)) * cfg.dt
    t_expected = 0.0875 / 1500.0
    assert abs(t_peak - t_expected) <= cfg.dt


# ----------------------------------------------------------------------------
# forward_project


def test_zero_phantom_gives_zero_data(small_scene):
    roi = small_scene["roi"]
    cfg = small_scene["cfg"]
    data = forward_project(roi.blank_like(), cfg, small_scene["src"])
    assert np.all(data.samples == 0)


def test_single_pixel_matches_point_source(small_scene):
    p0, cfg, src, roi = (small_scene[k] for k in ("p0", "cfg", "src", "roi"))
    spec = small_scene["spec"]
    iy, ix = np.nonzero(p0.values)
    pos = (p0.axis_coords(0)[ix[0]], p0.axis_coords(1)[iy[0]])
    ps = point_source_spectrum(PointSource(pos, src), cfg.sensor_positions[0], cfg,
                               n_bins=spec.n_omega)
    scaled = ps * roi.pitch**2
    assert np.abs(spec.values[0] - scaled).max() <= 1e-12 * np.abs(scaled).max()


def test_pixel_outside_array_rejected():
    cfg = AcquisitionConfig(radius=0.005, n_sensors=2, record_t=1e-5, dt=1e-7)
    roi = ImageGrid(side=0.016, m=16)
    p0 = make_point((0.007, 0.0), roi)
    with pytest.raises(ValueError):
        forward_project(p0, cfg, SourceSpectrum(1e6, "hann"))


def test_linearity(small_scene):
    cfg, src, roi = (small_scene[k] for k in ("cfg", "src", "roi"))
    a = make_point((0.0042, 0.0021), roi)
    b = make_point((-0.0031, 0.0012), roi)
    combo = roi.with_values(2.0 * a.values + 0.5 * b.values)
    d_combo = forward_project(combo, cfg, src)
    d_a = forward_project(a, cfg, src)
    d_b = forward_project(b, cfg, src)
    lhs = d_combo.samples
    rhs = 2.0 * d_a.samples + 0.5 * d_b.samples
    assert rel_l2(lhs, rhs) < 1e-10


def test_mirror_symmetric_pixels_give_mirror_signals(small_scene):
    cfg, src, roi = (small_scene[k] for k in ("cfg", "src", "roi"))
    up = make_point((0.0042, 0.0021), roi)
    down = make_point((0.0042, -0.0021), roi)
    d_up = forward_project(up, cfg, src)
    d_down = forward_project(down, cfg, src)
    # sensors at 90 and 270 degrees swap under the mirror
    assert np.abs(d_up.samples[1] - d_down.samples[3]).max() < 1e-10 * np.abs(
        d_up.samples
    ).max()
    # the sensor on the x-axis sees identical signals
    assert np.abs(d_up.samples[0] - d_down.samples[0]).max() < 1e-10 * np.abs(
        d_up.samples
    ).max()


def test_all_time_series_real_and_finite(small_scene):
    assert np.isrealobj(small_scene["data"].samples)
    assert np.all(np.isfinite(small_scene["data"].samples))


def test_far_field_energy_halves_when_distance_doubles():
    # 2D cylindrical spreading: doubling the ring radius halves signal energy
    omega_max = 4.0e6
    src = SourceSpectrum(omega_max, "hann")
    roi = ImageGrid(side=0.004, m=8)
    p0 = make_point((0.0005, 0.0003), roi)
    energies = []
    for radius in (0.02, 0.04):
        cfg = AcquisitionConfig(
            c0=1500.0, radius=radius, n_sensors=8, record_t=8e-5, dt=default_dt(omega_max)
        )
        data = forward_project(p0, cfg, src)
        energies.append(float((data.samples**2).sum()))
    assert energies[0] / energies[1] == pytest.approx(2.0, rel=0.05)


def test_mirror_symmetric_phantom_mirror_sensors_identical(small_scene):
    cfg, src, roi = (small_scene[k] for k in ("cfg", "src", "roi"))
    sym = roi.blank_like()
    a = make_point((0.0042, 0.0021), roi)
    b = make_point((0.0042, -0.0021), roi)
    sym.values[:] = a.values + b.values
    data = forward_project(sym, cfg, src)
    # sensors at +-90 degrees record identical signals for an x-axis-symmetric source
    assert np.abs(data.samples[1] - data.samples[3]).max() < 1e-10 * np.abs(data.samples).max()
