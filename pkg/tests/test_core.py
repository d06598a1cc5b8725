"""Containers, DFT conventions, validation, serialization."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patrec.core import (
    AcquisitionConfig,
    ImageGrid,
    SensorData,
    SourceSpectrum,
    default_dt,
    dft_forward,
    dft_inverse,
    load_sensor_binary,
    load_sensor_csv,
    save_sensor_binary,
    save_sensor_csv,
    spectrum_bin_weights,
    validate_config,
)


def dft_oracle(signal, dt):
    """Direct O(n^2) summation with the e^{+i omega t} kernel."""
    n = len(signal)
    out = np.empty(n // 2 + 1, dtype=complex)
    t = np.arange(n) * dt
    for k in range(n // 2 + 1):
        w = 2 * np.pi * k / (n * dt)
        out[k] = dt * np.sum(signal * np.exp(1j * w * t))
    return out


# ----------------------------------------------------------------------------
# acquisition config


def test_sec41_like_config_is_valid():
    cfg = AcquisitionConfig(c0=1500, radius=0.1, n_sensors=16, record_t=1.33e-4, dt=1e-7)
    assert validate_config(cfg) == []


def test_zero_sensor_count_reported():
    cfg = AcquisitionConfig(n_sensors=0)
    assert any("sensor count" in e for e in validate_config(cfg))


def test_dt_exceeding_record_reported():
    cfg = AcquisitionConfig(record_t=1e-5, dt=1e-4)
    assert any("time step" in e for e in validate_config(cfg))


def test_sensor_positions_on_circle():
    cfg = AcquisitionConfig(radius=0.07, n_sensors=13)
    r = np.linalg.norm(cfg.sensor_positions, axis=1)
    assert np.abs(r - 0.07).max() < 1e-12 * 0.07


def test_sensors_equispaced_and_h_n():
    cfg = AcquisitionConfig(radius=0.05, n_sensors=9)
    d = np.diff(cfg.sensor_angles)
    assert np.allclose(d, 2 * np.pi / 9, rtol=1e-14)
    assert cfg.h_n * cfg.n_sensors == pytest.approx(2 * np.pi * 0.05, rel=1e-12)


def test_theta0_rotates_array():
    cfg = AcquisitionConfig(radius=0.1, n_sensors=1, theta0=np.pi)
    assert cfg.sensor_positions[0] == pytest.approx([-0.1, 0.0], abs=1e-15)


# ----------------------------------------------------------------------------
# DFT conventions


def test_dc_signal_concentrates_at_zero():
    dt = 1e-3
    n = 64
    spec = dft_forward(np.ones(n), dt)
    assert spec[0] == pytest.approx(n * dt, rel=1e-12)
    assert np.abs(spec[1:]).max() < 1e-12


def test_cosine_peaks_match_direct_summation_oracle():
    rng = np.random.default_rng(7)
    dt = 2e-4
    n = 64
    t = np.arange(n) * dt
    k0 = 5
    sig = np.cos(2 * np.pi * k0 / (n * dt) * t) + 0.1 * rng.normal(size=n)
    mine = dft_forward(sig, dt)
    ref = dft_oracle(sig, dt)
    assert np.abs(mine - ref).max() < 1e-12 * np.abs(ref).max()
    # cosine at a bin center: value ~ T/2 at that bin
    clean = dft_forward(np.cos(2 * np.pi * k0 / (n * dt) * t), dt)
    assert clean[k0] == pytest.approx(n * dt / 2, rel=1e-9)


def test_roundtrip_identity():
    rng = np.random.default_rng(3)
    sig = rng.normal(size=101)
    back = dft_inverse(dft_forward(sig, 1e-6), 1e-6, 101)
    assert np.linalg.norm(back - sig) < 1e-10 * np.linalg.norm(sig)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=2, max_value=257))
def test_roundtrip_any_length(n):
    rng = np.random.default_rng(n)
    sig = rng.normal(size=n)
    back = dft_inverse(dft_forward(sig, 1e-5), 1e-5, n)
    assert np.linalg.norm(back - sig) <= 1e-10 * max(np.linalg.norm(sig), 1e-30)


def test_empty_signal_rejected():
    with pytest.raises(ValueError):
        dft_forward(np.ones(1), 1e-6)


def test_bin_weights_match_full_spectrum_sum():
    # sum over +-omega of |g_hat|^2 equals weighted half-spectrum sum (Parseval)
    rng = np.random.default_rng(11)
    for n in (32, 33):
        sig = rng.normal(size=n)
        half = dft_forward(sig, 1.0)
        w = spectrum_bin_weights(n, n // 2 + 1)
        full = np.fft.fft(sig)  # engineering sign; magnitudes match
        assert np.sum(w * np.abs(half) ** 2) == pytest.approx(
            np.sum(np.abs(full) ** 2), rel=1e-12
        )


# ----------------------------------------------------------------------------
# containers


def test_sensor_data_shape_checked():
    cfg = AcquisitionConfig(n_sensors=2, record_t=1e-5, dt=1e-6)
    with pytest.raises(ValueError):
        SensorData(cfg, np.zeros((3, cfg.n_t)))


def test_sensor_data_requires_finite():
    cfg = AcquisitionConfig(n_sensors=1, record_t=1e-5, dt=1e-6)
    bad = np.zeros((1, cfg.n_t))
    bad[0, 3] = np.nan
    with pytest.raises(ValueError):
        SensorData(cfg, bad)


def test_spectrum_inverse_is_real():
    rng = np.random.default_rng(5)
    cfg = AcquisitionConfig(n_sensors=3, record_t=1e-5, dt=1e-7)
    data = SensorData(cfg, rng.normal(size=(3, cfg.n_t)))
    spec = data.spectrum()
    back = spec.to_series()
    assert np.abs(back - data.samples).max() < 1e-10 * np.abs(data.samples).max()


def test_image_grid_centering_and_nearest():
    grid = ImageGrid(side=0.2, m=512)
    assert grid.pitch == pytest.approx(0.2 / 512)
    x = grid.axis_coords(0)
    assert x[0] == pytest.approx(-x[-1])  # symmetric about the origin
    iy, ix = grid.nearest_index((-0.0125, 0.0))
    assert abs(x[ix] + 0.0125) <= grid.pitch / 2 + 1e-15
    with pytest.raises(ValueError):
        grid.nearest_index((0.11, 0.0))


def test_source_spectrum_shapes_and_band_limit():
    f = SourceSpectrum(1e6, "hann")
    assert f(0.0) == pytest.approx(1.0)
    assert f(1e6) == pytest.approx(0.0, abs=1e-15)
    assert f(2e6) == 0.0
    assert f(-5e5) == f(5e5)  # even
    g = SourceSpectrum(1e6, "gauss", center=5e5, sigma=1e5)
    assert g(5e5) == pytest.approx(1.0)
    assert g(1.2e6) == 0.0
    m = SourceSpectrum(1e6, "mix", components=((3e5, 1e5, 1.0), (8e5, 5e4, 0.5)))
    assert m(3e5) > m(6e5)
    with pytest.raises(ValueError):
        SourceSpectrum(1e6, "boxcar")


def test_hann_omega_c_matches_closed_form():
    # for the Hann window on [0, w], mean = w (1/4 - 1/pi^2) / (1/2)
    f = SourceSpectrum(2e6, "hann")
    expected = 2e6 * (0.25 - 1 / np.pi**2) / 0.5
    assert f.omega_c == pytest.approx(expected, rel=1e-6)
    assert f.wavelength_c(1500.0) == pytest.approx(2 * np.pi * 1500 / f.omega_c, rel=1e-12)


def test_default_dt_is_twice_nyquist_oversampled():
    assert default_dt(2e6) == pytest.approx(0.25 * 2 * np.pi / 2e6, rel=1e-12)


# ----------------------------------------------------------------------------
# serialization


def _roundtrip_data():
    rng = np.random.default_rng(13)
    cfg = AcquisitionConfig(
        c0=1480.0, radius=0.05, n_sensors=4, record_t=2.4e-5, dt=3e-7, theta0=0.1
    )
    return SensorData(cfg, rng.normal(size=(4, cfg.n_t)))


def test_csv_roundtrip(tmp_path):
    data = _roundtrip_data()
    path = tmp_path / "d.csv"
    save_sensor_csv(path, data)
    back = load_sensor_csv(path)
    assert back.config == data.config
    assert np.array_equal(back.samples, data.samples)


def test_binary_roundtrip(tmp_path):
    data = _roundtrip_data()
    path = tmp_path / "d.patd"
    save_sensor_binary(path, data)
    samples, dt = load_sensor_binary(path)
    assert dt == data.config.dt
    assert np.array_equal(samples, data.samples)
    back = load_sensor_binary(path, data.config)
    assert np.array_equal(back.samples, data.samples)


def test_binary_layout_exact(tmp_path):
    data = _roundtrip_data()
    path = tmp_path / "d.patd"
    save_sensor_binary(path, data)
    raw = path.read_bytes()
    assert raw[:4] == b"PATD"
    n = int.from_bytes(raw[4:8], "little")
    n_t = int.from_bytes(raw[8:12], "little")
    assert (n, n_t) == (4, data.config.n_t)
    assert len(raw) == 4 + 4 + 4 + 8 + 8 * n * n_t


def test_binary_rejects_garbage(tmp_path):
    path = tmp_path / "x.patd"
    path.write_bytes(b"NOPE" + b"\0" * 32)
    with pytest.raises(ValueError):
        load_sensor_binary(path)
