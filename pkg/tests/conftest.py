"""Shared small scenes sized so the whole suite stays fast."""

import numpy as np
import pytest

from patrec.core import AcquisitionConfig, ImageGrid, SourceSpectrum, default_dt
from patrec.forward import forward_project, forward_spectrum
from patrec.phantom import make_point

OMEGA_SMALL = 3.0e6  # band limit of the small test scene (rad/s)


@pytest.fixture(scope="session")
def small_scene():
    """4-sensor, 32x32-ROI point-source scene (the Parseval oracle scene)."""
    cfg = AcquisitionConfig(
        c0=1500.0, radius=0.02, n_sensors=4, record_t=4.0e-5, dt=default_dt(OMEGA_SMALL)
    )
    src = SourceSpectrum(OMEGA_SMALL, "hann")
    roi = ImageGrid(side=0.016, m=32)
    p0 = make_point((0.0042, 0.0021), roi)
    data = forward_project(p0, cfg, src)
    spec = forward_spectrum(p0, cfg, src)
    return dict(cfg=cfg, src=src, roi=roi, p0=p0, data=data, spec=spec)


@pytest.fixture(scope="session")
def ring_scene():
    """Well-sampled ring (64 sensors) around an off-center point source."""
    omega_max = 2.0e6
    cfg = AcquisitionConfig(
        c0=1500.0, radius=0.02, n_sensors=64, record_t=4.5e-5, dt=default_dt(omega_max)
    )
    src = SourceSpectrum(omega_max, "hann")
    roi = ImageGrid(side=0.024, m=48)
    p0 = make_point((0.0042, 0.0021), roi)
    data = forward_project(p0, cfg, src)
    return dict(cfg=cfg, src=src, roi=roi, p0=p0, data=data, omega_max=omega_max)


def rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
