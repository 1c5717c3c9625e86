import numpy as np
import pytest

from sarphys import (
    ComplexImage,
    PointTarget,
    SceneExtent,
    SensorParams,
    SlcImage,
    focus,
    simulate_raw,
)

# desk-scale defaults used throughout: X band, 100 MHz chirp, 2 m antenna
DESK = SensorParams(
    carrier_freq_hz=9.6e9,
    chirp_bandwidth_hz=100e6,
    pulse_duration_s=10e-6,
    range_sample_rate_hz=120e6,
    prf_hz=180.0,
    platform_velocity_mps=150.0,
    antenna_length_m=2.0,
    center_slant_range_m=10e3,
    incidence_angle_deg=60.0,
)

# shorter chirp and range for cheap bulk simulations (clustering, CLI)
FAST = SensorParams(
    carrier_freq_hz=9.6e9,
    chirp_bandwidth_hz=100e6,
    pulse_duration_s=2e-6,
    range_sample_rate_hz=120e6,
    prf_hz=200.0,
    platform_velocity_mps=150.0,
    antenna_length_m=2.0,
    center_slant_range_m=5e3,
    incidence_angle_deg=60.0,
)

DESK_EXTENT = SceneExtent(60.0, 200.0)
FAST_EXTENT = SceneExtent(20.0, 90.0)


@pytest.fixture(scope="session")
def desk_params():
    return DESK


@pytest.fixture(scope="session")
def fast_params():
    return FAST


@pytest.fixture(scope="session")
def center_scene():
    """Single unit target at scene center: (raw, slc)."""
    raw = simulate_raw([PointTarget(DESK.center_slant_range_m, 0.0, 1.0 + 0j)], DESK, DESK_EXTENT)
    return raw, focus(raw)


@pytest.fixture(scope="session")
def impulse_slc():
    """Flat-spectrum isotropic target: a unit pixel impulse (96x42 grid)."""
    img = np.zeros((96, 42), dtype=np.complex64)
    img[48, 21] = 1.0
    return SlcImage.from_params(ComplexImage(img), DESK)


def make_quadpol(params, values, shape=(6, 6)):
    """Constant-scene quad-pol stack from per-channel complex values."""
    from sarphys import QuadPolImage

    def ch(v):
        return SlcImage.from_params(
            ComplexImage(np.full(shape, v, dtype=np.complex64)), params
        )

    hh, hv, vh, vv = values
    return QuadPolImage(ch(hh), ch(hv), ch(vh), ch(vv))
