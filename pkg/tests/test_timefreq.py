import numpy as np
import pytest

from sarphys import (
    BandLimit,
    ComplexImage,
    PointTarget,
    SceneExtent,
    SlcImage,
    Spectrogram,
    ValidationError,
    behavior_descriptor,
    focus,
    project,
    simulate_raw,
    spectrogram,
)

from conftest import DESK
from util import expected_pixel


def make_spec(energies):
    e = np.asarray(energies, dtype=float)
    return Spectrogram(e, np.zeros(e.shape[0]), np.zeros(e.shape[1]), (0, 0), e.shape)


class TestSpectrogram:
    def test_parseval_on_scene(self, center_scene):
        raw, slc = center_scene
        row, col = expected_pixel(DESK, raw.extent, DESK.center_slant_range_m, 0.0)
        spec = spectrogram(slc, (row - 32, col - 32), (64, 64), 3, 3)
        patch = slc.samples[row - 32 : row + 32, col - 32 : col + 32].astype(np.complex128)
        assert spec.total_energy == pytest.approx(float(np.sum(np.abs(patch) ** 2)), rel=1e-6)

    def test_zero_patch(self, impulse_slc):
        spec = spectrogram(impulse_slc, (0, 0), (16, 16), 3, 3)  # away from the impulse
        assert not spec.energies.any()

    def test_impulse_near_uniform(self, impulse_slc):
        spec = spectrogram(impulse_slc, (15, 5), (66, 33), 3, 3)
        e = spec.energies
        assert e.max() / e.min() <= 1.1

    def test_doppler_band_concentration(self):
        band = BandLimit("doppler", DESK.prf_hz / 6.0, DESK.prf_hz / 2.0)
        t = PointTarget(DESK.center_slant_range_m, 0.0, 1.0, band)
        raw = simulate_raw([t], DESK, SceneExtent(30.0, 200.0))
        slc = focus(raw)
        row, col = expected_pixel(DESK, raw.extent, DESK.center_slant_range_m, 0.0)
        spec = spectrogram(slc, (row - 33, col - 33), (66, 66), 3, 3)
        marg = project(spec).azimuth_profile
        assert marg[-1] >= 0.90 * marg.sum()

    def test_out_of_bounds_patch(self, impulse_slc):
        with pytest.raises(ValidationError, match="outside image"):
            spectrogram(impulse_slc, (90, 0), (16, 16), 2, 2)

    def test_band_count_bounds(self, impulse_slc):
        with pytest.raises(ValidationError, match="band counts"):
            spectrogram(impulse_slc, (0, 0), (8, 8), 9, 2)

    def test_translation_roll_exact(self, center_scene):
        raw, slc = center_scene
        row, col = expected_pixel(DESK, raw.extent, DESK.center_slant_range_m, 0.0)
        patch = slc.samples[row - 32 : row + 32, col - 32 : col + 32]
        a = SlcImage.from_params(ComplexImage(patch), DESK)
        b = SlcImage.from_params(ComplexImage(np.roll(patch, (7, -3), axis=(0, 1))), DESK)
        ea = spectrogram(a, (0, 0), (64, 64), 4, 4).energies
        eb = spectrogram(b, (0, 0), (64, 64), 4, 4).energies
        assert np.allclose(ea, eb, rtol=1e-12, atol=1e-12 * ea.max())

    def test_amplitude_equivariance(self, impulse_slc):
        a = spectrogram(impulse_slc, (16, 5), (64, 32), 3, 3)
        scaled = SlcImage.from_params(ComplexImage(3.0 * impulse_slc.samples), DESK)
        b = spectrogram(scaled, (16, 5), (64, 32), 3, 3)
        assert np.allclose(b.energies, 9.0 * a.energies, rtol=1e-6)
        assert behavior_descriptor(a) == pytest.approx(behavior_descriptor(b), abs=1e-12)

    def test_negative_energies_rejected(self):
        with pytest.raises(ValidationError, match="non-negative"):
            make_spec([[1.0, -0.1], [0.0, 0.5]])

    def test_overlapped_mode(self, impulse_slc):
        # display mode: Hann-weighted circular 50% overlap; with equal band
        # sizes the windows still overlap-add to one, conserving energy
        spec = spectrogram(impulse_slc, (15, 5), (66, 33), 3, 3, overlap=True)
        assert (spec.energies >= 0).all()
        patch = impulse_slc.samples[15:81, 5:38].astype(np.complex128)
        assert spec.total_energy == pytest.approx(float(np.sum(np.abs(patch) ** 2)), rel=1e-9)


class TestProjection:
    def test_uniform(self):
        spec = make_spec(np.full((3, 3), 2.0))  # total 18
        proj = project(spec)
        assert np.allclose(proj.range_profile, [6.0, 6.0, 6.0])
        assert np.allclose(proj.azimuth_profile, [6.0, 6.0, 6.0])

    def test_one_hot(self):
        e = np.zeros((3, 4))
        e[1, 2] = 5.0
        proj = project(make_spec(e))
        assert np.array_equal(proj.range_profile, [0, 5.0, 0])
        assert np.array_equal(proj.azimuth_profile, [0, 0, 5.0, 0])

    def test_double_counting_identity(self):
        rng = np.random.default_rng(5)
        e = rng.uniform(0, 2, (5, 7))
        proj = project(make_spec(e))
        assert proj.range_profile.sum() == pytest.approx(e.sum(), rel=1e-12)
        assert proj.azimuth_profile.sum() == pytest.approx(e.sum(), rel=1e-12)


class TestBehaviorDescriptor:
    def test_uniform_is_one(self):
        assert behavior_descriptor(make_spec(np.ones((3, 3)))) == (1.0, 1.0)

    def test_one_hot_axis_is_zero(self):
        e = np.zeros((3, 3))
        e[:, 1] = 1.0  # uniform range marginal, one-hot azimuth marginal
        r, a = behavior_descriptor(make_spec(e))
        assert r == 1.0
        assert a == 0.0

    def test_hand_evaluated_marginal(self):
        # marginal [0.5, 0.25, 0.25]: (0.5*0.25*0.25)^(1/3) / (1/3) = 0.9449
        e = np.array([[0.5], [0.25], [0.25]])
        r, a = behavior_descriptor(make_spec(e))
        assert r == pytest.approx(0.944940787, abs=1e-6)
        assert a == 1.0  # single azimuth band

    def test_bounds_random(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            e = rng.uniform(0, 1, (4, 5))
            r, a = behavior_descriptor(make_spec(e))
            assert 0.0 <= r <= 1.0
            assert 0.0 <= a <= 1.0

    def test_zero_energy_rejected(self):
        with pytest.raises(ValidationError, match="zero-energy"):
            behavior_descriptor(make_spec(np.zeros((2, 2))))
