"""Stripmap point-target raw echo simulation with multipath returns.

Geometry is zero-squint: the beam center crosses each target at its closest
approach.  A target at closest-approach slant range R0 and along-track
position a contributes, for the pulse at slow time eta,

    refl * rect((t - 2R/c)/tau) * exp(j pi Kr (t - 2R/c)^2) * exp(-j 4 pi R / lambda)

with R(eta) = sqrt(R0^2 + v^2 (eta - a/v)^2).  The target is illuminated
while inside the 3-dB azimuth beamwidth 0.886*lambda/La, which makes the
classical stripmap azimuth resolution La/2 exact.  No antenna amplitude
taper and no 1/R^2 spreading loss are applied, so amplitude identities stay
exact.  Only single/double/triple bounce paths are modeled for multipath
targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    C,
    ComplexImage,
    PhysicsBoundError,
    SensorParams,
    ValidationError,
    read_complex_binary,
    read_sidecar,
    write_complex_binary,
    write_sidecar,
)

BEAM_FACTOR = 0.886  # 3-dB beamwidth of a uniform aperture, in lambda/La units
MIGRATION_LIMIT_CELLS = 0.5  # focusing without RCMC is valid below this bound


@dataclass(frozen=True)
class SceneExtent:
    """Scene window: slant-range span about center_slant_range_m, azimuth span about 0."""

    range_window_m: float
    azimuth_window_m: float

    def __post_init__(self):
        if not (self.range_window_m > 0 and self.azimuth_window_m > 0):
            raise ValidationError("scene extent windows must be > 0")


@dataclass(frozen=True)
class BandLimit:
    """Frequency-band anisotropy of a target's complex amplitude.

    axis is "doppler" (azimuth frequency) or "range" (range frequency);
    the contribution is bandpass filtered to [f_lo_hz, f_hi_hz) along that
    axis after synthesis.
    """

    axis: str
    f_lo_hz: float
    f_hi_hz: float

    def __post_init__(self):
        if self.axis not in ("doppler", "range"):
            raise ValidationError(f"anisotropy axis must be 'doppler' or 'range', got {self.axis!r}")
        if not self.f_lo_hz < self.f_hi_hz:
            raise ValidationError("anisotropy band requires f_lo < f_hi")


@dataclass(frozen=True)
class PointTarget:
    slant_range_m: float
    azimuth_m: float
    reflectivity: complex
    anisotropy: BandLimit | None = None

    def __post_init__(self):
        if not self.slant_range_m > 0:
            raise ValidationError("target slant_range_m must be > 0")


@dataclass(frozen=True)
class MultipathTarget:
    """Bridge-like scatterer over a reflecting plane.

    Produces three returns: the direct bounce at the deck range, a double
    bounce at the dihedral base, and a triple bounce, spaced by
    height_m * cos(incidence_angle).
    """

    deck_slant_range_m: float
    azimuth_m: float
    height_m: float
    bounce_reflectivities: tuple

    def __post_init__(self):
        if not self.deck_slant_range_m > 0:
            raise ValidationError("deck_slant_range_m must be > 0")
        if not self.height_m > 0:
            raise ValidationError("height_m must be > 0")
        refl = tuple(complex(r) for r in self.bounce_reflectivities)
        if len(refl) != 3:
            raise ValidationError("bounce_reflectivities must hold exactly 3 values")
        object.__setattr__(self, "bounce_reflectivities", refl)


@dataclass(frozen=True)
class RawData:
    """Demodulated baseband echoes: rows = pulses, cols = range samples."""

    data: ComplexImage
    params: SensorParams
    extent: SceneExtent

    def __post_init__(self):
        t = fast_time_axis(self.params, self.extent)
        eta = slow_time_axis(self.params, self.extent)
        if self.data.samples.shape != (eta.size, t.size):
            raise ValidationError(
                f"raw data shape {self.data.samples.shape} inconsistent with "
                f"extent-derived grid {(eta.size, t.size)}"
            )

    @property
    def samples(self) -> np.ndarray:
        return self.data.samples


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def aperture_time_s(params: SensorParams, slant_range_m: float) -> float:
    """Illumination time of a target: 3-dB beamwidth crossing at range R0."""
    return (
        BEAM_FACTOR
        * params.wavelength()
        * slant_range_m
        / (params.antenna_length_m * params.platform_velocity_mps)
    )


def fast_time_axis(params: SensorParams, extent: SceneExtent) -> np.ndarray:
    """Fast-time sample grid; padded by tau/2 on both sides of the range window."""
    n_window = int(round(extent.range_window_m / params.range_spacing_m()))
    n_chirp = int(round(params.pulse_duration_s * params.range_sample_rate_hz))
    r_min = params.center_slant_range_m - extent.range_window_m / 2.0
    t0 = 2.0 * r_min / C - params.pulse_duration_s / 2.0
    return t0 + np.arange(n_window + n_chirp) / params.range_sample_rate_hz


def slow_time_axis(params: SensorParams, extent: SceneExtent) -> np.ndarray:
    """Slow-time (pulse) grid centered on azimuth 0."""
    n = int(round(extent.azimuth_window_m / params.azimuth_spacing_m()))
    return (np.arange(n) - (n - 1) / 2.0) / params.prf_hz


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def multipath_ranges(target: MultipathTarget, params: SensorParams) -> tuple:
    """Slant ranges of the direct, double, and triple bounce returns."""
    delta = target.height_m * math.cos(math.radians(params.incidence_angle_deg))
    r1 = target.deck_slant_range_m
    return (r1, r1 + delta, r1 + 2.0 * delta)


def expand_targets(targets, params: SensorParams) -> list:
    """Flatten MultipathTargets into their three isotropic point returns."""
    flat = []
    for t in targets:
        if isinstance(t, MultipathTarget):
            for r, refl in zip(multipath_ranges(t, params), t.bounce_reflectivities):
                flat.append(PointTarget(r, t.azimuth_m, refl))
        elif isinstance(t, PointTarget):
            flat.append(t)
        else:
            raise ValidationError(f"unsupported target type {type(t).__name__}")
    return flat


def migration_check(targets, params: SensorParams, extent: SceneExtent) -> float:
    """Max range migration over the synthetic aperture, in range cells.

    For each point return, evaluates R(eta_edge) - R0 at the aperture edge
    directly from the hyperbolic range history.  simulate_raw and the
    focusing steps require the result <= 0.5 cells.
    """
    v = params.platform_velocity_mps
    worst = 0.0
    for t in expand_targets(targets, params):
        r0 = t.slant_range_m
        half = aperture_time_s(params, r0) / 2.0
        worst = max(worst, math.hypot(r0, v * half) - r0)
    return worst / params.range_spacing_m()


def _check_in_extent(target: PointTarget, params: SensorParams, extent: SceneExtent):
    if abs(target.azimuth_m) > extent.azimuth_window_m / 2.0:
        raise ValidationError(
            f"target outside extent: azimuth {target.azimuth_m} m exceeds "
            f"half window {extent.azimuth_window_m / 2.0} m"
        )
    dr = abs(target.slant_range_m - params.center_slant_range_m)
    if dr > extent.range_window_m / 2.0:
        raise ValidationError(
            f"target outside extent: slant range {target.slant_range_m} m is "
            f"{dr} m from center, half window {extent.range_window_m / 2.0} m"
        )


def _check_band(band: BandLimit, params: SensorParams):
    nyq = params.prf_hz / 2.0 if band.axis == "doppler" else params.range_sample_rate_hz / 2.0
    if band.f_lo_hz < -nyq or band.f_hi_hz > nyq:
        raise ValidationError(
            f"anisotropy band [{band.f_lo_hz}, {band.f_hi_hz}] Hz outside the "
            f"sampled {band.axis} bandwidth +-{nyq} Hz"
        )


def simulate_raw(targets, params: SensorParams, extent: SceneExtent) -> RawData:
    """Synthesize demodulated baseband echoes for a set of point targets.

    Contributions sum linearly; anisotropic targets are bandpass filtered
    along the requested frequency axis after synthesis.  Raises
    PhysicsBoundError when the range migration bound is exceeded.
    """
    flat = expand_targets(targets, params)
    for t in flat:
        _check_in_extent(t, params, extent)
        if t.anisotropy is not None:
            _check_band(t.anisotropy, params)
    mig = migration_check(targets, params, extent)
    if mig > MIGRATION_LIMIT_CELLS:
        raise PhysicsBoundError(
            f"migration exceeds limit: {mig:.4f} > {MIGRATION_LIMIT_CELLS} range cells"
        )

    t = fast_time_axis(params, extent)
    eta = slow_time_axis(params, extent)
    v = params.platform_velocity_mps
    lam = params.wavelength()
    kr = params.chirp_rate()
    tau = params.pulse_duration_s

    acc = np.zeros((eta.size, t.size), dtype=np.complex128)
    for tgt in flat:
        if tgt.reflectivity == 0:
            continue
        eta_c = tgt.azimuth_m / v
        gate = np.abs(eta - eta_c) <= aperture_time_s(params, tgt.slant_range_m) / 2.0
        if not gate.any():
            continue
        r = np.hypot(tgt.slant_range_m, v * (eta[gate] - eta_c))
        dt = t[None, :] - (2.0 * r / C)[:, None]
        contrib = np.where(
            np.abs(dt) <= tau / 2.0,
            np.exp(1j * np.pi * kr * dt * dt),
            0.0,
        )
        contrib *= np.exp(-4j * np.pi / lam * r)[:, None]
        block = np.zeros_like(acc)
        block[gate] = contrib
        if tgt.anisotropy is not None:
            block = _bandpass(block, tgt.anisotropy, params)
        acc += tgt.reflectivity * block

    return RawData(ComplexImage(acc), params, extent)


def _bandpass(block: np.ndarray, band: BandLimit, params: SensorParams) -> np.ndarray:
    if band.axis == "doppler":
        axis, rate = 0, params.prf_hz
    else:
        axis, rate = 1, params.range_sample_rate_hz
    freqs = np.fft.fftfreq(block.shape[axis], d=1.0 / rate)
    keep = (freqs >= band.f_lo_hz) & (freqs < band.f_hi_hz)
    spec = np.fft.fft(block, axis=axis)
    shape = [1, 1]
    shape[axis] = keep.size
    spec *= keep.reshape(shape)
    return np.fft.ifft(spec, axis=axis)


# ---------------------------------------------------------------------------
# raw data I/O (SLC1 container, product "raw")
# ---------------------------------------------------------------------------


def write_raw(raw: RawData, path: str, extra: dict | None = None) -> None:
    meta = dict(raw.params.to_dict())
    meta["azimuth_spacing_m"] = raw.params.azimuth_spacing_m()
    meta["range_spacing_m"] = raw.params.range_spacing_m()
    meta["product"] = "raw"
    meta["range_window_m"] = raw.extent.range_window_m
    meta["azimuth_window_m"] = raw.extent.azimuth_window_m
    if extra:
        meta.update(extra)
    write_complex_binary(path, raw.samples)
    write_sidecar(path + ".meta", meta)


def read_raw(path: str) -> RawData:
    samples = read_complex_binary(path)
    meta = read_sidecar(path + ".meta")
    if meta.get("product") != "raw":
        raise ValidationError(f"{path} is not a raw product (product={meta.get('product')!r})")
    params = SensorParams.from_dict(meta)
    try:
        extent = SceneExtent(float(meta["range_window_m"]), float(meta["azimuth_window_m"]))
    except KeyError as e:
        raise ValidationError(f"raw sidecar missing key {e.args[0]}") from None
    return RawData(ComplexImage(samples), params, extent)
