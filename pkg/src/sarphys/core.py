"""Core domain types, window functions, and bit-exact SLC file I/O.

All complex imagery is stored azimuth-major (rows = azimuth / slow time,
cols = range / fast time) as complex64.  The FFT convention used across the
whole package is numpy's default: unscaled forward transform, 1/N on the
inverse.  Every spectral partition identity in the higher-level modules
relies on this single convention.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import asdict, dataclass, field

import numpy as np

C = 299_792_458.0  # speed of light in vacuum, m/s (exact)

SLC_MAGIC = b"SLC1"
_HEADER = struct.Struct("<4sII")

SAMPLING_MARGIN = 1.1  # required oversampling of chirp bandwidth and Doppler bandwidth


class SarError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SarError):
    """An input violates a documented invariant."""


class FormatError(SarError):
    """A file is missing, truncated, or not in the expected format."""


class PhysicsBoundError(SarError):
    """A physics validity bound (e.g. range migration) is exceeded."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SensorParams:
    """Acquisition physics of a stripmap SAR sensor.

    Attributes
    ----------
    carrier_freq_hz : float
        Carrier frequency fc.
    chirp_bandwidth_hz : float
        Transmitted LFM chirp bandwidth B.
    pulse_duration_s : float
        Chirp duration tau.
    range_sample_rate_hz : float
        Complex baseband sampling rate in fast time; must oversample B
        by at least 10%.
    prf_hz : float
        Pulse repetition frequency; must oversample the antenna Doppler
        bandwidth 2*v/La by at least 10%.
    platform_velocity_mps : float
        Along-track platform velocity v.
    antenna_length_m : float
        Physical azimuth antenna length La.
    center_slant_range_m : float
        Slant range to scene center.
    incidence_angle_deg : float
        Local incidence angle, in (0, 90).
    """

    carrier_freq_hz: float
    chirp_bandwidth_hz: float
    pulse_duration_s: float
    range_sample_rate_hz: float
    prf_hz: float
    platform_velocity_mps: float
    antenna_length_m: float
    center_slant_range_m: float
    incidence_angle_deg: float

    def __post_init__(self):
        positive = (
            "carrier_freq_hz",
            "chirp_bandwidth_hz",
            "pulse_duration_s",
            "range_sample_rate_hz",
            "prf_hz",
            "platform_velocity_mps",
            "antenna_length_m",
            "center_slant_range_m",
        )
        for name in positive:
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValidationError(f"invalid SensorParams: {name} must be > 0, got {value}")
        if not (0.0 < self.incidence_angle_deg < 90.0):
            raise ValidationError(
                "invalid SensorParams: incidence_angle_deg must lie in (0, 90), "
                f"got {self.incidence_angle_deg}"
            )
        if self.range_sample_rate_hz < SAMPLING_MARGIN * self.chirp_bandwidth_hz:
            raise ValidationError(
                "invalid SensorParams: range_sample_rate_hz "
                f"{self.range_sample_rate_hz} < {SAMPLING_MARGIN} x chirp bandwidth"
            )
        if self.prf_hz < SAMPLING_MARGIN * self.doppler_bandwidth():
            raise ValidationError(
                f"invalid SensorParams: prf_hz {self.prf_hz} < "
                f"{SAMPLING_MARGIN} x Doppler bandwidth {self.doppler_bandwidth()}"
            )

    def wavelength(self) -> float:
        return C / self.carrier_freq_hz

    def doppler_bandwidth(self) -> float:
        """Antenna-limited Doppler bandwidth 2*v/La."""
        return 2.0 * self.platform_velocity_mps / self.antenna_length_m

    def chirp_rate(self) -> float:
        """LFM chirp rate Kr = B/tau."""
        return self.chirp_bandwidth_hz / self.pulse_duration_s

    def range_spacing_m(self) -> float:
        return C / (2.0 * self.range_sample_rate_hz)

    def azimuth_spacing_m(self) -> float:
        return self.platform_velocity_mps / self.prf_hz

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SensorParams":
        try:
            kwargs = {f: float(d[f]) for f in cls.__dataclass_fields__}
        except KeyError as e:
            raise ValidationError(f"invalid SensorParams: missing field {e.args[0]}") from None
        except (TypeError, ValueError) as e:
            raise ValidationError(f"invalid SensorParams: {e}") from None
        return cls(**kwargs)


@dataclass(frozen=True)
class ComplexImage:
    """A 2-D complex64 sample grid, azimuth-major, every sample finite."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex64, order="C", copy=True)
        if arr.ndim != 2:
            raise ValidationError(f"ComplexImage requires a 2-D array, got ndim={arr.ndim}")
        bad = ~np.isfinite(arr.view(np.float32))
        if bad.any():
            flat = int(np.flatnonzero(bad)[0]) // 2
            raise ValidationError(f"non-finite sample at index {flat}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def n_azimuth(self) -> int:
        return self.samples.shape[0]

    @property
    def n_range(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class SlcImage:
    """Single-look complex image: a 2-D complex reflectivity map plus geometry."""

    image: ComplexImage
    params: SensorParams
    azimuth_spacing_m: float
    range_spacing_m: float

    def __post_init__(self):
        _check_spacing("range_spacing_m", self.range_spacing_m, self.params.range_spacing_m())
        _check_spacing("azimuth_spacing_m", self.azimuth_spacing_m, self.params.azimuth_spacing_m())

    @classmethod
    def from_params(cls, image: ComplexImage, params: SensorParams) -> "SlcImage":
        return cls(image, params, params.azimuth_spacing_m(), params.range_spacing_m())

    @property
    def samples(self) -> np.ndarray:
        return self.image.samples


def _check_spacing(name: str, value: float, expected: float):
    if not np.isfinite(value) or value <= 0 or abs(value - expected) > 1e-9 * expected:
        raise ValidationError(
            f"metadata/dimension mismatch: {name}={value!r} inconsistent with "
            f"sensor-derived value {expected!r}"
        )


@dataclass(frozen=True)
class QuadPolImage:
    """Four co-registered SLC channels (HH, HV, VH, VV)."""

    hh: SlcImage
    hv: SlcImage
    vh: SlcImage
    vv: SlcImage
    reciprocity: bool = field(default=False)

    def __post_init__(self):
        ref = self.hh
        for name in ("hv", "vh", "vv"):
            ch = getattr(self, name)
            if ch.samples.shape != ref.samples.shape:
                raise ValidationError(f"quad-pol channel {name} dimensions differ from hh")
            if ch.params != ref.params:
                raise ValidationError(f"quad-pol channel {name} sensor params differ from hh")
            if (ch.azimuth_spacing_m, ch.range_spacing_m) != (
                ref.azimuth_spacing_m,
                ref.range_spacing_m,
            ):
                raise ValidationError(f"quad-pol channel {name} spacings differ from hh")
        if self.reciprocity:
            a, b = self.hv.samples, self.vh.samples
            scale = max(float(np.abs(a).max(initial=0.0)), float(np.abs(b).max(initial=0.0)))
            if scale > 0 and float(np.abs(a - b).max()) > 1e-6 * scale:
                raise ValidationError("reciprocity violated: hv != vh within 1e-6 relative")

    @property
    def shape(self) -> tuple:
        return self.hh.samples.shape


# ---------------------------------------------------------------------------
# window functions (periodic convention, denominator n)
# ---------------------------------------------------------------------------

WINDOW_KINDS = ("rect", "hann", "hamming")


def window(kind: str, n: int) -> np.ndarray:
    """Length-n window coefficients; periodic convention (denominator n)."""
    if n < 1:
        raise ValidationError(f"window length must be >= 1, got {n}")
    if kind == "rect":
        return np.ones(n)
    phase = 2.0 * np.pi * np.arange(n) / n
    if kind == "hann":
        return 0.5 - 0.5 * np.cos(phase)
    if kind == "hamming":
        return 0.54 - 0.46 * np.cos(phase)
    raise ValidationError(f"unknown window kind {kind!r}; expected one of {WINDOW_KINDS}")


# ---------------------------------------------------------------------------
# SLC1 binary format + JSON sidecar
# ---------------------------------------------------------------------------


def write_complex_binary(path: str, samples: np.ndarray) -> None:
    """Write the SLC1 container: magic, u32 dims, interleaved f32 LE payload."""
    arr = np.ascontiguousarray(samples, dtype="<c8")
    header = _HEADER.pack(SLC_MAGIC, arr.shape[0], arr.shape[1])
    with open(path, "wb") as f:
        f.write(header)
        f.write(arr.tobytes(order="C"))


def read_complex_binary(path: str) -> np.ndarray:
    if not os.path.isfile(path):
        raise FormatError(f"missing file: {path}")
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < _HEADER.size:
        raise FormatError(f"malformed header in {path}: file shorter than header")
    magic, n_az, n_rg = _HEADER.unpack_from(blob)
    if magic != SLC_MAGIC:
        raise FormatError(f"malformed header in {path}: bad magic {magic!r}")
    expected = n_az * n_rg * 8
    payload = blob[_HEADER.size:]
    if len(payload) != expected:
        raise FormatError(
            f"payload size mismatch in {path}: expected {expected} bytes, got {len(payload)}"
        )
    arr = np.frombuffer(payload, dtype="<c8").reshape(n_az, n_rg)
    return arr.astype(np.complex64)


def write_sidecar(path: str, mapping: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(mapping, f, indent=2, sort_keys=True)
        f.write("\n")


def read_sidecar(path: str) -> dict:
    if not os.path.isfile(path):
        raise FormatError(f"missing file: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"malformed sidecar {path}: {e}") from None


def write_slc(img: SlcImage, path: str, extra: dict | None = None) -> None:
    """Write an SlcImage as SLC1 binary plus a ``<path>.meta`` JSON sidecar.

    Bytes are deterministic for identical input; invariants are checked
    before anything is written.
    """
    meta = dict(img.params.to_dict())
    meta["azimuth_spacing_m"] = img.azimuth_spacing_m
    meta["range_spacing_m"] = img.range_spacing_m
    meta.setdefault("product", "slc")
    if extra:
        meta.update(extra)
    write_complex_binary(path, img.image.samples)
    write_sidecar(path + ".meta", meta)


def read_slc(path: str) -> SlcImage:
    """Read an SLC1 file and its sidecar; bit-exact round trip of write_slc."""
    samples = read_complex_binary(path)
    meta = read_sidecar(path + ".meta")
    params = SensorParams.from_dict(meta)
    try:
        az_sp = float(meta["azimuth_spacing_m"])
        rg_sp = float(meta["range_spacing_m"])
    except KeyError as e:
        raise FormatError(f"sidecar {path}.meta missing key {e.args[0]}") from None
    return SlcImage(ComplexImage(samples), params, az_sp, rg_sp)
