"""Matched-filter image formation and impulse-response metrology.

Range compression correlates every pulse with the conjugate time-reversed
chirp replica in the frequency domain; azimuth compression correlates every
range gate with the conjugate hyperbolic reference built from that gate's
own closest-approach range (exact depth of focus, no block approximation).
Both replicas are normalized to unit energy, so a unit-reflectivity target
peaks at sqrt(n_chirp_samples * n_aperture_samples).

Valid only while range migration stays below half a cell (no RCMC), which
`echosim.migration_check` guards.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import (
    C,
    ComplexImage,
    PhysicsBoundError,
    SensorParams,
    SlcImage,
    ValidationError,
)
from .echosim import (
    MIGRATION_LIMIT_CELLS,
    BEAM_FACTOR,
    RawData,
    SceneExtent,
    aperture_time_s,
    expand_targets,
    fast_time_axis,
    slow_time_axis,
)

PSLR_SEARCH_CELLS = 20  # sidelobe search half-window around the peak
INTERP_FACTOR = 16  # zero-padded FFT oversampling for IRW/PSLR


@dataclass(frozen=True)
class FocusReport:
    peak_position: tuple  # (azimuth idx, range idx)
    peak_magnitude: float
    range_irw_m: float
    azimuth_irw_m: float
    pslr_db: float  # worst (highest) sidelobe across both axes

    def __post_init__(self):
        if not (self.range_irw_m > 0 and self.azimuth_irw_m > 0):
            raise ValidationError("IRW values must be > 0")
        if not self.pslr_db < 0:
            raise ValidationError("PSLR must be negative (sidelobe below peak)")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["peak_position"] = list(self.peak_position)
        return d


def slant_range_axis(params: SensorParams, extent: SceneExtent) -> np.ndarray:
    """Slant range of each fast-time sample (chirp-center alignment)."""
    return fast_time_axis(params, extent) * C / 2.0


def azimuth_position_axis(params: SensorParams, extent: SceneExtent) -> np.ndarray:
    return slow_time_axis(params, extent) * params.platform_velocity_mps


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def _taper(kind: str, x: np.ndarray) -> np.ndarray:
    """Window shape evaluated at normalized positions x in [0, 1]."""
    if kind == "rect":
        return np.ones_like(x)
    if kind == "hann":
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * x)
    if kind == "hamming":
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * x)
    raise ValidationError(f"unknown window kind {kind!r}")


def _wrapped_offsets(nfft: int) -> np.ndarray:
    k = np.arange(nfft)
    return np.where(k < nfft // 2, k, k - nfft)


def range_reference(params: SensorParams, nfft: int, window_kind: str = "rect") -> np.ndarray:
    """Unit-energy chirp replica, time center at index 0, negative lags wrapped."""
    fs = params.range_sample_rate_hz
    tau = params.pulse_duration_s
    t = _wrapped_offsets(nfft) / fs
    sup = np.abs(t) <= tau / 2.0
    rep = np.zeros(nfft, dtype=np.complex128)
    rep[sup] = np.exp(1j * np.pi * params.chirp_rate() * t[sup] ** 2)
    rep[sup] *= _taper(window_kind, t[sup] / tau + 0.5)
    return rep / np.linalg.norm(rep)


def azimuth_reference(
    params: SensorParams, r0_m: float, nfft: int, window_kind: str = "rect"
) -> np.ndarray:
    """Unit-energy hyperbolic azimuth replica for one range gate."""
    eta = _wrapped_offsets(nfft) / params.prf_hz
    ta = aperture_time_s(params, r0_m)
    sup = np.abs(eta) <= ta / 2.0
    r = np.hypot(r0_m, params.platform_velocity_mps * eta[sup])
    rep = np.zeros(nfft, dtype=np.complex128)
    rep[sup] = np.exp(-4j * np.pi * r / params.wavelength())
    rep[sup] *= _taper(window_kind, eta[sup] / ta + 0.5)
    return rep / np.linalg.norm(rep)


def range_compress(raw: RawData, window_kind: str = "rect") -> RawData:
    """Frequency-domain matched filtering of every pulse against the chirp."""
    n_az, n_rg = raw.samples.shape
    n_chirp = int(round(raw.params.pulse_duration_s * raw.params.range_sample_rate_hz))
    if n_chirp > n_rg:
        raise ValidationError(
            f"chirp longer than range window: {n_chirp} chirp samples, {n_rg} range samples"
        )
    nfft = _next_pow2(n_rg + n_chirp + 1)
    ref = np.conj(np.fft.fft(range_reference(raw.params, nfft, window_kind)))
    spec = np.fft.fft(raw.samples.astype(np.complex128), nfft, axis=1)
    out = np.fft.ifft(spec * ref[None, :], axis=1)[:, :n_rg]
    return RawData(ComplexImage(out), raw.params, raw.extent)


def extent_migration_cells(params: SensorParams, extent: SceneExtent) -> float:
    """Worst-case migration for any target inside the extent (at max range)."""
    r_max = params.center_slant_range_m + extent.range_window_m / 2.0
    half = aperture_time_s(params, r_max) / 2.0
    shift = np.hypot(r_max, params.platform_velocity_mps * half) - r_max
    return float(shift / params.range_spacing_m())


def azimuth_compress(rc: RawData, window_kind: str = "rect") -> SlcImage:
    """Per-gate hyperbolic matched filtering; output is the focused SLC."""
    mig = extent_migration_cells(rc.params, rc.extent)
    if mig > MIGRATION_LIMIT_CELLS:
        raise PhysicsBoundError(
            f"migration exceeds limit: {mig:.4f} > {MIGRATION_LIMIT_CELLS} range cells "
            "for targets at the far edge of the extent"
        )
    params = rc.params
    n_az, n_rg = rc.samples.shape
    r0 = slant_range_axis(params, rc.extent)
    ta_max = aperture_time_s(params, float(r0.max()))
    n_ap = int(np.ceil(ta_max * params.prf_hz)) + 2
    nfft = _next_pow2(n_az + n_ap + 1)

    eta = _wrapped_offsets(nfft)[:, None] / params.prf_hz  # (nfft, 1)
    ta = aperture_time_s(params, r0)[None, :]  # (1, n_rg)
    sup = np.abs(eta) <= ta / 2.0
    r = np.hypot(r0[None, :], params.platform_velocity_mps * eta)
    rep = np.where(sup, np.exp(-4j * np.pi / params.wavelength() * r), 0.0)
    if window_kind != "rect":
        rep = np.where(sup, rep * _taper(window_kind, np.clip(eta / ta + 0.5, 0.0, 1.0)), 0.0)
    rep /= np.linalg.norm(rep, axis=0, keepdims=True)

    spec = np.fft.fft(rc.samples.astype(np.complex128), nfft, axis=0)
    out = np.fft.ifft(spec * np.conj(np.fft.fft(rep, axis=0)), axis=0)[:n_az]
    return SlcImage.from_params(ComplexImage(out), params)


def focus(raw: RawData, window_kind: str = "rect") -> SlcImage:
    """Convenience: range then azimuth compression."""
    return azimuth_compress(range_compress(raw, window_kind), window_kind)


def ideal_psf(targets, params: SensorParams, extent: SceneExtent) -> SlcImage:
    """Direct synthesis of separable sinc responses; oracle for the full chain.

    Each point return contributes
    refl * exp(-j 4 pi R0 / lambda) * sinc((x-x0)/rho_az) * sinc((r-R0)/rho_rg)
    with first-null scales rho_rg = c/(2B) and rho_az = La / (2 * 0.886),
    matching the rect-window matched-filter mainlobes.  Anisotropy is
    ignored (isotropic oracle).
    """
    rho_rg = C / (2.0 * params.chirp_bandwidth_hz)
    rho_az = params.antenna_length_m / (2.0 * BEAM_FACTOR)
    x = azimuth_position_axis(params, extent)
    r = slant_range_axis(params, extent)
    img = np.zeros((x.size, r.size), dtype=np.complex128)
    for t in expand_targets(targets, params):
        if abs(t.azimuth_m) > extent.azimuth_window_m / 2.0 or (
            abs(t.slant_range_m - params.center_slant_range_m) > extent.range_window_m / 2.0
        ):
            raise ValidationError("target outside extent")
        kernel_az = np.sinc((x - t.azimuth_m) / rho_az)
        kernel_rg = np.sinc((r - t.slant_range_m) / rho_rg)
        phase = np.exp(-4j * np.pi * t.slant_range_m / params.wavelength())
        img += t.reflectivity * phase * np.outer(kernel_az, kernel_rg)
    return SlcImage.from_params(ComplexImage(img), params)


# ---------------------------------------------------------------------------
# impulse-response metrology
# ---------------------------------------------------------------------------


def _interp_fft(cut: np.ndarray, factor: int = INTERP_FACTOR) -> np.ndarray:
    """Band-limited oversampling by zero-padding the spectrum."""
    n = cut.size
    spec = np.fft.fft(cut)
    m = factor * n
    padded = np.zeros(m, dtype=np.complex128)
    half = n // 2
    padded[:half] = spec[:half]
    padded[m - (n - half):] = spec[half:]
    if n % 2 == 0:  # split the Nyquist bin to keep the result consistent
        padded[half] = spec[half] / 2.0
        padded[m - half] = spec[half] / 2.0
    return np.fft.ifft(padded) * factor


def _irw_pslr_1d(cut: np.ndarray, peak_idx: int, spacing_m: float) -> tuple:
    """(-3 dB width in meters, PSLR in dB, interpolated peak magnitude)."""
    y = np.abs(_interp_fft(cut))
    # hill-climb from the pixel peak so neighboring targets cannot steal it
    p = peak_idx * INTERP_FACTOR
    while 0 < p and y[p - 1] > y[p]:
        p -= 1
    while p < y.size - 1 and y[p + 1] > y[p]:
        p += 1
    peak = y[p]
    if peak <= 0:
        raise ValidationError("no dominant peak")
    limit = PSLR_SEARCH_CELLS * INTERP_FACTOR
    threshold = peak / np.sqrt(2.0)

    def crossing(step: int) -> float:
        i = p
        while y[i] > threshold:
            i += step
            if abs(i - p) > limit or i < 0 or i >= y.size:
                raise ValidationError("no dominant peak")
        prev = i - step
        frac = (threshold - y[i]) / (y[prev] - y[i])
        return i - step * frac

    width = crossing(+1) - crossing(-1)

    # first local minima bracket the mainlobe; sidelobes live beyond them
    i = p
    while i > 0 and y[i - 1] < y[i]:
        i -= 1
    j = p
    while j < y.size - 1 and y[j + 1] < y[j]:
        j += 1
    lo = max(0, p - limit)
    hi = min(y.size, p + limit + 1)
    side = max(float(y[lo:i].max(initial=0.0)), float(y[j:hi].max(initial=0.0)))
    if side <= 0:
        raise ValidationError("no sidelobe found in search window")
    pslr = 20.0 * np.log10(side / peak)
    return float(width * spacing_m / INTERP_FACTOR), float(pslr), float(peak)


def measure_response(img: SlcImage, approx_peak: tuple, search_radius: int = 4) -> FocusReport:
    """Measure IRW and PSLR around a point response.

    The peak is refined by local argmax within ``search_radius`` cells of
    ``approx_peak``, then each axis cut through the peak is oversampled 16x
    by zero-padded FFT.  The peak must keep 20 cells of context to every
    border (sidelobe search window).
    """
    mag = np.abs(img.samples)
    n_az, n_rg = mag.shape
    pa, pr = int(approx_peak[0]), int(approx_peak[1])
    if not (0 <= pa < n_az and 0 <= pr < n_rg):
        raise ValidationError(f"approx_peak {approx_peak} outside image {mag.shape}")
    a0, a1 = max(0, pa - search_radius), min(n_az, pa + search_radius + 1)
    r0, r1 = max(0, pr - search_radius), min(n_rg, pr + search_radius + 1)
    local = mag[a0:a1, r0:r1]
    da, dr = np.unravel_index(int(np.argmax(local)), local.shape)
    pa, pr = a0 + int(da), r0 + int(dr)

    margin = PSLR_SEARCH_CELLS
    if pa < margin or pa >= n_az - margin or pr < margin or pr >= n_rg - margin:
        raise ValidationError(
            f"peak on border: ({pa}, {pr}) needs {margin} cells of context in image {mag.shape}"
        )

    rg_irw, rg_pslr, rg_peak = _irw_pslr_1d(img.samples[pa, :], pr, img.range_spacing_m)
    az_irw, az_pslr, az_peak = _irw_pslr_1d(img.samples[:, pr], pa, img.azimuth_spacing_m)
    return FocusReport(
        peak_position=(pa, pr),
        peak_magnitude=max(rg_peak, az_peak),
        range_irw_m=rg_irw,
        azimuth_irw_m=az_irw,
        pslr_db=max(rg_pslr, az_pslr),
    )
