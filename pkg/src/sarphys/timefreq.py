"""Per-target time-frequency signatures over (range frequency x Doppler).

A patch around a target is 2-D Fourier transformed and its spectrum tiled
into disjoint rectangular sub-bands; band energies follow the Parseval
convention, so the spectrogram total equals the patch energy exactly.  The
marginal profiles along each frequency axis and their spectral flatness
summarize whether a scatterer is isotropic/non-dispersive or concentrated
in some band of view angles or frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SlcImage, ValidationError
from .sublook import _band_slices


@dataclass(frozen=True)
class Spectrogram:
    """Band energies, rows = range-frequency bands, cols = Doppler bands (ascending)."""

    energies: np.ndarray  # (n_rbands, n_abands), all >= 0
    range_band_centers_hz: np.ndarray
    azimuth_band_centers_hz: np.ndarray
    patch_origin: tuple  # (azimuth idx, range idx)
    patch_size: tuple  # (n_az, n_rg)

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=np.float64)
        if e.ndim != 2:
            raise ValidationError("spectrogram energies must be 2-D")
        if (e < 0).any():
            raise ValidationError("spectrogram energies must be non-negative")
        object.__setattr__(self, "energies", e)

    @property
    def total_energy(self) -> float:
        return float(self.energies.sum())


@dataclass(frozen=True)
class SpectroProjection:
    range_profile: np.ndarray  # length n_rbands
    azimuth_profile: np.ndarray  # length n_abands


def spectrogram(
    slc: SlcImage,
    patch_origin: tuple,
    patch_size: tuple,
    n_rbands: int,
    n_abands: int,
    overlap: bool = False,
) -> Spectrogram:
    """Tile the 2-D spectrum of a patch into n_rbands x n_abands energies.

    The default disjoint rectangular tiling conserves energy exactly.  With
    ``overlap=True`` each band doubles in width (circular 50% overlap) and
    is Hann weighted, which matches the look of sliding-bandpass displays;
    that mode is for visualization and carries no exactness guarantees.
    """
    a0, r0 = int(patch_origin[0]), int(patch_origin[1])
    na, nr = int(patch_size[0]), int(patch_size[1])
    n_az, n_rg = slc.samples.shape
    if a0 < 0 or r0 < 0 or a0 + na > n_az or r0 + nr > n_rg:
        raise ValidationError(
            f"patch origin {patch_origin} size {patch_size} outside image {slc.samples.shape}"
        )
    if not (1 <= n_abands <= na and 1 <= n_rbands <= nr):
        raise ValidationError("band counts must be in [1, patch dims]")

    patch = slc.samples[a0 : a0 + na, r0 : r0 + nr].astype(np.complex128)
    spec = np.fft.fftshift(np.fft.fft2(patch))
    power = np.abs(spec) ** 2 / patch.size  # Parseval: total equals patch energy

    a_slices = _band_slices(na, n_abands)
    r_slices = _band_slices(nr, n_rbands)
    energies = np.empty((n_rbands, n_abands))
    if not overlap:
        for i, (rlo, rhi) in enumerate(r_slices):
            for j, (alo, ahi) in enumerate(a_slices):
                energies[i, j] = power[alo:ahi, rlo:rhi].sum()
    else:
        a_weights = _overlapped_weights(na, a_slices)
        r_weights = _overlapped_weights(nr, r_slices)
        for i in range(n_rbands):
            for j in range(n_abands):
                energies[i, j] = float(a_weights[j] @ power @ r_weights[i])

    f_az = np.fft.fftshift(np.fft.fftfreq(na, d=1.0 / slc.params.prf_hz))
    f_rg = np.fft.fftshift(np.fft.fftfreq(nr, d=1.0 / slc.params.range_sample_rate_hz))
    a_centers = np.array([f_az[lo:hi].mean() for lo, hi in a_slices])
    r_centers = np.array([f_rg[lo:hi].mean() for lo, hi in r_slices])
    return Spectrogram(energies, r_centers, a_centers, (a0, r0), (na, nr))


def _overlapped_weights(n_bins: int, slices: list) -> list:
    """Hann weights for bands spanning each slice plus its (wrapped) successor."""
    from .core import window

    weights = []
    for b, (lo, _) in enumerate(slices):
        nxt = slices[(b + 1) % len(slices)]
        idx = np.concatenate([np.arange(lo, slices[b][1]), np.arange(nxt[0], nxt[1])])
        idx = idx % n_bins
        w = np.zeros(n_bins)
        w[idx] = window("hann", idx.size)
        weights.append(w)
    return weights


def project(spec: Spectrogram) -> SpectroProjection:
    """Marginal energy profiles along each frequency axis."""
    return SpectroProjection(
        range_profile=spec.energies.sum(axis=1),
        azimuth_profile=spec.energies.sum(axis=0),
    )


def behavior_descriptor(spec: Spectrogram) -> tuple:
    """(range_flatness, azimuth_flatness), each in [0, 1].

    Spectral flatness (geometric over arithmetic mean) of the normalized
    marginal profile.  1 means the target responds evenly along that axis;
    0 means at least one band is empty (fully dispersive/band-limited).
    """
    total = spec.total_energy
    if total <= 0:
        raise ValidationError("zero-energy spectrogram: descriptor undefined")
    proj = project(spec)
    return (_flatness(proj.range_profile / total), _flatness(proj.azimuth_profile / total))


def _flatness(p: np.ndarray) -> float:
    if (p == 0).any():
        return 0.0
    geometric = np.exp(np.mean(np.log(p)))
    return float(geometric / np.mean(p))
