"""Polarimetric feature synthesis from quad-pol SLC stacks.

Pauli power channels, boxcar-multilooked 3x3 coherency matrices, the
eigenvalue-based entropy / anisotropy / mean-alpha decomposition with the
standard nine-zone chart, polarization orientation angle from the coherency
cross terms, and the Frobenius-nearest positive semidefinite projection
used to repair physically inconsistent matrices.

Conventions: the scattering vector is the Pauli basis k =
(1/sqrt(2)) [HH+VV, HH-VV, 2*HVsym] with HVsym = (HV+VH)/2; entropy uses
log base 3 so H lies in [0, 1] for three eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import QuadPolImage, ValidationError

# zone boundaries of the entropy/alpha plane; H splits the chart into three
# columns and each column has its own pair of alpha splits (degrees)
_H_SPLITS = (0.5, 0.9)
_ALPHA_SPLITS = {
    "low": (42.5, 47.5),  # H < 0.5: zones 9/8/7 bottom-up
    "mid": (40.0, 50.0),  # 0.5 <= H < 0.9: zones 6/5/4
    "high": (40.0, 55.0),  # H >= 0.9: zones 3/2/1
}
_BOUNDARY_SNAP = 1e-12


@dataclass(frozen=True)
class PauliImage:
    """Raw Pauli powers (R,G,B) = (|HH-VV|^2, 2|HV|^2, |HH+VV|^2) and a display stretch."""

    power: np.ndarray  # (n_az, n_rg, 3) float64
    display: np.ndarray  # same shape, per-channel 1-99 percentile stretch into [0, 1]


@dataclass(frozen=True)
class CoherencyImage:
    """Per-pixel 3x3 Hermitian coherency matrices T = <k k^H>."""

    t: np.ndarray  # (n_az, n_rg, 3, 3) complex128
    look_window: tuple  # (w_az, w_rg)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.complex128)
        if t.ndim != 4 or t.shape[2:] != (3, 3):
            raise ValidationError("coherency image must have shape (n_az, n_rg, 3, 3)")
        object.__setattr__(self, "t", t)

    @property
    def trace(self) -> np.ndarray:
        return np.real(np.trace(self.t, axis1=2, axis2=3))


@dataclass(frozen=True)
class HAlphaImage:
    entropy: np.ndarray  # H in [0, 1]
    anisotropy: np.ndarray  # A in [0, 1]
    alpha_deg: np.ndarray  # mean alpha in [0, 90]
    zone: np.ndarray  # 1..9 per the chart; 9 also flags no-return pixels


def scattering_vectors(qp: QuadPolImage) -> np.ndarray:
    """Pauli scattering vector per pixel, (n_az, n_rg, 3) complex128."""
    hh = qp.hh.samples.astype(np.complex128)
    vv = qp.vv.samples.astype(np.complex128)
    hv = 0.5 * (qp.hv.samples.astype(np.complex128) + qp.vh.samples.astype(np.complex128))
    return np.stack([hh + vv, hh - vv, 2.0 * hv], axis=-1) / np.sqrt(2.0)


def pauli_rgb(qp: QuadPolImage) -> PauliImage:
    """Pauli power channels plus a per-channel percentile display stretch."""
    hh = qp.hh.samples.astype(np.complex128)
    vv = qp.vv.samples.astype(np.complex128)
    hv = 0.5 * (qp.hv.samples.astype(np.complex128) + qp.vh.samples.astype(np.complex128))
    # even-bounce, cross-pol, odd-bounce powers
    power = np.stack(
        [np.abs(hh - vv) ** 2, 2.0 * np.abs(hv) ** 2, np.abs(hh + vv) ** 2], axis=-1
    )
    display = np.empty_like(power)
    for c in range(3):
        p1, p99 = np.percentile(power[..., c], [1.0, 99.0])
        if p99 > p1:
            display[..., c] = np.clip((power[..., c] - p1) / (p99 - p1), 0.0, 1.0)
        else:
            display[..., c] = 0.0
    return PauliImage(power, display)


def coherency(qp: QuadPolImage, window: tuple = (1, 1)) -> CoherencyImage:
    """Boxcar-multilooked coherency T = <k k^H>; edges use truncated windows."""
    w_az, w_rg = int(window[0]), int(window[1])
    n_az, n_rg = qp.shape
    if w_az < 1 or w_rg < 1 or w_az % 2 == 0 or w_rg % 2 == 0:
        raise ValidationError(f"look window must be odd-sized and >= 1, got {window}")
    if w_az > n_az or w_rg > n_rg:
        raise ValidationError(f"look window {window} larger than image {qp.shape}")
    k = scattering_vectors(qp)
    outer = k[..., :, None] * np.conj(k[..., None, :])
    t = _boxcar_mean(outer.reshape(n_az, n_rg, 9), w_az, w_rg).reshape(n_az, n_rg, 3, 3)
    # enforce exact Hermitian symmetry against averaging round-off
    t = 0.5 * (t + np.conj(np.swapaxes(t, 2, 3)))
    return CoherencyImage(t, (w_az, w_rg))


def _boxcar_mean(img: np.ndarray, w_az: int, w_rg: int) -> np.ndarray:
    """Mean over a w_az x w_rg window, truncated at the borders.

    Summation is local to each window (no running sums), so the round-off
    at any pixel scales with that pixel's neighborhood, keeping dark-area
    matrices PSD relative to their own trace even next to bright targets.
    """
    ha, hr = w_az // 2, w_rg // 2
    n_az, n_rg = img.shape[:2]
    padded = np.zeros((n_az + 2 * ha, n_rg + 2 * hr) + img.shape[2:], dtype=img.dtype)
    padded[ha : ha + n_az, hr : hr + n_rg] = img
    view = np.lib.stride_tricks.sliding_window_view(padded, (w_az, w_rg), axis=(0, 1))
    total = view.sum(axis=(-2, -1))
    a = np.arange(n_az)
    r = np.arange(n_rg)
    count = (np.minimum(a + ha + 1, n_az) - np.maximum(a - ha, 0))[:, None] * (
        np.minimum(r + hr + 1, n_rg) - np.maximum(r - hr, 0)
    )[None, :]
    return total / count.reshape(count.shape + (1,) * (img.ndim - 2))


def h_alpha(cov: CoherencyImage) -> HAlphaImage:
    """Eigenvalue decomposition of T into entropy, anisotropy, mean alpha, zone.

    Per pixel with descending eigenvalues l1 >= l2 >= l3 and pseudo
    probabilities p_i = l_i / sum(l): H = -sum p_i log3 p_i, alpha_i =
    arccos(|e_i[0]|), mean alpha = sum p_i alpha_i, A = (l2-l3)/(l2+l3).
    Zero-trace pixels get H = A = alpha = 0 and zone 9 (no return).
    """
    t = cov.t
    trace = cov.trace
    lam, vec = np.linalg.eigh(t)
    lam = lam[..., ::-1]  # descending
    vec = vec[..., ::-1]
    tol = -1e-9 * np.maximum(trace, np.finfo(float).tiny)[..., None]
    if (lam < tol).any():
        idx = np.argwhere(lam < tol)[0]
        raise ValidationError(
            f"coherency matrix not PSD within tolerance at pixel ({idx[0]}, {idx[1]})"
        )
    lam = np.clip(lam, 0.0, None)

    valid = trace > 0
    total = np.where(valid, trace, 1.0)
    p = lam / total[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)) / np.log(3.0), 0.0)
    entropy = np.where(valid, -(p * logs).sum(axis=-1), 0.0)

    alpha_i = np.degrees(np.arccos(np.clip(np.abs(vec[..., 0, :]), 0.0, 1.0)))
    alpha = np.where(valid, (p * alpha_i).sum(axis=-1), 0.0)

    denom = lam[..., 1] + lam[..., 2]
    anis = np.where(denom > 0, (lam[..., 1] - lam[..., 2]) / np.where(denom > 0, denom, 1.0), 0.0)
    anis = np.where(valid, anis, 0.0)

    entropy = np.clip(entropy, 0.0, 1.0)
    alpha = np.clip(alpha, 0.0, 90.0)
    zone = classify_zone(entropy, alpha)
    zone = np.where(valid, zone, 9)
    return HAlphaImage(entropy, anis, alpha, zone)


def classify_zone(entropy, alpha_deg):
    """Zone 1..9 from the entropy/alpha chart; boundaries go to the lower index.

    Values within 1e-12 of a boundary are snapped onto it first, so the
    assignment is stable under round-off perturbation.
    """
    h = np.asarray(entropy, dtype=np.float64)
    a = np.asarray(alpha_deg, dtype=np.float64)
    if ((h < 0) | (h > 1)).any():
        raise ValidationError("entropy outside [0, 1]")
    if ((a < 0) | (a > 90)).any():
        raise ValidationError("alpha outside [0, 90] degrees")
    h = _snap(h, _H_SPLITS)
    zone = np.empty(np.broadcast(h, a).shape, dtype=np.int64)
    low, high = h < _H_SPLITS[0], h >= _H_SPLITS[1]
    mid = ~(low | high)
    for mask, col, base in ((low, "low", 9), (mid, "mid", 6), (high, "high", 3)):
        s1, s2 = _ALPHA_SPLITS[col]
        a_col = _snap(a, (s1, s2))
        # base = bottom zone of the column; higher alpha -> lower zone index
        z = np.full(zone.shape, base, dtype=np.int64)
        z[a_col >= s1] = base - 1
        z[a_col >= s2] = base - 2
        zone[mask] = z[mask]
    if zone.ndim == 0:
        return int(zone)
    return zone


def _snap(values: np.ndarray, boundaries) -> np.ndarray:
    out = np.array(values, dtype=np.float64, copy=True)
    for b in boundaries:
        out[np.abs(out - b) <= _BOUNDARY_SNAP] = b
    return out


def orientation_angle(cov: CoherencyImage) -> np.ndarray:
    """Polarization orientation angle per pixel, degrees in (-45, 45].

    Standard circular-polarization estimator from the coherency terms:
    4*theta = atan2(-2 Re(T23), T33 - T22) + pi, wrapped by 90 degrees.
    Pixels with T22 == T33 and Re(T23) == 0 have no defined orientation and
    return 0 by convention.
    """
    t = cov.t
    y = -2.0 * np.real(t[..., 1, 2])
    x = np.real(t[..., 2, 2] - t[..., 1, 1])
    theta = np.degrees(np.arctan2(y, x) + np.pi) / 4.0
    theta = np.where(theta > 45.0, theta - 90.0, theta)
    return np.where((x == 0) & (y == 0), 0.0, theta)


def psd_project(t: np.ndarray) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix to a Hermitian input.

    Eigen-decomposes, clips negative eigenvalues to zero, reconstructs.
    Accepts a single 3x3 matrix or any (..., n, n) stack.  Idempotent and
    the identity on PSD inputs.
    """
    arr = np.asarray(t, dtype=np.complex128)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
        raise ValidationError("psd_project expects square matrices")
    herm_err = np.abs(arr - np.conj(np.swapaxes(arr, -1, -2))).max()
    if herm_err > 1e-9:
        raise ValidationError(f"non-Hermitian input: max asymmetry {herm_err:.3e} > 1e-9")
    lam, vec = np.linalg.eigh(arr)
    lam = np.clip(lam, 0.0, None)
    out = (vec * lam[..., None, :]) @ np.conj(np.swapaxes(vec, -1, -2))
    return 0.5 * (out + np.conj(np.swapaxes(out, -1, -2)))
