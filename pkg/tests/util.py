"""Independent measurement helpers for tests.

The interpolation here deliberately goes through scipy.signal.resample so
that impulse-response measurements do not share code with the package's own
metrology path.
"""

import numpy as np
from scipy.signal import resample

from sarphys import C
from sarphys.echosim import fast_time_axis, slow_time_axis


def width_3db(cut, spacing, factor=32):
    """-3 dB mainlobe width of a 1-D complex response, in axis units."""
    y = np.abs(resample(np.asarray(cut, dtype=complex), factor * len(cut)))
    p = int(np.argmax(y))
    th = y[p] / np.sqrt(2.0)
    i = p
    while y[i] > th:
        i -= 1
    left = i + (th - y[i]) / (y[i + 1] - y[i])
    j = p
    while y[j] > th:
        j += 1
    right = j - (th - y[j]) / (y[j - 1] - y[j])
    return (right - left) * spacing / factor


def pslr_db(cut, factor=32, search=20):
    """Peak-to-sidelobe ratio (dB) from the first local minima outward."""
    n = len(cut)
    y = np.abs(resample(np.asarray(cut, dtype=complex), factor * n))
    p = int(np.argmax(y))
    i = p
    while i > 0 and y[i - 1] < y[i]:
        i -= 1
    j = p
    while j < y.size - 1 and y[j + 1] < y[j]:
        j += 1
    lo = max(0, p - search * factor)
    hi = min(y.size, p + search * factor)
    side = max(y[lo:i].max(initial=0.0), y[j:hi].max(initial=0.0))
    return 20.0 * np.log10(side / y[p])


def expected_pixel(params, extent, slant_range_m, azimuth_m):
    """Ground-truth (azimuth, range) pixel of a point target."""
    t = fast_time_axis(params, extent)
    eta = slow_time_axis(params, extent)
    col = int(np.argmin(np.abs(t - 2.0 * slant_range_m / C)))
    row = int(np.argmin(np.abs(eta * params.platform_velocity_mps - azimuth_m)))
    return row, col


def random_psd(rng, n=3, scale=1.0):
    """Random PSD matrix G G^H."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (g @ g.conj().T)


def random_hermitian(rng, n=3, scale=1.0):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (g + g.conj().T)
