"""Unsupervised discovery of time-frequency scattering patterns.

Spectrogram energies are gain-normalized, combined with the two flatness
descriptors, projected onto the unit sphere, and clustered with a fully
deterministic seeded k-means (k-means++ init, Lloyd iterations, empty
clusters re-seeded to the farthest sample).  The adjusted Rand index scores
agreement against a reference labeling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ValidationError
from .timefreq import Spectrogram, behavior_descriptor


@dataclass(frozen=True)
class FeatureMatrix:
    """Rows = samples on the unit sphere: normalized band energies + flatness pair."""

    x: np.ndarray  # (n_samples, dim) float64
    band_shape: tuple
    normalized: bool = True

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 2:
            raise ValidationError("feature matrix must be 2-D")
        if not np.isfinite(x).all():
            raise ValidationError("feature matrix contains non-finite values")
        object.__setattr__(self, "x", x)

    @property
    def n_samples(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class ClusterModel:
    k: int
    centroids: np.ndarray  # (k, dim)
    assignments: np.ndarray  # (n_samples,) in [0, k)
    inertia: float
    seed: int

    def __post_init__(self):
        if self.inertia < 0:
            raise ValidationError("inertia must be >= 0")


def build_features(specs: list) -> FeatureMatrix:
    """Flatten each spectrogram into a unit-norm feature row.

    Energies are divided by their total first (gain invariance), then the
    flatness pair is appended and the row is L2-normalized.  Zero-energy
    spectrograms are rejected with their index.
    """
    if not specs:
        raise ValidationError("no spectrograms given")
    shape = specs[0].energies.shape
    rows = []
    for i, spec in enumerate(specs):
        if not isinstance(spec, Spectrogram):
            raise ValidationError(f"sample {i} is not a Spectrogram")
        if spec.energies.shape != shape:
            raise ValidationError(
                f"sample {i} band shape {spec.energies.shape} differs from {shape}"
            )
        total = spec.total_energy
        if total <= 0:
            raise ValidationError(f"zero-energy sample at index {i}")
        flat = spec.energies.ravel() / total
        row = np.concatenate([flat, behavior_descriptor(spec)])
        rows.append(row / np.linalg.norm(row))
    return FeatureMatrix(np.vstack(rows), shape)


def _nearest(x: np.ndarray, centroids: np.ndarray) -> tuple:
    """(assignments, squared distance to the assigned centroid)."""
    d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assign = np.argmin(d2, axis=1)
    return assign, d2[np.arange(x.shape[0]), assign]


def _fix_empty(x, centroids, assign, dmin):
    """Re-seed each empty cluster to the currently farthest sample."""
    dmin = dmin.copy()
    for c in range(centroids.shape[0]):
        if not (assign == c).any():
            far = int(np.argmax(dmin))
            centroids[c] = x[far]
            assign[far] = c
            dmin[far] = -np.inf  # a sample re-seeds at most one cluster
    return centroids, assign


def kmeans(feats: FeatureMatrix, k: int, seed: int, max_iter: int = 100) -> ClusterModel:
    """Deterministic seeded k-means; identical inputs give identical models.

    k-means++ initialization draws from a seeded 64-bit PCG generator;
    Lloyd iterations run to an assignment fixpoint or max_iter; centroid
    updates use fixed-order summation.
    """
    x = feats.x
    n = x.shape[0]
    if k == 0:
        raise ValidationError("k must be >= 1")
    if k > n:
        raise ValidationError(f"k {k} exceeds number of samples {n}")
    if max_iter < 1:
        raise ValidationError("max_iter must be >= 1")

    rng = np.random.default_rng(seed)
    centroids = np.empty((k, x.shape[1]))
    centroids[0] = x[int(rng.integers(n))]
    d2 = ((x - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            pick = int(rng.choice(n, p=d2 / total))
        else:
            pick = int(rng.integers(n))
        centroids[j] = x[pick]
        d2 = np.minimum(d2, ((x - centroids[j]) ** 2).sum(axis=1))

    assign, dmin = _nearest(x, centroids)
    centroids, assign = _fix_empty(x, centroids, assign, dmin)
    for _ in range(max_iter):
        centroids = _update(x, assign, k)
        new, dmin = _nearest(x, centroids)
        centroids, new = _fix_empty(x, centroids, new, dmin)
        if np.array_equal(new, assign):
            break
        assign = new

    # final pass pins self-consistency: each sample sits with its nearest centroid
    assign, dmin = _nearest(x, centroids)
    return ClusterModel(k, centroids, assign, float(dmin.sum()), seed)


def _update(x: np.ndarray, assign: np.ndarray, k: int) -> np.ndarray:
    sums = np.zeros((k, x.shape[1]))
    np.add.at(sums, assign, x)  # unbuffered, fixed sample order
    counts = np.bincount(assign, minlength=k).astype(np.float64)
    return sums / counts[:, None]


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected pair-counting agreement between two labelings."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise ValidationError(f"label length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValidationError("need at least 2 samples")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    n_a, n_b = ai.max() + 1, bi.max() + 1
    table = np.bincount(ai * n_b + bi, minlength=n_a * n_b).reshape(n_a, n_b)

    def comb2(v):
        return (v * (v - 1) // 2).sum()

    sum_ij = comb2(table.astype(np.int64))
    sum_a = comb2(table.sum(axis=1).astype(np.int64))
    sum_b = comb2(table.sum(axis=0).astype(np.int64))
    n_pairs = a.size * (a.size - 1) // 2
    expected = sum_a * sum_b / n_pairs
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((sum_ij - expected) / (maximum - expected))
