"""Evaluation metrics: two-sample KS distance, the A_CCDF tail error, and
grid KL divergence for 2D samples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricReport:
    name: str
    value: float
    sample_sizes: tuple
    seed: int

    def __post_init__(self):
        if not (np.isfinite(self.value) and self.value >= 0):
            raise ValueError("metric value must be finite and >= 0")

    def csv_row(self) -> str:
        return f"{self.name},{self.seed},{self.value!r}"


def ks_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty sample array")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def accdf_error(real: np.ndarray, generated: np.ndarray) -> float:
    """Area between log-log complementary cdfs via matched quantiles.

    Nonpositive inputs are jointly shifted by -min+1 first; each quantile
    difference enters in absolute value.
    """
    real = np.sort(np.asarray(real, dtype=float).ravel())
    generated = np.sort(np.asarray(generated, dtype=float).ravel())
    if len(real) != len(generated):
        raise ValueError("equal sample sizes required")
    lo = min(real[0], generated[0])
    if lo <= 0:
        shift = -lo + 1.0
        real = real + shift
        generated = generated + shift
    n = len(real)
    i = np.arange(1, n + 1)
    terms = np.abs(np.log(real) - np.log(generated)) * np.log((i + 1) / i)
    return float(terms.sum())


def grid_kl(real: np.ndarray, generated: np.ndarray, bins: int = 50,
            eps: float = 1e-6) -> float:
    """KL(real-hist || generated-hist) on the real samples' 1-99 pct box."""
    real = np.asarray(real, dtype=float)
    generated = np.asarray(generated, dtype=float)
    if bins < 2:
        raise ValueError("bins must be >= 2")
    lo = np.percentile(real, 1, axis=0)
    hi = np.percentile(real, 99, axis=0)
    if np.any(hi <= lo):
        raise ValueError("degenerate bounding box")
    edges = [np.linspace(lo[j], hi[j], bins + 1) for j in range(real.shape[1])]
    hr, _ = np.histogramdd(real, bins=edges)
    hg, _ = np.histogramdd(generated, bins=edges)
    pr = hr + eps
    pg = hg + eps
    pr /= pr.sum()
    pg /= pg.sum()
    return float(np.sum(pr * np.log(pr / pg)))
