"""Differentiable surrogate of the rank histogram and its l1 loss.

A logistic indicator softly counts how many reference points lie above a
probe, a Gaussian kernel spreads that count into a soft one-hot over the
K+1 rank bins, and the loss is the plain l1 distance between the averaged
soft histogram and the uniform pmf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Value


@dataclass(frozen=True)
class SurrogateConfig:
    # None = scale-aware default, 0.1 x batch std of the reference side
    sigmoid_temperature: float | None = None
    onehot_bandwidth: float = 0.5

    def __post_init__(self):
        if self.sigmoid_temperature is not None and self.sigmoid_temperature <= 0:
            raise ValueError("sigmoid_temperature must be > 0")
        if self.onehot_bandwidth <= 0:
            raise ValueError("onehot_bandwidth must be > 0")

    def temperature_for(self, reference: np.ndarray) -> float:
        if self.sigmoid_temperature is not None:
            return self.sigmoid_temperature
        ref = np.asarray(reference, dtype=float)
        # robust scale: IQR-matched sigma so heavy tails cannot blow it up
        q75, q25 = np.percentile(ref, [75, 25])
        s = (q75 - q25) / 1.349
        return 0.1 * s if s > 0 else 0.1


def _as_value(x) -> Value:
    return x if isinstance(x, Value) else Value(x)


def soft_indicator(a, b, temperature: float):
    """Soft [a <= b]: logistic((b - a) / temperature)."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    return ((_as_value(b) - _as_value(a)) * (1.0 / temperature)).sigmoid()


def soft_count(ytilde, reals, cfg: SurrogateConfig):
    """Differentiable rank count of ytilde against the reals.

    Gradient flows to ytilde only; the reals enter as constants.
    """
    reals = np.asarray(reals.data if isinstance(reals, Value) else reals, dtype=float)
    tau = cfg.temperature_for(reals)
    y = _as_value(ytilde)
    return ((-y + reals) * (1.0 / tau)).sigmoid().sum()


def soft_one_hot(a, length: int, bandwidth: float):
    """Soft one-hot of a over bins {0..length-1}: Gaussian kernel, sum 1."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    a = _as_value(a)
    d = a - np.arange(length, dtype=float)
    w = (d * d * (-0.5 / bandwidth**2)).exp()
    return w / w.sum()


def surrogate_loss(generated, reals, k: int, cfg: SurrogateConfig,
                   orientation: str = "dual", rng: np.random.Generator | None = None,
                   temperature_scale: float = 1.0):
    """l1 deviation of the soft rank histogram from uniform.

    Dual orientation ranks each generated point against every size-k subset
    of a partition of the reals; classical swaps the roles (real probes,
    generated subsets, with gradients flowing through the subsets).  The
    partition is a shuffle when rng is given, otherwise the given order.
    """
    generated = _as_value(generated)
    reals = np.asarray(reals, dtype=float).ravel()
    if generated.data.ndim != 1:
        raise ValueError("generated must be a flat array")

    if orientation == "dual":
        if len(reals) < k:
            raise ValueError(f"need at least k={k} reals")
        n_sub = len(reals) // k
        idx = np.arange(n_sub * k)
        if rng is not None:
            idx = rng.permutation(len(reals))[: n_sub * k]
        subsets = Value(reals[idx].reshape(n_sub, k))
        probes = generated.reshape(-1, 1, 1)
        tau = temperature_scale * cfg.temperature_for(reals)
    elif orientation == "classical":
        if generated.data.size < k:
            raise ValueError(f"need at least k={k} generated samples")
        n_sub = generated.data.size // k
        idx = np.arange(n_sub * k)
        if rng is not None:
            idx = rng.permutation(generated.data.size)[: n_sub * k]
        subsets = generated[idx].reshape(n_sub, k)
        probes = Value(reals.reshape(-1, 1, 1))
        tau = temperature_scale * cfg.temperature_for(generated.data)
    else:
        raise ValueError(f"unknown orientation {orientation!r}")

    # soft count of subset entries at or above each probe: (probes, subsets)
    counts = ((subsets.reshape(1, n_sub, k) - probes) * (1.0 / tau)).sigmoid().sum(axis=2)
    n_probe = counts.shape[0]

    d = counts.reshape(n_probe, n_sub, 1) - np.arange(k + 1, dtype=float)
    w = (d * d * (-0.5 / cfg.onehot_bandwidth**2)).exp()
    w = w / w.sum(axis=2, keepdims=True)
    hist = w.sum(axis=1).sum(axis=0) * (1.0 / (n_probe * n_sub))

    return (hist - 1.0 / (k + 1)).abs().sum()
