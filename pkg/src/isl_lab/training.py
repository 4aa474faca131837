"""Training loops: dual ISL, classical ISL, sliced 2D dual ISL, and the
monotonicity-penalized OT variant.

All loops share the same skeleton: one epoch is a pass over the real
dataset in shuffled minibatches, each minibatch takes one optimizer step
on the surrogate l1 loss (plain, no 1/(K+1) prefactor).  On a NaN loss
the last epoch's parameters are restored and the learning rate halved
once; a second NaN aborts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Value
from .nn import Generator, OptimizerState
from .rng import (STREAM_DATA, STREAM_NOISE, STREAM_PROJECTIONS,
                  STREAM_SUBSETS, make_rng)
from .surrogate import SurrogateConfig, surrogate_loss


class DivergenceError(RuntimeError):
    """Training produced NaN losses even after a learning-rate cut."""


@dataclass(frozen=True)
class TrainConfig:
    k: int = 10
    epochs: int = 1000
    batch_size: int = 1000
    learning_rate: float = 1e-2
    orientation: str = "dual"  # "dual" | "classical"
    projections: int = 10
    monotonicity_lambda: float = 0.0
    seed: int = 0
    dataset_size: int | None = None  # None = one batch per epoch
    strict_alg1: bool = False  # literal single generated sample per minibatch
    temperature_anneal: float = 1.0  # start multiplier of the linear anneal
    lr_decay: float = 1.0  # final lr as a fraction of learning_rate (linear)
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)

    def __post_init__(self):
        if self.k < 1 or self.batch_size < self.k:
            raise ValueError("need k >= 1 and batch_size >= k")
        if self.epochs < 0 or self.learning_rate <= 0:
            raise ValueError("need epochs >= 0 and learning_rate > 0")
        if self.orientation not in ("dual", "classical"):
            raise ValueError("orientation must be dual or classical")
        if self.projections < 1 or self.monotonicity_lambda < 0:
            raise ValueError("need projections >= 1 and monotonicity_lambda >= 0")
        if self.temperature_anneal < 1.0:
            raise ValueError("temperature_anneal is a start multiplier >= 1")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError("lr_decay is a final-lr fraction in (0, 1]")

    @property
    def n_data(self) -> int:
        return self.dataset_size if self.dataset_size is not None else self.batch_size


@dataclass
class TrainReport:
    loss_trace: np.ndarray
    epoch_seconds: np.ndarray
    wallclock_s: float
    final_metrics: dict = field(default_factory=dict)

    def write_trace(self, path) -> None:
        with open(path, "w") as f:
            f.write("epoch,loss,wallclock_s\n")
            for e, (l, s) in enumerate(zip(self.loss_trace, self.epoch_seconds)):
                f.write(f"{e},{float(l)!r},{float(s)!r}\n")


def _n_generated(cfg: TrainConfig) -> int:
    return 1 if cfg.strict_alg1 else max(1, cfg.batch_size // cfg.k)


def _run_epochs(gen: Generator, cfg: TrainConfig, data: np.ndarray, step_fn):
    """Shared loop: shuffling, stepping, NaN recovery, and the trace."""
    opt = OptimizerState(kind="adam", learning_rate=cfg.learning_rate)
    data_rng = make_rng(cfg.seed, STREAM_SUBSETS)
    losses = np.zeros(cfg.epochs)
    secs = np.zeros(cfg.epochs)
    checkpoint = gen.copy()
    lr_cut = False
    t0 = time.perf_counter()
    for epoch in range(cfg.epochs):
        te = time.perf_counter()
        progress = epoch / max(1, cfg.epochs - 1)
        temp_scale = cfg.temperature_anneal + (1.0 - cfg.temperature_anneal) * progress
        lr_scale = 1.0 + (cfg.lr_decay - 1.0) * progress
        opt.learning_rate = (cfg.learning_rate if not lr_cut else cfg.learning_rate / 2) * lr_scale
        order = data_rng.permutation(len(data))
        batch_losses = []
        for start in range(0, len(data) - cfg.batch_size + 1, cfg.batch_size):
            batch = data[order[start:start + cfg.batch_size]]
            loss, params = step_fn(gen, batch, data_rng, temp_scale)
            if not np.isfinite(loss.data):
                if lr_cut:
                    raise DivergenceError(f"NaN loss at epoch {epoch} after lr cut")
                gen.weights = [w.copy() for w in checkpoint.weights]
                gen.biases = [b.copy() for b in checkpoint.biases]
                opt = OptimizerState(kind="adam", learning_rate=opt.learning_rate / 2)
                lr_cut = True
                batch_losses.append(float(losses[epoch - 1]) if epoch else 0.0)
                continue
            loss.backward()
            opt.step(gen.parameters(), [p.grad for p in params])
            batch_losses.append(float(loss.data))
        checkpoint = gen.copy()
        losses[epoch] = np.mean(batch_losses) if batch_losses else 0.0
        secs[epoch] = time.perf_counter() - te
    report = TrainReport(losses, secs, time.perf_counter() - t0)
    return gen, report


def train_dual_isl(gen: Generator, target, cfg: TrainConfig):
    """Dual ISL: generated probes ranked against real K-subsets."""
    data = np.asarray(target.sample(cfg.n_data, make_rng(cfg.seed, STREAM_DATA))).ravel()
    noise_rng = make_rng(cfg.seed, STREAM_NOISE)
    n_gen = _n_generated(cfg)

    def step(g, batch, rng, temp_scale):
        z = noise_rng.standard_normal((n_gen, g.latent_dim))
        out, params = g.forward(z)
        loss = surrogate_loss(out.reshape(-1), batch, cfg.k, cfg.surrogate,
                              orientation="dual", rng=rng,
                              temperature_scale=temp_scale)
        return loss, params

    return _run_epochs(gen, cfg, data, step)


def train_classical_isl(gen: Generator, target, cfg: TrainConfig):
    """Classical ISL: real probes ranked against generated K-subsets.

    Each subset needs k fresh generated samples, so every minibatch pushes
    batch_size points through the generator (vs batch_size/k for dual).
    """
    data = np.asarray(target.sample(cfg.n_data, make_rng(cfg.seed, STREAM_DATA))).ravel()
    noise_rng = make_rng(cfg.seed, STREAM_NOISE)

    def step(g, batch, rng, temp_scale):
        n_sub = cfg.batch_size // cfg.k
        z = noise_rng.standard_normal((n_sub * cfg.k, g.latent_dim))
        out, params = g.forward(z)
        loss = surrogate_loss(out.reshape(-1), batch, cfg.k, cfg.surrogate,
                              orientation="classical", rng=rng,
                              temperature_scale=temp_scale)
        return loss, params

    return _run_epochs(gen, cfg, data, step)


def train_sliced_dual_isl(gen: Generator, target, cfg: TrainConfig):
    """Sliced dual ISL: average the 1D loss over L random unit directions."""
    data = np.asarray(target.sample(cfg.n_data, make_rng(cfg.seed, STREAM_DATA)))
    noise_rng = make_rng(cfg.seed, STREAM_NOISE)
    proj_rng = make_rng(cfg.seed, STREAM_PROJECTIONS)
    n_gen = _n_generated(cfg)
    dim = gen.output_dim

    def step(g, batch, rng, temp_scale):
        z = noise_rng.standard_normal((n_gen, g.latent_dim))
        out, params = g.forward(z)
        dirs = proj_rng.standard_normal((cfg.projections, dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        loss = None
        for s in dirs:
            term = surrogate_loss(out @ s, batch @ s, cfg.k, cfg.surrogate,
                                  orientation="dual", rng=rng,
                                  temperature_scale=temp_scale)
            loss = term if loss is None else loss + term
        return loss * (1.0 / cfg.projections), params

    return _run_epochs(gen, cfg, data, step)


def monotonicity_penalty(outputs):
    """Mean hinge of adjacent inversions; 0 iff outputs are nondecreasing.

    `outputs` must already be ordered by ascending input.
    """
    if not isinstance(outputs, Value):
        outputs = Value(np.asarray(outputs, dtype=float))
    n = outputs.data.size
    if n < 2:
        raise ValueError("need at least 2 outputs")
    return (outputs[:-1] - outputs[1:]).relu().sum() * (1.0 / n)


def train_monotone_ot(gen: Generator, target, cfg: TrainConfig):
    """Dual ISL plus a monotonicity penalty, recovering the increasing
    transport map f+ = Finv o F_z at the optimum."""
    if cfg.monotonicity_lambda <= 0:
        raise ValueError("monotone OT needs monotonicity_lambda > 0")
    data = np.asarray(target.sample(cfg.n_data, make_rng(cfg.seed, STREAM_DATA))).ravel()
    noise_rng = make_rng(cfg.seed, STREAM_NOISE)
    n_gen = _n_generated(cfg)

    def step(g, batch, rng, temp_scale):
        z = np.sort(noise_rng.standard_normal(n_gen))
        out, params = g.forward(z)
        flat = out.reshape(-1)
        loss = surrogate_loss(flat, batch, cfg.k, cfg.surrogate,
                              orientation="dual", rng=rng,
                              temperature_scale=temp_scale)
        loss = loss + cfg.monotonicity_lambda * monotonicity_penalty(flat)
        return loss, params

    return _run_epochs(gen, cfg, data, step)
