"""MLP generator, parameter init, optimizers, and checkpoints.

The generator is a plain fully-connected net mapping latent noise to
samples; forward() records onto the autodiff graph, forward_numpy() is an
independent straight re-evaluation used as an oracle in tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Value

CHECKPOINT_VERSION = 1

_ACTIVATIONS = ("elu", "tanh", "relu")


@dataclass
class Generator:
    layer_sizes: tuple
    weights: list  # per layer: (fan_in, fan_out) ndarray
    biases: list   # per layer: (fan_out,) ndarray
    activation: str = "elu"

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"activation must be one of {_ACTIVATIONS}")
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError("layer_sizes needs at least input and output, all >= 1")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
                raise ValueError(f"layer {i} parameter shape mismatch")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {i} has non-finite parameters")
        self.layer_sizes = sizes

    @staticmethod
    def init(layer_sizes, rng: np.random.Generator, activation: str = "elu") -> "Generator":
        """Glorot-uniform weights, zero biases."""
        sizes = tuple(int(s) for s in layer_sizes)
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return Generator(sizes, weights, biases, activation)

    @property
    def latent_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list:
        """Flat parameter list in a fixed order (w0, b0, w1, b1, ...)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def forward(self, z: np.ndarray) -> tuple:
        """Differentiable forward pass on a (n, latent_dim) batch.

        Returns (output Value of shape (n, output_dim), parameter Values
        in the same order as parameters()).
        """
        z = np.asarray(z, dtype=float)
        if z.ndim == 1:
            z = z[:, None]
        if z.shape[1] != self.latent_dim:
            raise ValueError(f"latent dim {z.shape[1]} != {self.latent_dim}")
        params = []
        h = Value(z)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            wv, bv = Value(w), Value(b)
            params.extend((wv, bv))
            h = h @ wv + bv
            if i < last:
                h = getattr(h, self.activation)()
        return h, params

    def forward_numpy(self, z: np.ndarray) -> np.ndarray:
        """Plain numpy re-evaluation (no graph)."""
        h = np.asarray(z, dtype=float)
        if h.ndim == 1:
            h = h[:, None]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                if self.activation == "elu":
                    h = np.where(h > 0, h, np.expm1(np.minimum(h, 0.0)))
                elif self.activation == "tanh":
                    h = np.tanh(h)
                else:
                    h = np.maximum(h, 0.0)
        return h

    def copy(self) -> "Generator":
        return Generator(self.layer_sizes, [w.copy() for w in self.weights],
                         [b.copy() for b in self.biases], self.activation)

    # ------------------------------------------------------------ checkpoints

    def save(self, path) -> None:
        layers = []
        for w, b in zip(self.weights, self.biases):
            layers.append({"dims": list(w.shape), "weights": w.ravel().tolist(),
                           "biases": b.tolist()})
        doc = {"format": "isl-lab-checkpoint", "version": CHECKPOINT_VERSION,
               "layer_sizes": list(self.layer_sizes), "activation": self.activation,
               "layers": layers}
        with open(path, "w") as f:
            json.dump(doc, f)

    @staticmethod
    def load(path) -> "Generator":
        with open(path) as f:
            doc = json.load(f)
        if doc.get("format") != "isl-lab-checkpoint" or doc.get("version") != CHECKPOINT_VERSION:
            raise ValueError("unrecognized checkpoint format")
        weights = [np.array(l["weights"]).reshape(l["dims"]) for l in doc["layers"]]
        biases = [np.array(l["biases"]) for l in doc["layers"]]
        return Generator(tuple(doc["layer_sizes"]), weights, biases, doc["activation"])


@dataclass
class OptimizerState:
    kind: str = "adam"  # "adam" | "sgd"
    learning_rate: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("adam", "sgd"):
            raise ValueError("kind must be adam or sgd")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")

    def step(self, params: list, grads: list) -> None:
        """Update params in place from grads (matching flat lists)."""
        if len(params) != len(grads):
            raise ValueError("params/grads length mismatch")
        for p, g in zip(params, grads):
            if p.shape != g.shape:
                raise ValueError("parameter/gradient shape mismatch")
            if not np.all(np.isfinite(g)):
                raise FloatingPointError("NaN/Inf gradient")
        if self.kind == "sgd":
            for p, g in zip(params, grads):
                p -= self.learning_rate * g
            self.step_count += 1
            return
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1**t
        bc2 = 1.0 - self.beta2**t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + self.eps)
