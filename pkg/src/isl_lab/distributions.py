"""Analytic 1D/2D target distributions with seeded sampling.

Only the families used by the experiments are provided: normal, uniform,
Cauchy, Pareto, finite mixtures of those, and three synthetic 2D sets
(dual moon, circle of Gaussians, two rings).  Every Density1D exposes
pdf/cdf/inverse_cdf closed forms (mixtures invert by bisection), so heavy
tails can be integrated through the cdf substitution instead of truncation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

_SQRT2PI = math.sqrt(2.0 * math.pi)


class Density1D:
    """Base class: univariate density with closed-form pdf/cdf and sampler."""

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def inverse_cdf(self, u):
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be >= 1")
        return self._sample(n, rng)

    def _sample(self, n, rng):
        raise NotImplementedError

    def support(self, mass_tol: float = 1e-10):
        """Interval carrying all but 2*mass_tol of the probability mass."""
        return self.inverse_cdf(mass_tol), self.inverse_cdf(1.0 - mass_tol)


@dataclass(frozen=True)
class Normal(Density1D):
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (_SQRT2PI * self.sigma)

    def cdf(self, x):
        return ndtr((np.asarray(x, dtype=float) - self.mu) / self.sigma)

    def inverse_cdf(self, u):
        return self.mu + self.sigma * ndtri(np.asarray(u, dtype=float))

    def _sample(self, n, rng):
        return rng.normal(self.mu, self.sigma, size=n)

    def __str__(self):
        return f"normal({self.mu:g},{self.sigma:g})"


@dataclass(frozen=True)
class Uniform(Density1D):
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need b > a")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def inverse_cdf(self, u):
        return self.a + (self.b - self.a) * np.asarray(u, dtype=float)

    def _sample(self, n, rng):
        return rng.uniform(self.a, self.b, size=n)

    def __str__(self):
        return f"uniform({self.a:g},{self.b:g})"


@dataclass(frozen=True)
class Cauchy(Density1D):
    loc: float
    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be > 0")

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        return 1.0 / (math.pi * self.scale * (1.0 + z * z))

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        return np.arctan(z) / math.pi + 0.5

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        return self.loc + self.scale * np.tan(math.pi * (u - 0.5))

    def _sample(self, n, rng):
        return self.loc + self.scale * rng.standard_cauchy(size=n)

    def __str__(self):
        return f"cauchy({self.loc:g},{self.scale:g})"


@dataclass(frozen=True)
class Pareto(Density1D):
    """Pareto with minimum `scale` and tail index `shape`: cdf 1-(scale/x)^shape."""

    scale: float
    shape: float

    def __post_init__(self):
        if self.scale <= 0 or self.shape <= 0:
            raise ValueError("scale and shape must be > 0")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        ok = x >= self.scale
        xs = np.where(ok, x, self.scale)
        out = np.where(ok, self.shape * self.scale**self.shape / xs ** (self.shape + 1.0), 0.0)
        return out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.scale, 0.0, 1.0 - (self.scale / np.maximum(x, self.scale)) ** self.shape)

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        return self.scale * (1.0 - u) ** (-1.0 / self.shape)

    def _sample(self, n, rng):
        return self.inverse_cdf(rng.random(n))

    def __str__(self):
        return f"pareto({self.scale:g},{self.shape:g})"


@dataclass(frozen=True)
class Mixture(Density1D):
    weights: tuple
    components: tuple

    # inverse_cdf bisection parameters
    _TOL = 1e-10
    _MAX_ITER = 200

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.components) or len(self.components) == 0:
            raise ValueError("weights and components must match and be nonempty")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "components", tuple(self.components))

    def pdf(self, x):
        return sum(w * c.pdf(x) for w, c in zip(self.weights, self.components))

    def cdf(self, x):
        return sum(w * c.cdf(x) for w, c in zip(self.weights, self.components))

    def inverse_cdf(self, u):
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        lo = min(c.inverse_cdf(1e-14) for c in self.components)
        hi = max(c.inverse_cdf(1.0 - 1e-14) for c in self.components)
        out = np.empty_like(u_arr)
        for i, ui in enumerate(u_arr):
            a, b = lo, hi
            fa = self.cdf(a) - ui
            if fa > 0 or self.cdf(b) - ui < 0:
                raise ValueError(f"cannot bracket quantile {ui}")
            for _ in range(self._MAX_ITER):
                m = 0.5 * (a + b)
                if self.cdf(m) < ui:
                    a = m
                else:
                    b = m
                if b - a < self._TOL * max(1.0, abs(m)):
                    break
            else:
                raise RuntimeError(f"quantile bisection did not converge at u={ui}")
            out[i] = 0.5 * (a + b)
        return out if np.ndim(u) else float(out[0])

    def _sample(self, n, rng):
        comp = rng.choice(len(self.components), size=n, p=np.asarray(self.weights))
        out = np.empty(n)
        for j, c in enumerate(self.components):
            idx = np.flatnonzero(comp == j)
            if idx.size:
                out[idx] = c.sample(idx.size, rng)
        return out

    def __str__(self):
        parts = ", ".join(f"{w:g}*{c}" for w, c in zip(self.weights, self.components))
        return f"mixture({parts})"


# ---------------------------------------------------------------- 2D targets


class Density2D:
    """Synthetic 2D dataset: only a seeded sampler is required."""

    dim = 2

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be >= 1")
        return self._sample(n, rng)


@dataclass(frozen=True)
class DualMoon(Density2D):
    noise: float = 0.1

    def _sample(self, n, rng):
        n_up = n // 2 + n % 2
        n_lo = n - n_up
        t_up = rng.uniform(0.0, math.pi, size=n_up)
        t_lo = rng.uniform(0.0, math.pi, size=n_lo)
        up = np.column_stack([np.cos(t_up), np.sin(t_up)])
        lo = np.column_stack([1.0 - np.cos(t_lo), -np.sin(t_lo) + 0.5])
        pts = np.concatenate([up, lo])
        pts += rng.normal(0.0, self.noise, size=pts.shape)
        return pts[rng.permutation(n)]

    def __str__(self):
        return "dualmoon"


@dataclass(frozen=True)
class CircleOfGaussians(Density2D):
    count: int = 8
    radius: float = 2.0
    sigma: float = 0.15

    def _sample(self, n, rng):
        which = rng.integers(0, self.count, size=n)
        ang = 2.0 * math.pi * which / self.count
        centers = self.radius * np.column_stack([np.cos(ang), np.sin(ang)])
        return centers + rng.normal(0.0, self.sigma, size=(n, 2))

    def __str__(self):
        return f"circle({self.count})"


@dataclass(frozen=True)
class TwoRings(Density2D):
    r1: float = 1.0
    r2: float = 2.0
    noise: float = 0.05

    def __post_init__(self):
        if self.r1 <= 0 or self.r2 <= 0:
            raise ValueError("radii must be > 0")

    def _sample(self, n, rng):
        ring = rng.integers(0, 2, size=n)
        r = np.where(ring == 0, self.r1, self.r2) + rng.normal(0.0, self.noise, size=n)
        ang = rng.uniform(0.0, 2.0 * math.pi, size=n)
        return np.column_stack([r * np.cos(ang), r * np.sin(ang)])

    def __str__(self):
        return f"tworings({self.r1:g},{self.r2:g})"


@dataclass(frozen=True)
class Gaussian2D(Density2D):
    """Analytic 2D Gaussian; every 1D projection is again a Gaussian."""

    mean: tuple = (0.0, 0.0)
    cov: tuple = ((1.0, 0.0), (0.0, 1.0))

    def __post_init__(self):
        m = np.asarray(self.mean, dtype=float)
        c = np.asarray(self.cov, dtype=float)
        if m.shape != (2,) or c.shape != (2, 2):
            raise ValueError("mean must be length 2, cov 2x2")
        if not np.allclose(c, c.T) or np.any(np.linalg.eigvalsh(c) <= 0):
            raise ValueError("cov must be symmetric positive-definite")
        object.__setattr__(self, "mean", tuple(m))
        object.__setattr__(self, "cov", tuple(map(tuple, c)))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        c = np.asarray(self.cov)
        diff = x - np.asarray(self.mean)
        sol = diff @ np.linalg.inv(c)
        quad = np.sum(sol * diff, axis=-1)
        return np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(np.linalg.det(c)))

    def projected(self, direction) -> Normal:
        """Law of s.x for unit vector s."""
        s = np.asarray(direction, dtype=float)
        mu = float(s @ np.asarray(self.mean))
        var = float(s @ np.asarray(self.cov) @ s)
        return Normal(mu, math.sqrt(var))

    def _sample(self, n, rng):
        return rng.multivariate_normal(np.asarray(self.mean), np.asarray(self.cov), size=n)

    def __str__(self):
        m = self.mean
        return f"gaussian2d({m[0]:g},{m[1]:g})"


# -------------------------------------------------------- spec-string parser

# The three benchmark mixtures, exposed under short aliases for the CLI.
_ALIASES = {
    "mixture1": "mixture(0.5*normal(5,2), 0.5*normal(-1,1))",
    "mixture2": "mixture(0.3333333333333333*normal(5,2), 0.3333333333333333*normal(-1,1), 0.3333333333333334*normal(-10,3))",
    "mixture3": "mixture(0.5*normal(-5,2), 0.5*pareto(5,1))",
}
_ALIASES["model1"] = _ALIASES["mixture1"]
_ALIASES["model2"] = _ALIASES["mixture2"]
_ALIASES["model3"] = _ALIASES["mixture3"]

_NUM = r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"


def parse_density(text: str):
    """Parse a distribution spec like ``normal(4,2)`` or ``mixture(0.5*normal(5,2), 0.5*normal(-1,1))``.

    Returns a Density1D or Density2D.  Raises ValueError on malformed input.
    """
    s = text.strip().lower().replace(" ", "")
    s = _ALIASES.get(s, s).replace(" ", "")
    d, rest = _parse_one(s)
    if rest:
        raise ValueError(f"trailing input in distribution spec: {rest!r}")
    return d


def _parse_one(s: str):
    m = re.match(r"([a-z]+)", s)
    if not m:
        raise ValueError(f"bad distribution spec: {s!r}")
    name = m.group(1)
    rest = s[m.end():]

    if name == "dualmoon":
        return DualMoon(), rest
    if name in ("normal", "uniform", "cauchy", "pareto", "tworings", "circle", "circleofgaussians"):
        args, rest = _parse_args(rest)
        if name == "normal":
            return Normal(*_need(args, 2, name)), rest
        if name == "uniform":
            return Uniform(*_need(args, 2, name)), rest
        if name == "cauchy":
            return Cauchy(*_need(args, 2, name)), rest
        if name == "pareto":
            return Pareto(*_need(args, 2, name)), rest
        if name == "tworings":
            return TwoRings(*args) if args else TwoRings(), rest
        return (CircleOfGaussians(int(args[0])) if args else CircleOfGaussians()), rest
    if name == "mixture":
        if not rest.startswith("("):
            raise ValueError("mixture needs arguments")
        rest = rest[1:]
        weights, comps = [], []
        while True:
            m = re.match(rf"({_NUM})\*", rest)
            if not m:
                raise ValueError(f"mixture component must be weight*dist, got {rest!r}")
            weights.append(float(m.group(1)))
            comp, rest = _parse_one(rest[m.end():])
            comps.append(comp)
            if rest.startswith(","):
                rest = rest[1:]
                continue
            if rest.startswith(")"):
                return Mixture(tuple(weights), tuple(comps)), rest[1:]
            raise ValueError(f"bad mixture spec near {rest!r}")
    raise ValueError(f"unknown distribution {name!r}")


def _parse_args(s: str):
    if not s.startswith("("):
        raise ValueError(f"expected '(' in {s!r}")
    end = s.index(")")
    inner = s[1:end]
    args = [float(a) for a in inner.split(",")] if inner else []
    return args, s[end + 1:]


def _need(args, n, name):
    if len(args) != n:
        raise ValueError(f"{name} takes {n} parameters, got {len(args)}")
    return args
