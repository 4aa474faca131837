"""Bernstein basis, Gram matrix, dual basis, truncated density ratio, and
the explicit density estimates built from rank pmfs.

The Gram matrix has the closed form G[n,m] = C(K,n)C(K,m) / ((2K+1)C(2K,n+m)).
It is badly conditioned, so the inverse is computed with exact rational
elimination for K <= 15 and pivoted float elimination up to K = 30.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rank import RankPmf, discrepancy, exact_pmf

MAX_EXACT_K = 15
MAX_K = 30


def bernstein_eval(n: int, k: int, t):
    """b_{n,K}(t) = C(K,n) t^n (1-t)^(K-n)."""
    if not 0 <= n <= k:
        raise ValueError("need 0 <= n <= k")
    t = np.asarray(t, dtype=float)
    return math.comb(k, n) * t**n * (1.0 - t) ** (k - n)


def bernstein_vector(k: int, t) -> np.ndarray:
    """All degree-k basis values at t; shape (..., k+1)."""
    t = np.asarray(t, dtype=float)[..., None]
    ns = np.arange(k + 1)
    binom = np.array([math.comb(k, n) for n in ns], dtype=float)
    return binom * t**ns * (1.0 - t) ** (k - ns)


def gram_matrix(k: int) -> np.ndarray:
    if not 0 <= k <= MAX_K:
        raise ValueError(f"k must be in [0, {MAX_K}]")
    g = np.empty((k + 1, k + 1))
    for n in range(k + 1):
        for m in range(k + 1):
            g[n, m] = math.comb(k, n) * math.comb(k, m) / ((2 * k + 1) * math.comb(2 * k, n + m))
    return g


def _gram_inverse_exact(k: int) -> np.ndarray:
    """Gauss-Jordan over the rationals; the entries are exact fractions."""
    n = k + 1
    a = [[Fraction(math.comb(k, i) * math.comb(k, j), (2 * k + 1) * math.comb(2 * k, i + j))
          for j in range(n)] for i in range(n)]
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = a[col][col]
        a[col] = [x / d for x in a[col]]
        inv[col] = [x / d for x in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return np.array([[float(x) for x in row] for row in inv])


def _gram_inverse_float(k: int) -> np.ndarray:
    g = gram_matrix(k)
    return np.linalg.solve(g, np.eye(k + 1))  # LAPACK partial pivoting


@dataclass(frozen=True)
class DualBasis:
    k: int
    gram: np.ndarray
    gram_inverse: np.ndarray

    @staticmethod
    def build(k: int) -> "DualBasis":
        if not 0 <= k <= MAX_K:
            raise ValueError(f"k must be in [0, {MAX_K}]")
        inv = _gram_inverse_exact(k) if k <= MAX_EXACT_K else _gram_inverse_float(k)
        return DualBasis(k, gram_matrix(k), inv)


def dual_basis_eval(m: int, k: int, t):
    """Dual basis member: sum_j Ginv[m,j] b_{j,K}(t)."""
    basis = DualBasis.build(k)
    return bernstein_vector(k, t) @ basis.gram_inverse[m]


def truncated_ratio(coeffs: RankPmf, t, basis: DualBasis | None = None):
    """Degree-K L2 projection of the density ratio: sum_n Q(n) btilde_n(t)."""
    if basis is None:
        basis = DualBasis.build(coeffs.k)
    elif basis.k != coeffs.k:
        raise ValueError("basis degree != coefficient degree")
    w = basis.gram_inverse.T @ coeffs.probs
    return bernstein_vector(coeffs.k, t) @ w


def sup_deviation_bound_check(p, ptilde, k: int, grid: int = 10_000):
    """(lhs, rhs) of the uniform bound on the truncated ratio.

    lhs = sup_t |q_K(t) - 1|; rhs = (K+1)^2 times the plain l1 deviation
    of Q_K from uniform, i.e. (K+1)^3 d_K with the normalized discrepancy.
    (The (K+1)^2 d_K form fails already at K=1 for any p != ptilde, since
    the dual basis members exceed K+1 in sup norm.)
    """
    pmf = exact_pmf(p, ptilde, k)
    ts = np.linspace(0.0, 1.0, grid)
    lhs = float(np.max(np.abs(truncated_ratio(pmf, ts) - 1.0)))
    rhs = (k + 1) ** 3 * discrepancy(pmf)
    return lhs, rhs


def empirical_cdf(sorted_samples: np.ndarray, x) -> np.ndarray:
    """Right-continuous step cdf of a sorted sample array."""
    return np.searchsorted(sorted_samples, np.asarray(x, dtype=float), side="right") / len(sorted_samples)


def expected_pmf(probes, reference, k: int) -> RankPmf:
    """Exact expectation of the empirical rank pmf over all size-k subsets.

    For a probe with reference ecdf value u the subset rank count is
    binomial(k, u) (up to the negligible without-replacement correction),
    so the expected pmf is the mean Bernstein vector at the ecdf values.
    Same estimand as empirical_pmf with infinite trials, but free of
    resampling noise - which matters downstream, where the dual basis
    amplifies per-bin noise by orders of magnitude.
    """
    ref = np.sort(np.asarray(reference, dtype=float).ravel())
    if len(ref) < k:
        raise ValueError(f"need at least k={k} reference samples")
    u = empirical_cdf(ref, np.asarray(probes, dtype=float).ravel())
    probs = bernstein_vector(k, u).mean(axis=0)
    return RankPmf(k=k, probs=probs / probs.sum())


def density_estimate(coeffs: RankPmf, reference_samples: np.ndarray, delta: float, x,
                     basis: DualBasis | None = None, clamp: bool = True):
    """Monte Carlo density estimate: fd-KDE of the reference times the
    truncated ratio evaluated at the empirical cdf.

    Negative excursions are clamped at 0 by default.  Pass clamp=False
    when integrating to a cdf: the Monte Carlo noise in the coefficients
    is amplified pointwise by the dual basis but integrates out to zero,
    and clamping would break that cancellation.
    """
    if delta <= 0:
        raise ValueError("delta must be > 0")
    ref = np.sort(np.asarray(reference_samples, dtype=float).ravel())
    if len(ref) == 0:
        raise ValueError("reference_samples is empty")
    x = np.asarray(x, dtype=float)
    fhat = empirical_cdf(ref, x)
    phat_ref = (empirical_cdf(ref, x + delta) - empirical_cdf(ref, x - delta)) / (2.0 * delta)
    ratio = truncated_ratio(coeffs, np.clip(fhat, 0.0, 1.0), basis)
    out = phat_ref * ratio
    return np.maximum(out, 0.0) if clamp else out


def density_limit_check(p, ptilde, k_values, grid: int = 401) -> np.ndarray:
    """Sup error of the analytic p_K = ptilde * q_K(Ftilde) against p, per K."""
    lo, hi = p.support(1e-6)
    xs = np.linspace(lo, hi, grid)
    errs = []
    for k in k_values:
        pmf = exact_pmf(p, ptilde, k)
        pk = ptilde.pdf(xs) * truncated_ratio(pmf, ptilde.cdf(xs))
        errs.append(float(np.max(np.abs(pk - p.pdf(xs)))))
    return np.array(errs)


def export_density_csv(path, xs, phat) -> None:
    with open(path, "w") as f:
        f.write("x,p_hat\n")
        for x, ph in zip(np.asarray(xs).ravel(), np.asarray(phat).ravel()):
            f.write(f"{float(x)!r},{float(ph)!r}\n")
