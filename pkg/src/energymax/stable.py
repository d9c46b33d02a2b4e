"""Symmetric r-stable sampling and the stable-measure upper bound.

The sampler realizes the law with characteristic function exp(-|t|^r) for
1 <= r <= 2 via the Chambers-Mallows-Stuck transform; r = 1 is the standard
Cauchy (tan of a uniform angle) and r = 2 the centered Gaussian with
variance 2, the member of the family whose p-th moment root is
gaussian_moment(p).

Moment estimates: |W|^p has a power tail of index r/p, so its variance is
infinite once 2p >= r and a plain sample mean is tail-dominated.  In that
regime estimates use a tail-completed trimmed mean: with Y_(k) the k-th
largest of N samples and a = r/p,

    E[Y] ~ mean(Y; Y <= Y_(k)) * (N-k)/N + (k/N) * Y_(k) * a/(a-1),

which completes the trimmed average with the integral of the fitted
power tail (only the known index enters; the tail constant comes from the
sample itself).  k = N^0.6 balances tail bias against trimming noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .bodies import BodySpec, RngStream, dual_norms

__all__ = [
    "StableConfig",
    "sample_stable_scalar",
    "sample_stable",
    "c_rp",
    "verify_stability_identity",
    "gub_upper_bound",
]

_BATCHES = 32
_TAIL_EXPONENT = 0.6


@dataclass(frozen=True)
class StableConfig:
    """Stability index, dimension and random source for one sampler."""

    r: float
    n: int
    rng: RngStream

    def __post_init__(self):
        if not 1.0 <= self.r <= 2.0:
            raise ValueError(f"stability index must lie in [1, 2], got {self.r}")
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")


def sample_stable(r: float, size, gen: np.random.Generator) -> np.ndarray:
    """i.i.d. draws from the symmetric r-stable law with cf exp(-|t|^r)."""
    if not 1.0 <= r <= 2.0:
        raise ValueError(f"stability index must lie in [1, 2], got {r}")
    if r == 2.0:
        return math.sqrt(2.0) * gen.standard_normal(size)
    u = gen.uniform(-math.pi / 2.0, math.pi / 2.0, size)
    if r == 1.0:
        return np.tan(u)
    e = gen.standard_exponential(size)
    shape = np.shape(u)
    out = _backend.cms_transform(np.ravel(u), np.ravel(e), r)
    return out.reshape(shape)


def sample_stable_scalar(cfg: StableConfig) -> float:
    """One scalar draw for the configured stability index."""
    return float(sample_stable(cfg.r, 1, cfg.rng.generator())[0])


def _moment_requires(r: float, p: float) -> None:
    if not 1.0 <= r <= 2.0:
        raise ValueError(f"stability index must lie in [1, 2], got {r}")
    if not 0.0 < p:
        raise ValueError(f"p must be positive, got {p}")
    if r < 2.0 and p >= r:
        raise ValueError(
            f"E|W|^p diverges for p >= r when r < 2 (got p={p}, r={r})"
        )


def _heavy(r: float, p: float) -> bool:
    return r < 2.0 and 2.0 * p >= r


def _tail_completed_mean(y: np.ndarray, alpha: float) -> float:
    N = y.size
    k = max(2, int(N**_TAIL_EXPONENT))
    part = np.partition(y, N - k)
    tau = float(part[N - k])
    body = part[: N - k]
    return float(body.mean()) * (N - k) / N + (k / N) * tau * alpha / (alpha - 1.0)


def _estimate_mean(batches: list[np.ndarray], r: float, p: float):
    """(estimate, stderr) for E[Y] from per-batch sample arrays of Y >= 0."""
    if _heavy(r, p):
        alpha = r / p
        per = np.array([_tail_completed_mean(b, alpha) for b in batches])
        est = _tail_completed_mean(np.concatenate(batches), alpha)
    else:
        per = np.array([b.mean() for b in batches])
        est = float(per.mean())
    stderr = float(per.std(ddof=1) / math.sqrt(len(per)))
    return est, stderr


def c_rp(r: float, p: float, samples: int, rng: RngStream):
    """Monte-Carlo estimate of the moment root (E|W|^p)^(1/p), with stderr.

    For r = 2 this must agree with gaussian_moment(p) within sampling error.
    p >= r is rejected for r < 2 (the moment is infinite).
    """
    _moment_requires(r, p)
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    per = -(-int(samples) // _BATCHES)
    batches = [
        np.abs(sample_stable(r, per, rng.generator(b))) ** p for b in range(_BATCHES)
    ]
    m, m_err = _estimate_mean(batches, r, p)
    c = m ** (1.0 / p)
    return c, c * m_err / (p * m)


def verify_stability_identity(x, r: float, p: float, samples: int, rng: RngStream) -> float:
    """Relative error of ||x||_r^p against its mixture representation.

    Estimates E|<x, W>|^p / E|W_1|^p with W an i.i.d. r-stable vector and
    compares to ||x||_r^p.  The denominator pools all n coordinates of the
    same draws: its tail events coincide with the numerator's, so the ratio
    cancels most of the heavy-tail noise.
    """
    _moment_requires(r, p)
    x = np.asarray(x, dtype=np.float64).ravel()
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    n = x.size
    per = -(-int(samples) // _BATCHES)
    num_batches = []
    den_batches = []
    for b in range(_BATCHES):
        W = sample_stable(r, (per, n), rng.generator(b))
        num_batches.append(np.abs(W @ x) ** p)
        den_batches.append(np.abs(W).ravel() ** p)
    num, _ = _estimate_mean(num_batches, r, p)
    den, _ = _estimate_mean(den_batches, r, p)
    truth = float(np.sum(np.abs(x) ** r) ** (p / r))
    return abs(num / den - truth) / truth


def gub_upper_bound(body: BodySpec, r: float, p: float, mp: float, samples: int, rng: RngStream):
    """Upper bound for M_p(body, d_r): mp * E[dual_norm(W)^p] / E[|W_1|^p].

    W has i.i.d. r-stable coordinates; mp is the one-dimensional maximal
    energy (an estimate from estimate_mp, or exactly 1 at p = 1).  The
    denominator pools the coordinates of the same draws (matched-ratio
    variance reduction).  Returns (estimate, stderr); requires 0 < p < r.
    """
    if not 0.0 < p < r <= 2.0:
        raise ValueError(f"need 0 < p < r <= 2 (got p={p}, r={r})")
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    if not mp > 0.0:
        raise ValueError(f"mp must be positive, got {mp}")
    per = -(-int(samples) // _BATCHES)
    num_batches = []
    den_batches = []
    for b in range(_BATCHES):
        W = sample_stable(r, (per, body.n), rng.generator(b))
        num_batches.append(dual_norms(W, body) ** p)
        den_batches.append(np.abs(W).ravel() ** p)
    num, num_err = _estimate_mean(num_batches, r, p)
    den, den_err = _estimate_mean(den_batches, r, p)
    est = mp * num / den
    stderr = est * math.sqrt((num_err / num) ** 2 + (den_err / den) ** 2)
    return est, stderr
