"""Convex bodies: unit balls of l_q norms, ellipsoids, and the interval.

Provides dual norms and directional widths, deterministic sphere samplers,
Monte-Carlo sphere-integral estimators, and the point-set builder used by
the discrete energy maximizer.  All randomness flows through RngStream so
that identical (seed, stream) pairs reproduce results bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from . import _backend
from .specfun import sphere_abs_moment

__all__ = [
    "RngStream",
    "BodySpec",
    "dual_norm",
    "width",
    "sample_sphere",
    "mean_width_power",
    "sphere_lr_moment",
    "pi_p_ellipsoid",
    "body_point_set",
]

_BATCHES = 32


@dataclass(frozen=True)
class RngStream:
    """Deterministic random source: (seed, stream) fixes every draw.

    Distinct stream ids give statistically independent sequences, so
    concurrent estimators must use distinct streams.
    """

    seed: int
    stream: int = 0

    def generator(self, *sub: int) -> np.random.Generator:
        """Fresh generator for this stream; extra indices derive substreams."""
        key = (self.stream, *sub)
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=key)
        )

    def child(self, k: int) -> "RngStream":
        return RngStream(self.seed, self.stream * 1000003 + k + 1)


@dataclass
class BodySpec:
    """A centrally symmetric convex body in R^n.

    kind is one of "interval" (the segment [-1, 1] in R^1), "lq_ball"
    (unit ball of l_q^n, 1 <= q <= inf) or "ellipsoid" (image of the unit
    Euclidean ball under a non-degenerate operator, given either by its
    semi-axes or by a full matrix).
    """

    kind: str
    n: int
    q: float | None = None
    semi_axes: np.ndarray | None = None
    matrix: np.ndarray | None = None

    @classmethod
    def interval(cls) -> "BodySpec":
        return cls(kind="interval", n=1)

    @classmethod
    def lq_ball(cls, n: int, q: float) -> "BodySpec":
        if n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        if not q >= 1.0:
            raise ValueError(f"l_q ball requires q >= 1, got {q}")
        return cls(kind="lq_ball", n=int(n), q=float(q))

    @classmethod
    def ellipsoid(cls, semi_axes=None, matrix=None) -> "BodySpec":
        if (semi_axes is None) == (matrix is None):
            raise ValueError("ellipsoid needs exactly one of semi_axes or matrix")
        if semi_axes is not None:
            a = np.asarray(semi_axes, dtype=np.float64).ravel()
            if a.size < 1 or np.any(a <= 0.0):
                raise ValueError("ellipsoid semi-axes must all be positive")
            return cls(kind="ellipsoid", n=a.size, semi_axes=a)
        T = np.asarray(matrix, dtype=np.float64)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise ValueError(f"ellipsoid matrix must be square, got shape {T.shape}")
        sv = np.linalg.svd(T, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise ValueError("ellipsoid matrix is numerically degenerate")
        return cls(kind="ellipsoid", n=T.shape[0], matrix=T)

    def operator(self) -> np.ndarray:
        """The operator mapping the unit Euclidean ball onto this ellipsoid."""
        if self.kind != "ellipsoid":
            raise ValueError("operator() is only defined for ellipsoids")
        if self.matrix is not None:
            return self.matrix
        return np.diag(self.semi_axes)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "n": self.n}
        if self.q is not None:
            out["q"] = self.q
        if self.semi_axes is not None:
            out["semi_axes"] = [float(a) for a in self.semi_axes]
        if self.matrix is not None:
            out["matrix"] = [[float(v) for v in row] for row in self.matrix]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BodySpec":
        kind = data.get("kind")
        if kind == "interval":
            return cls.interval()
        if kind == "lq_ball":
            q = data["q"]
            return cls.lq_ball(int(data["n"]), math.inf if q in ("inf", None) else float(q))
        if kind == "ellipsoid":
            return cls.ellipsoid(
                semi_axes=data.get("semi_axes"), matrix=data.get("matrix")
            )
        raise ValueError(f"unknown body kind {kind!r}")


def _dual_exponent(q: float) -> float:
    if q == 1.0:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def dual_norms(T: np.ndarray, body: BodySpec) -> np.ndarray:
    """Dual norms of the rows of T with respect to the body, vectorized."""
    T = np.atleast_2d(np.asarray(T, dtype=np.float64))
    if T.shape[1] != body.n:
        raise ValueError(
            f"dimension mismatch: vectors have {T.shape[1]} coordinates, body has {body.n}"
        )
    if body.kind == "interval":
        return np.abs(T[:, 0])
    if body.kind == "lq_ball":
        qd = _dual_exponent(body.q)
        if math.isinf(qd):
            return np.max(np.abs(T), axis=1)
        if qd == 1.0:
            return np.sum(np.abs(T), axis=1)
        return _backend.lq_norm_pow(T, qd, 1.0)
    # ellipsoid: support function of T(B_2) is t -> ||T' t||_2
    op = body.operator()
    return np.linalg.norm(T @ op, axis=1)


def dual_norm(t, body: BodySpec) -> float:
    """Norm of t in the dual of the body's norm (= support function of the body)."""
    return float(dual_norms(np.atleast_2d(t), body)[0])


def width(t, body: BodySpec) -> float:
    """Width of the body in the unit direction t: distance between the two
    supporting hyperplanes orthogonal to t, equal to twice the dual norm."""
    t = np.asarray(t, dtype=np.float64).ravel()
    nrm = np.linalg.norm(t)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError(f"width requires a unit direction, got |t| = {nrm}")
    return 2.0 * dual_norm(t, body)


def sample_sphere(n: int, rng: RngStream, size: int | None = None):
    """Uniform draw(s) on S^{n-1}: normalized Gaussian vectors.

    Returns one vector of shape (n,) when size is None, else (size, n).
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    gen = rng.generator()
    m = 1 if size is None else int(size)
    g = gen.standard_normal((m, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[0] if size is None else g


def _sphere_batches(n: int, samples: int, rng: RngStream):
    """Yield _BATCHES equal batches of uniform sphere points, one substream each."""
    per = -(-int(samples) // _BATCHES)
    for b in range(_BATCHES):
        gen = rng.generator(b)
        g = gen.standard_normal((per, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        yield g


def _batched_sphere_mean(values_of_batch, n, samples, rng):
    means = np.empty(_BATCHES)
    for b, pts in enumerate(_sphere_batches(n, samples, rng)):
        means[b] = values_of_batch(pts).mean()
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(_BATCHES))


def mean_width_power(body: BodySpec, p: float, samples: int, rng: RngStream):
    """Monte-Carlo estimate of the sphere average of dual_norm(t, body)^p.

    Up to the factor 2^p this is the mean p-th power of the body's width in a
    uniformly random direction.  Returns (estimate, stderr); the standard
    error comes from 32 independent batch means.
    """
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    if not p > 0.0:
        raise ValueError(f"p must be positive, got {p}")
    return _batched_sphere_mean(
        lambda pts: dual_norms(pts, body) ** p, body.n, samples, rng
    )


def sphere_lr_moment(n: int, r: float, p: float, samples: int, rng: RngStream):
    """Estimate of the sphere average of ||t||_r^p on S^{n-1}, with stderr.

    After multiplication by n^{(1/2 - 1/r) p} this average stays within
    dimension-independent bounds, which is the basis of the growth-rate
    estimates for l_q balls.
    """
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    if not (r >= 1.0 and math.isfinite(r)):
        raise ValueError(f"r must lie in [1, inf), got {r}")
    if not p > 0.0:
        raise ValueError(f"p must be positive, got {p}")
    if r == 2.0 or n == 1:
        return 1.0, 0.0
    return _batched_sphere_mean(
        lambda pts: _backend.lq_norm_pow(pts, r, p), n, samples, rng
    )


def pi_p_ellipsoid(T, p: float, samples: int, rng: RngStream):
    """p-summing norm of an operator on Euclidean space, to the p-th power.

    Computed as the sphere average of ||T t||_2^p divided by the sphere
    moment E|t_1|^p.  T may be an (n, n) matrix or a vector of semi-axes.
    For T = identity the exact value is b_coeff(n, p).
    Returns (estimate, stderr).
    """
    if not 0.0 < p < 2.0:
        raise ValueError(f"p must lie in (0, 2), got {p}")
    if samples < 100:
        raise ValueError(f"samples must be >= 100, got {samples}")
    T = np.asarray(T, dtype=np.float64)
    body = (
        BodySpec.ellipsoid(semi_axes=T) if T.ndim == 1 else BodySpec.ellipsoid(matrix=T)
    )
    n = body.n
    op = body.operator()
    est, err = _batched_sphere_mean(
        lambda pts: np.linalg.norm(pts @ op.T, axis=1) ** p, n, samples, rng
    )
    c = sphere_abs_moment(n, p)
    return est / c, err / c


# ---------------------------------------------------------------------------
# Point sets for discrete energy maximization
# ---------------------------------------------------------------------------
#
# Layout of the master list (prefixes of which are the lower resolutions):
#   origin, the 2n axis extreme points, then shell points in round-robin
#   order over a small family of concentric shells clustered toward the
#   boundary, where the optimal measures concentrate.  Directions per shell
#   come from a low-discrepancy stream (bit-reversal-ordered spiral points
#   for n = 3, equiangular points for n = 2, scrambled Sobol mapped through
#   the normal quantile elsewhere), emitted in antipodal pairs so every
#   prefix is close to symmetric.

_SHELLS = 4
_SHELL_DEPTH = 0.6
# points per shell and per round-robin round; the optimum loads the boundary,
# so the outer shells get the densest direction sets
_SHELL_WEIGHTS = (3, 2, 1, 1)


def _shell_radii() -> np.ndarray:
    k = np.arange(_SHELLS, dtype=np.float64)
    return 1.0 - _SHELL_DEPTH * (k / (_SHELLS - 1)) ** 2


def _bit_reversal_order(m: int) -> np.ndarray:
    """Permutation of range(m) by van der Corput radical inverse: prefixes
    of the reordered sequence stay well spread."""
    i = np.arange(m, dtype=np.uint64)
    v = np.zeros(m)
    f = 0.5
    while i.any():
        v += f * (i & 1)
        i >>= 1
        f *= 0.5
    return np.argsort(v, kind="stable")


def _fibonacci_sphere(m: int) -> np.ndarray:
    k = np.arange(m) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / m)
    theta = np.pi * (1.0 + math.sqrt(5.0)) * k
    return np.stack(
        [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=1
    )


def _circle_points(m: int) -> np.ndarray:
    ang = np.pi * np.arange(m) / m  # half turn; antipodes added by the caller
    pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return pts[_bit_reversal_order(m)]


# per-shell direction master size; requests beyond 2 * _HALF_DIRS are capped
_HALF_DIRS = 2048


def _shell_directions(n: int, m: int, gen: np.random.Generator) -> np.ndarray:
    """m well-spread unit directions in antipodal pairs.

    The underlying sequence per (shell, rng) is fixed at 2 * _HALF_DIRS
    points and m only takes a prefix, so point sets of different sizes nest.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]] * ((m + 1) // 2))[:m]
    if n == 2:
        half = _circle_points(_HALF_DIRS)
    elif n == 3:
        half = _fibonacci_sphere(_HALF_DIRS)
        half = half[_bit_reversal_order(_HALF_DIRS)]
    else:
        eng = qmc.Sobol(d=n, scramble=True, seed=gen)
        u = eng.random_base2(int(math.log2(_HALF_DIRS)))
        half = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
        half /= np.linalg.norm(half, axis=1, keepdims=True)
    # one seeded rotation per shell decouples the pattern from the axes
    Q = np.linalg.qr(gen.standard_normal((n, n)))[0]
    half = half @ Q
    out = np.empty((2 * len(half), n))
    out[0::2] = half
    out[1::2] = -half
    return out[:m]


def _lq_scale_to_unit(dirs: np.ndarray, q: float) -> np.ndarray:
    """Scale Euclidean unit directions onto the l_q unit sphere."""
    if math.isinf(q):
        nrm = np.max(np.abs(dirs), axis=1)
    else:
        nrm = np.sum(np.abs(dirs) ** q, axis=1) ** (1.0 / q)
    return dirs / nrm[:, None]


def _interval_grid(count: int) -> np.ndarray:
    """Symmetric grid on [-1, 1] clustered at the endpoints, odd size."""
    N = max(3, count | 1)
    k = np.arange(N)
    return (-np.cos(np.pi * k / (N - 1)))[:, None]


def body_point_set(body: BodySpec, count: int, rng: RngStream) -> np.ndarray:
    """Deterministic point set inside the body, suitable for energy bounds.

    For a fixed (body, rng), the first k rows of body_point_set(body, c, rng)
    agree for every c >= k, so multi-resolution runs use nested supports and
    their discrete maxima are monotone.  The interval is the exception: it
    gets a plain symmetric endpoint-clustered grid of the requested size.
    """
    if count < 3:
        raise ValueError(f"count must be >= 3, got {count}")
    if body.kind == "interval":
        return _interval_grid(count)

    n = body.n
    radii = _shell_radii()

    # shell families: (unit directions on the family's sphere, overall scale)
    families = []
    if body.kind == "lq_ball" and body.q != 2.0:
        q = body.q
        families.append(("lq", 1.0))
        # the largest Euclidean ball inscribed in the l_q ball
        scale = n ** ((q - 2.0) / (2.0 * q)) if q < 2.0 else 1.0
        families.append(("l2", scale))
    else:
        families.append(("l2", 1.0))

    if body.kind == "ellipsoid":
        op = body.operator()
        base = [np.zeros((1, n)), op.T.copy(), -op.T.copy()]
    elif body.kind == "lq_ball":
        base = [np.zeros((1, n)), np.eye(n), -np.eye(n)]
    pieces = list(base)
    used = 1 + 2 * n

    if count > used:
        budget = count - used
        streams = []
        stream_w = []
        for fi, (family, scale) in enumerate(families):
            for si, r in enumerate(radii):
                gen = rng.generator(7, fi, si)
                # every stream could in principle supply the whole budget, so
                # no stream ever exhausts before the count cutoff and prefixes
                # of different counts agree exactly
                m = min(budget, 2 * _HALF_DIRS)
                dirs = _shell_directions(n, int(m), gen)
                if family == "lq":
                    dirs = _lq_scale_to_unit(dirs, body.q)
                if body.kind == "ellipsoid":
                    dirs = dirs @ body.operator().T
                streams.append(scale * r * dirs)
                stream_w.append(_SHELL_WEIGHTS[si])
        # weighted round-robin over shells so every prefix stays balanced
        cursor = [0] * len(streams)
        emitted = 0
        while emitted < budget and any(
            cursor[s] < len(streams[s]) for s in range(len(streams))
        ):
            for s, stream in enumerate(streams):
                take = min(stream_w[s], len(stream) - cursor[s])
                if take > 0:
                    pieces.append(stream[cursor[s] : cursor[s] + take])
                    cursor[s] += take
                    emitted += take
    pts = np.vstack(pieces)[:count]

    # drop near-duplicates (an axis point can collide with a shell direction)
    keep = _unique_rows(pts, tol=1e-9)
    return pts[keep]


def _unique_rows(pts: np.ndarray, tol: float) -> np.ndarray:
    keep = np.ones(len(pts), dtype=bool)
    for i in range(1, len(pts)):
        d = np.linalg.norm(pts[:i][keep[:i]] - pts[i], axis=1)
        if d.size and d.min() < tol:
            keep[i] = False
    return keep
