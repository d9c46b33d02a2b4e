"""Spherical embeddings of snowflaked point sets.

A finite set {x_i} with the metric d(x, y) = ||x - y||_2^alpha (0 < alpha < 1)
embeds isometrically on a sphere of radius R in Euclidean space exactly when
the Gram candidate

    G[i, j] = R^2 - ||x_i - x_j||^{2 alpha} / 2

is positive semidefinite.  Writing E* for the maximal energy of the point
set at exponent 2*alpha, the smallest such R is sqrt(E* / 2): for a
mass-one weight vector w, w' G w = R^2 - (w' D w) / 2, so G loses positive
semidefiniteness precisely when R^2 drops below half the maximal energy.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .bodies import BodySpec, RngStream, mean_width_power
from .discrete_energy import (
    _as_point_array,
    estimate_mp,
    max_energy_in_body,
    max_energy_on_points,
)
from .specfun import b_coeff

__all__ = [
    "SphericalEmbedding",
    "RadiusTooSmallError",
    "schoenberg_radius_points",
    "embed_snowflake",
    "radius_closed_form_ball",
    "radius_growth_report",
    "RadiusGrowthReport",
    "fit_power_law",
]

PSD_TOL = 1e-8


class RadiusTooSmallError(ValueError):
    """The requested sphere radius is below the minimum embeddable radius."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


@dataclass
class SphericalEmbedding:
    """Coordinates on the sphere of the given radius plus diagnostics.

    coordinates has one row per input point (m points embed in R^m; trailing
    zero directions are kept).  gram_min_eigenvalue is the smallest
    eigenvalue of the Gram candidate before clipping; the residual fields
    are worst-case absolute errors of the realized distances and norms.
    """

    radius: float
    coordinates: np.ndarray
    gram_min_eigenvalue: float
    max_distance_residual: float
    max_norm_residual: float

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "coordinates": [[float(v) for v in row] for row in self.coordinates],
            "gram_min_eigenvalue": self.gram_min_eigenvalue,
            "max_distance_residual": self.max_distance_residual,
            "max_norm_residual": self.max_norm_residual,
        }


def _snowflake_gram(points: np.ndarray, alpha: float, radius: float):
    G = points @ points.T
    sq = np.einsum("ij,ij->i", points, points)
    D2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * G, 0.0)
    np.fill_diagonal(D2, 0.0)
    return radius**2 - 0.5 * D2**alpha, np.sqrt(D2) ** (2.0 * alpha)


def schoenberg_radius_points(points, alpha: float):
    """Minimum sphere radius carrying the snowflaked point set isometrically.

    Returns (radius, measure): sqrt of half the maximal energy at exponent
    2*alpha, together with the maximizing signed measure.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    measure, report = max_energy_on_points(points, r=2.0, p=2.0 * alpha)
    return sqrt(report.value / 2.0), measure


def embed_snowflake(points, alpha: float, radius: float) -> SphericalEmbedding:
    """Place the snowflaked points on the sphere of the given radius.

    Builds the Gram candidate, eigendecomposes it, clips eigenvalues above
    -PSD_TOL * radius^2 to zero and returns coordinates with verification
    residuals.  Raises RadiusTooSmallError (carrying the offending
    eigenvalue) when the Gram candidate is genuinely indefinite, i.e. the
    radius is below the minimum returned by schoenberg_radius_points.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not radius > 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    pts = _as_point_array(points)
    G, target = _snowflake_gram(pts, alpha, radius)
    eigvals, eigvecs = np.linalg.eigh(G)
    min_eig = float(eigvals[0])
    if min_eig < -PSD_TOL * radius**2:
        raise RadiusTooSmallError(
            f"radius {radius} is below the minimum embeddable radius: Gram "
            f"candidate has eigenvalue {min_eig:.6e}",
            min_eigenvalue=min_eig,
        )
    coords = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
    # verify realized distances against the snowflaked metric
    diff = coords[:, None, :] - coords[None, :, :]
    realized = np.linalg.norm(diff, axis=2)
    dist_residual = float(np.abs(realized - np.sqrt(target)).max())
    norm_residual = float(np.abs(np.linalg.norm(coords, axis=1) - radius).max())
    return SphericalEmbedding(
        radius=radius,
        coordinates=coords,
        gram_min_eigenvalue=min_eig,
        max_distance_residual=dist_residual,
        max_norm_residual=norm_residual,
    )


def radius_closed_form_ball(n: int, alpha: float, mp: float) -> float:
    """Minimum embedding radius of the snowflaked unit Euclidean ball.

    sqrt(mp * b_coeff(n, 2*alpha) / 2) with mp the one-dimensional maximal
    energy at exponent 2*alpha (exactly 1 when alpha = 1/2).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not mp > 0.0:
        raise ValueError(f"mp must be positive, got {mp}")
    return sqrt(mp * b_coeff(n, 2.0 * alpha) / 2.0)


@dataclass
class RadiusGrowthReport:
    """Lower/upper bounds of the embedding radius across dimensions."""

    q: float
    alpha: float
    mp_estimate: float
    rows: list  # (n, R_lower, R_upper, upper_stderr)
    slope_lower: float
    slope_lower_stderr: float
    slope_upper: float
    slope_upper_stderr: float

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "alpha": self.alpha,
            "mp_estimate": self.mp_estimate,
            "rows": [
                {
                    "n": int(n),
                    "radius_lower": rl,
                    "radius_upper": ru,
                    "radius_upper_stderr": rerr,
                }
                for n, rl, ru, rerr in self.rows
            ],
            "slope_lower": self.slope_lower,
            "slope_lower_stderr": self.slope_lower_stderr,
            "slope_upper": self.slope_upper,
            "slope_upper_stderr": self.slope_upper_stderr,
        }


def fit_power_law(x, y):
    """Least-squares slope of log y against log x: (slope, intercept, stderr)."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    if lx.size < 2:
        raise ValueError("need at least two points for a slope")
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    if lx.size > 2 and res.size:
        sigma2 = res[0] / (lx.size - 2)
        cov = sigma2 * np.linalg.inv(A.T @ A)
        stderr = sqrt(cov[0, 0])
    else:
        stderr = float("nan")
    return float(coef[0]), float(coef[1]), float(stderr)


def radius_growth_report(
    q: float,
    alpha: float,
    n_list,
    points: int = 1000,
    samples: int = 200_000,
    grids=(41, 101, 401),
    rng: RngStream = RngStream(0),
) -> RadiusGrowthReport:
    """Bracket the embedding radius of snowflaked l_q balls across dimensions.

    For each n: the lower bound is sqrt(discrete max energy / 2) on a
    point set inside B_q^n, the upper bound sqrt(mp * b_coeff(n, 2 alpha) *
    mean dual-width power / 2).  Fits log-log slopes of both series; the
    upper one tracks the growth exponent alpha * (1 - 1/q).
    """
    if not 1.0 < q <= 2.0:
        raise ValueError(f"q must lie in (1, 2], got {q}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    p = 2.0 * alpha
    mp_est = estimate_mp(p, grids).value
    rows = []
    for i, n in enumerate(n_list):
        body = BodySpec.lq_ball(int(n), q)
        low = max_energy_in_body(body, 2.0, p, [points], rng.child(2 * i))
        wint, werr = mean_width_power(body, p, samples, rng.child(2 * i + 1))
        upper_sq = mp_est * b_coeff(int(n), p) * wint / 2.0
        r_low = sqrt(low.value / 2.0)
        r_up = sqrt(upper_sq)
        rows.append((int(n), r_low, r_up, 0.5 * r_up * werr / wint))
    ns = [r[0] for r in rows]
    s_low, _, e_low = fit_power_law(ns, [r[1] for r in rows])
    s_up, _, e_up = fit_power_law(ns, [r[2] for r in rows])
    return RadiusGrowthReport(
        q=q,
        alpha=alpha,
        mp_estimate=mp_est,
        rows=rows,
        slope_lower=s_low,
        slope_lower_stderr=e_low,
        slope_upper=s_up,
        slope_upper_stderr=e_up,
    )
