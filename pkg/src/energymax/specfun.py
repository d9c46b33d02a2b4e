"""Closed-form moment constants and exact maximal energies of Euclidean balls.

Everything here reduces to ratios of Gamma functions, evaluated in log
space so that dimensions up to 1e4 stay far from overflow:

    b(n, p)        = sqrt(pi) G((n+p)/2) / (G((p+1)/2) G(n/2))
    sphere moment  = E |t_1|^p on S^{n-1} = 1 / b(n, p)
    gauss moment   = (E |W|^p)^(1/p), W centered Gaussian with E W^2 = 2
    max energy     = m_p a1 b(n, p) for the unit Euclidean ball, where m_p is
                     the one-dimensional maximal energy supplied by the caller
                     (exactly 1 at p = 1).
"""

from dataclasses import dataclass
from math import exp, log, pi, sin

__all__ = [
    "MomentConstants",
    "log_gamma",
    "b_coeff",
    "sphere_abs_moment",
    "gaussian_moment",
    "closed_form_M_ball",
    "moment_constants",
]

# Lanczos coefficients, g = 7, n = 9 (Godfrey's set; ~1e-13 relative on the
# positive real axis).
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_LOG_SQRT_TWO_PI = 0.5 * log(2.0 * pi)
_LOG_PI = log(pi)


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0, Lanczos approximation.

    Relative accuracy ~1e-13 away from the zeros of log Gamma at x = 1, 2
    (absolute accuracy ~1e-14 there).
    """
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return _LOG_PI - log(sin(pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    series = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        series += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_TWO_PI + (z + 0.5) * log(t) - t + log(series)


def _check_dimension(n: int) -> None:
    if not (isinstance(n, (int,)) and not isinstance(n, bool)) or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")


def b_coeff(n: int, p: float) -> float:
    """sqrt(pi) Gamma((n+p)/2) / (Gamma((p+1)/2) Gamma(n/2)), for 0 < p < 2.

    Equals the maximal energy of the unit Euclidean ball at p = 1, and more
    generally the ratio M_p(ball) / m_p.  Grows like n^(p/2).
    """
    _check_dimension(n)
    if not 0.0 < p < 2.0:
        raise ValueError(f"b_coeff requires 0 < p < 2, got p={p}")
    return exp(
        0.5 * _LOG_PI
        + log_gamma((n + p) / 2.0)
        - log_gamma((p + 1.0) / 2.0)
        - log_gamma(n / 2.0)
    )


def sphere_abs_moment(n: int, p: float) -> float:
    """E |t_1|^p for t uniform on S^{n-1}; any p > 0.

    Gamma((p+1)/2) Gamma(n/2) / (sqrt(pi) Gamma((n+p)/2)).  For p < 2 this is
    exactly 1 / b_coeff(n, p); at p = 2 it is 1/n.
    """
    _check_dimension(n)
    if not p > 0.0:
        raise ValueError(f"sphere_abs_moment requires p > 0, got p={p}")
    return exp(
        log_gamma((p + 1.0) / 2.0)
        + log_gamma(n / 2.0)
        - 0.5 * _LOG_PI
        - log_gamma((n + p) / 2.0)
    )


def gaussian_moment(p: float) -> float:
    """(E |W|^p)^(1/p) for the centered Gaussian with variance 2.

    2 (Gamma((1+p)/2) / Gamma(1/2))^(1/p).  This is the r = 2 member of the
    stable family with characteristic function exp(-t^2); see the stable
    module for the general sampler.
    """
    if not p > 0.0:
        raise ValueError(f"gaussian_moment requires p > 0, got p={p}")
    return 2.0 * exp((log_gamma((1.0 + p) / 2.0) - log_gamma(0.5)) / p)


def closed_form_M_ball(n: int, p: float, mp: float) -> float:
    """Maximal energy of the unit Euclidean ball: mp * b_coeff(n, p).

    ``mp`` is the one-dimensional maximal energy (estimate or the exact
    value 1 when p = 1); see discrete_energy.estimate_mp.
    """
    if not mp > 0.0:
        raise ValueError(f"mp must be positive, got {mp}")
    return mp * b_coeff(n, p)


@dataclass(frozen=True)
class MomentConstants:
    """The Gamma-ratio constants tied to one (dimension, exponent) pair.

    b * c_sphere_p = 1 holds by construction (projection of a unit vector
    onto a uniform sphere direction).
    """

    n: int
    p: float
    b: float
    c_sphere_p: float
    c_gauss: float


def moment_constants(n: int, p: float) -> MomentConstants:
    """Bundle b_coeff, the sphere moment and the Gaussian moment for (n, p)."""
    return MomentConstants(
        n=n,
        p=p,
        b=b_coeff(n, p),
        c_sphere_p=sphere_abs_moment(n, p),
        c_gauss=gaussian_moment(p),
    )
