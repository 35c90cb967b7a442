"""Closed-form and implicit-equation results for maxima of random utilities.

Three tiers live here:

* exact distribution of the maximum of ``n`` i.i.d. draws and its mean by
  adaptive quadrature (the reference the approximations are checked against);
* large-``n`` approximations: the tent-distribution mean ``2 - sqrt(2 pi/n)``,
  its k-norm generalization, the implicit Gaussian equation
  ``u exp(u^2 / 2v) = n sqrt(v / 2 pi)`` and its explicit log form;
* the search optimum ``N_opt`` for uniform, normal and power-law utilities.

All functions are pure.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special

from .distributions import DistributionKind, DistributionSpec
from .errors import (
    ApproximationDomainError,
    DegenerateVarianceError,
    DivergentMeanError,
    DomainError,
    InvalidParameterError,
)

QUAD_TOL = 1e-12
TAIL_MASS = 1e-14


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"gamma_fn is defined here for finite x > 0, got {x!r}")
    return math.gamma(x)


# ---------------------------------------------------------------------------
# exact extreme statistics

def tent_pdf(u: float) -> float:
    """Density of x + y for independent x, y uniform on [-1, 1]."""
    if -2.0 <= u < 0.0:
        return (2.0 + u) / 4.0
    if 0.0 <= u <= 2.0:
        return (2.0 - u) / 4.0
    return 0.0


def tent_tail(u: float) -> float:
    """P(x + y > u) for the tent density."""
    if u <= -2.0:
        return 1.0
    if u < 0.0:
        return 1.0 - (2.0 + u) ** 2 / 8.0
    if u < 2.0:
        return (2.0 - u) ** 2 / 8.0
    return 0.0


def extreme_pdf(u: float, n: int, base_pdf, base_tail) -> float:
    """Density ``n f(u) (1 - P(u))**(n-1)`` of the maximum of ``n`` draws."""
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    f = base_pdf(u)
    if n == 1 or f == 0.0:
        return f
    p = base_tail(u)
    if p >= 1.0:
        return 0.0
    return n * f * math.exp((n - 1) * math.log1p(-p))


def _quad(func, lo, hi, points=None) -> float:
    pts = None
    if points is not None:
        pts = sorted(p for p in set(points) if lo < p < hi) or None
    value, _ = integrate.quad(func, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=500, points=pts)
    return value


def extreme_mean(n: int, base_pdf, base_tail, lo: float, hi: float, points=None) -> float:
    """Mean of the maximum of ``n`` draws by quadrature of ``u * g(u)`` on [lo, hi]."""
    return _quad(lambda u: u * extreme_pdf(u, n, base_pdf, base_tail), lo, hi, points)


def extreme_normalization(n: int, base_pdf, base_tail, lo: float, hi: float, points=None) -> float:
    return _quad(lambda u: extreme_pdf(u, n, base_pdf, base_tail), lo, hi, points)


def _tent_points(n: int) -> list[float]:
    width = 2.0 / math.sqrt(n)
    return [0.0] + [2.0 - c * width for c in (0.25, 1.0, 3.0, 8.0)]


def u_m_uniform_exact(n: int) -> float:
    """Exact mean of the largest of ``n`` tent-distributed total utilities."""
    return extreme_mean(n, tent_pdf, tent_tail, -2.0, 2.0, _tent_points(n))


def _spec_functions(spec: DistributionSpec):
    if spec.kind is DistributionKind.UNIFORM_SYM:
        return (lambda x: 0.5 if -1.0 <= x <= 1.0 else 0.0), (lambda x: min(1.0, max(0.0, (1.0 - x) / 2.0)))
    if spec.kind is DistributionKind.STD_NORMAL:
        return (lambda x: math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)), (lambda x: 0.5 * math.erfc(x / math.sqrt(2.0)))
    g = spec.gamma
    return (lambda x: (g - 1.0) * x ** (-g) if x >= 1.0 else 0.0), (lambda x: x ** (1.0 - g) if x >= 1.0 else 1.0)


def _spec_domain(spec: DistributionSpec, n: int) -> tuple[float, float, list[float]]:
    if spec.kind is DistributionKind.UNIFORM_SYM:
        width = 2.0 / (n + 1)
        return -1.0, 1.0, [1.0 - c * width for c in (0.5, 2.0, 8.0)]
    if spec.kind is DistributionKind.STD_NORMAL:
        lo = float(special.ndtri(TAIL_MASS ** (1.0 / n)))
        hi = float(-special.ndtri(TAIL_MASS / n))
        peak = float(-special.ndtri(1.0 / n)) if n > 1 else 0.0
        return lo, hi, [peak - 1.0, peak, peak + 1.0]
    alpha = spec.gamma - 1.0
    lo = max(1.0, (-math.expm1(math.log(TAIL_MASS) / n)) ** (-1.0 / alpha)) if n > 1 else 1.0
    hi = (TAIL_MASS / n) ** (-1.0 / alpha)
    scale = n ** (1.0 / alpha)
    return lo, hi, [scale * c for c in (0.5, 1.0, 2.0, 5.0, 20.0, 100.0)]


def max_pdf(spec: DistributionSpec, n: int, x: float) -> float:
    """Density of the maximum of ``n`` draws from ``spec``."""
    f, tail = _spec_functions(spec)
    return extreme_pdf(x, n, f, tail)


def x_m_mean_quadrature(spec: DistributionSpec, n: int) -> float:
    """Mean of the maximum of ``n`` draws from ``spec`` by quadrature.

    The normal and power-law cases integrate over the range outside of which
    the maximum has probability below ``TAIL_MASS``.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    f, tail = _spec_functions(spec)
    lo, hi, points = _spec_domain(spec, n)
    return extreme_mean(n, f, tail, lo, hi, points)


# ---------------------------------------------------------------------------
# uniform utilities, linear and k-norm rules

def u_m_uniform_approx(n: int) -> float:
    """Large-n mean of the best linear total utility: ``2 - sqrt(2 pi / n)``."""
    if n < 2:
        raise InvalidParameterError(f"n must be at least 2, got {n}")
    return 2.0 - math.sqrt(2.0 * math.pi / n)


def delta_uniform_approx(n: int) -> float:
    """Expected buyer-vendor inequality ``1 - <u_m>/2``, equal to ``sqrt(pi / 2n)``."""
    return 1.0 - u_m_uniform_approx(n) / 2.0


def u_m_knorm_approx(n: int, k: float) -> float:
    """Gamma-function formula for the best k-norm utility, evaluated as printed.

    For k = 1 it gives ``2 - sqrt(pi/2n)``, which differs from
    :func:`u_m_uniform_approx` by a factor 2 in the correction, and for
    k != 1 it keeps the limit 2 although the k-norm of two utilities in
    (0, 1] is bounded by ``2**(1/k)``.  Use :func:`u_m_knorm_corner_approx`
    for values that agree with simulation.
    """
    if n < 2:
        raise InvalidParameterError(f"n must be at least 2, got {n}")
    if not k > 0:
        raise InvalidParameterError(f"k must be positive, got {k!r}")
    c = gamma_fn(0.5 + 1.0 / k) * math.sqrt(math.pi) / (gamma_fn(1.0 + 1.0 / k) * 4.0 ** (1.0 - 1.0 / k))
    return 2.0 - math.sqrt(c) / math.sqrt(n)


def u_m_knorm_corner_approx(n: int, k: float) -> float:
    """Large-n best k-norm utility from the corner expansion near x = y = 1.

    Near the corner ``(x^k + y^k)^(1/k) ~ 2^(1/k) (1 - (a + b)/2)`` with
    ``a = 1 - x`` and ``b = 1 - y``, so the tail above ``2^(1/k) - e`` has
    probability ``e^2 / (2 * 4^(1/k))`` and the mean of the maximum is
    ``2^(1/k) (1 - sqrt(pi / 2n))``.  Reduces to ``2 - sqrt(2 pi/n)`` at k = 1.
    """
    if n < 2:
        raise InvalidParameterError(f"n must be at least 2, got {n}")
    if not k > 0:
        raise InvalidParameterError(f"k must be positive, got {k!r}")
    return 2.0 ** (1.0 / k) * (1.0 - math.sqrt(math.pi / (2.0 * n)))


# ---------------------------------------------------------------------------
# normal utilities

def _gauss_lhs(u: float, v: float) -> float:
    return u * math.exp(u * u / (2.0 * v))


def normal_root_bracket(n: int, v: float) -> tuple[float, float]:
    """Interval guaranteed to contain the root of ``u exp(u^2/2v) = n sqrt(v/2 pi)``."""
    return 0.0, 2.0 * math.sqrt(v * math.log(n) + v)


def solve_u_m_normal(n: int, v: float) -> float:
    """Positive root of ``u exp(u^2 / 2v) = n sqrt(v / 2 pi)``.

    This is the mode approximation to the mean maximum of ``n`` draws from
    N(0, v).  The left side increases strictly for ``u > 0`` so the root is
    unique.
    """
    if n < 2:
        raise InvalidParameterError(f"n must be at least 2, got {n}")
    if not v > 0:
        raise DegenerateVarianceError(f"variance must be positive, got {v!r}")
    target = n * math.sqrt(v / (2.0 * math.pi))
    lo, hi = normal_root_bracket(n, v)
    return optimize.brentq(lambda u: _gauss_lhs(u, v) - target, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)


def u_m_correlated_root(n: int, st: float) -> float:
    """Implicit-equation mean for correlated normal utilities (variance ``2(1+st)``)."""
    return solve_u_m_normal(n, 2.0 * (1.0 + st))


def u_m_normal_approx(n: int, st: float) -> float:
    """Explicit form ``sqrt(4 (1+st) ln(n sqrt((1+st)/pi)))`` dropping the ``u`` prefactor."""
    if not -1.0 <= st <= 1.0:
        raise InvalidParameterError(f"st must lie in [-1, 1], got {st!r}")
    arg = n * math.sqrt((1.0 + st) / math.pi)
    # 1 + st cancels digits near st = -1; allow for that rounding at the boundary
    slack = 1e-12 + 2.0 * np.finfo(float).eps / max(1.0 + st, np.finfo(float).eps)
    if arg == 0.0 or arg < 1.0 - slack:
        raise ApproximationDomainError(f"n sqrt((1+st)/pi) = {arg!r} must be at least 1")
    return math.sqrt(max(0.0, 4.0 * (1.0 + st) * math.log(arg)))


# ---------------------------------------------------------------------------
# buyer's search

def x_m_uniform_exact(n: int) -> float:
    """Mean of the maximum of ``n`` uniform draws on [-1, 1]: ``1 - 2/(n+1)``."""
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    return 1.0 - 2.0 / (n + 1.0)


def x_m_normal_approx(n: int) -> float:
    return solve_u_m_normal(n, 1.0)


def _delta(gamma: float) -> float:
    return (gamma - 2.0) / (gamma - 1.0)


def _check_gamma(gamma: float) -> None:
    if not gamma > 2:
        raise DivergentMeanError(f"the mean of the maximum diverges for gamma <= 2, got {gamma!r}")


def x_m_powerlaw_approx(n: int, gamma: float, r: float = 1.0) -> float:
    """``(n r)^(1/(gamma-1)) Gamma(delta)`` with ``delta = (gamma-2)/(gamma-1)``.

    ``r`` is the fraction of utilities that follow the power law.
    """
    _check_gamma(gamma)
    if not 0 < r <= 1:
        raise InvalidParameterError(f"r must lie in (0, 1], got {r!r}")
    if n * r < 1:
        raise ApproximationDomainError(f"n r = {n * r!r} must be at least 1")
    return (n * r) ** (1.0 / (gamma - 1.0)) * gamma_fn(_delta(gamma))


def x_m_powerlaw_exact(n: int, gamma: float) -> float:
    """Exact mean of the maximum of ``n`` Pareto draws, ``n B(n, 1 - 1/(gamma-1))``."""
    _check_gamma(gamma)
    a = 1.0 / (gamma - 1.0)
    return math.exp(math.lgamma(n + 1.0) + math.lgamma(1.0 - a) - math.lgamma(n + 1.0 - a))


def x_m_powerlaw_median(n: int, gamma: float) -> float:
    return (-math.expm1(-math.log(2.0) / n)) ** (-1.0 / (gamma - 1.0))


def x_m_powerlaw_mode(n: int, gamma: float) -> float:
    """Maximizer of the density ``n (gamma-1) x^-gamma (1 - x^(1-gamma))^(n-1)``."""
    w = gamma / (gamma + (n - 1.0) * (gamma - 1.0))
    return w ** (-1.0 / (gamma - 1.0))


def n_opt_uniform(beta: float) -> float:
    """Stationary point ``sqrt(2/beta) - 1`` of ``1 - 2/(n+1) - beta n``."""
    if not beta > 0:
        raise ApproximationDomainError(f"beta must be positive, got {beta!r}")
    return math.sqrt(2.0 / beta) - 1.0


def n_opt_normal(beta: float) -> float:
    """Two-step estimate of the optimal number of examined normal variants.

    Start from ``N0 = 1/beta`` (mean maximum taken as 1), update the mean
    maximum to ``sqrt(-ln(2 pi beta^2))`` from the log form of the Gaussian
    equation at ``N0``, then solve ``beta N <x_m> = 1`` for ``N``.
    """
    if not beta > 0:
        raise ApproximationDomainError(f"beta must be positive, got {beta!r}")
    arg = 2.0 * math.pi * beta * beta
    if arg >= 1.0:
        raise ApproximationDomainError(f"2 pi beta^2 = {arg!r} must be below 1")
    n0 = 1.0 / beta
    x_m = math.sqrt(2.0 * math.log(n0 / math.sqrt(2.0 * math.pi)))
    return 1.0 / (beta * x_m)


def n_opt_normal_iterated(beta: float, iterations: int = 50, tol: float = 1e-10) -> float:
    """Fixed point of ``N = 1 / (beta x(N))`` with ``x(N)`` the root of the Gaussian equation.

    Continues the two-step scheme of :func:`n_opt_normal` to convergence.
    """
    n = n_opt_normal(beta)
    for _ in range(iterations):
        new = 1.0 / (beta * solve_u_m_normal(max(n, 2.0), 1.0))
        if abs(new - n) < tol * n:
            return new
        n = new
    return n


def n_opt_powerlaw(beta: float, gamma: float) -> float:
    """``(beta (gamma-1) / Gamma(delta))^(-1/delta)``."""
    if not beta > 0:
        raise ApproximationDomainError(f"beta must be positive, got {beta!r}")
    if not gamma > 2:
        raise ApproximationDomainError(f"gamma must exceed 2, got {gamma!r}")
    delta = _delta(gamma)
    return (beta * (gamma - 1.0) / gamma_fn(delta)) ** (-1.0 / delta)


def best_integer_n(curve) -> int:
    """1-based argmax of a sequence indexed by n = 1, 2, ..."""
    return int(np.argmax(np.asarray(curve))) + 1


# ---------------------------------------------------------------------------
# averages of several buyers

def _irwin_hall_cdf(s: float, m: int) -> float:
    if s <= 0.0:
        return 0.0
    if s >= m:
        return 1.0
    total = 0.0
    for j in range(int(math.floor(s)) + 1):
        total += (-1) ** j * math.comb(m, j) * (s - j) ** m
    return min(1.0, max(0.0, total / math.factorial(m)))


@lru_cache(maxsize=None)
def _average_lower_tail(c: float, m: int) -> float:
    return _irwin_hall_cdf(m * (c + 1.0) / 2.0, m)


def average_cdf(c: float, m: int) -> float:
    """CDF of the mean of ``m`` independent uniforms on [-1, 1]."""
    if m < 1:
        raise InvalidParameterError(f"m must be at least 1, got {m}")
    if c >= 0.0:
        return 1.0 - _average_lower_tail(-c, m)
    return _average_lower_tail(c, m)


def mean_max_of_averages(n: int, m: int) -> float:
    """Expected largest of ``n`` independent buyer averages over ``m`` uniform utilities."""
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")

    def survival(c):
        # 1 - F(c)^n with F = 1 - Q evaluated through log1p for small Q
        if c >= 0.0:
            q = _average_lower_tail(-c, m)
            return -math.expm1(n * math.log1p(-q)) if q < 1.0 else 1.0
        return 1.0 - _average_lower_tail(c, m) ** n

    points = [0.0] + [j / m * 2.0 - 1.0 for j in range(1, m)]
    return -1.0 + _quad(survival, -1.0, 1.0, points)


def variant_threshold(m: int, threshold: float, n_limit: int = 10**12) -> int:
    """Smallest ``n`` whose expected best buyer average reaches ``threshold``."""
    if not -1.0 < threshold < 1.0:
        raise InvalidParameterError(f"threshold must lie in (-1, 1), got {threshold!r}")
    if mean_max_of_averages(1, m) >= threshold:
        return 1
    lo, hi = 1, 2
    while mean_max_of_averages(hi, m) < threshold:
        lo, hi = hi, hi * 2
        if hi > n_limit:
            raise ApproximationDomainError(f"threshold {threshold} not reached with n <= {n_limit}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mean_max_of_averages(mid, m) >= threshold:
            hi = mid
        else:
            lo = mid
    return hi
