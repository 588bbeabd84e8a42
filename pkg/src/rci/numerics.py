"""Numerical kernels with explicit tolerances.

Quadrature and bracketing are delegated to QUADPACK / Brent (scipy); the
Laplace inversion uses mpmath's Gaver-Stehfest implementation in extended
precision.  The Mittag-Leffler function is evaluated here directly because
the stable-model scale function depends on its accuracy for large arguments.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Tuple

import mpmath
import numpy as np
from scipy import integrate as _spi
from scipy import optimize
from scipy.special import gammaln, rgamma, roots_legendre

from .exceptions import NumericsError

# Largest argument of exp() that stays finite in double precision.
_LOG_MAX = 709.0


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 10_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, x_max] with ``n_points`` nodes."""

    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > 0:
            raise ValueError("x_max must be positive")
        if self.n_points < 2:
            raise ValueError("a grid needs at least two points")

    @property
    def step(self) -> float:
        return self.x_max / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.n_points)


def integrate(f: Callable[[float], float], a: float, b: float,
             cfg: QuadratureConfig = DEFAULT_QUAD, points=None) -> float:
    """Adaptive quadrature of ``f`` over (a, b); ``b`` may be ``inf``.

    Raises :class:`NumericsError` when QUADPACK reports that the requested
    tolerance was not met.
    """
    if a == b:
        return 0.0
    kwargs = dict(epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                  limit=cfg.max_subdivisions, full_output=1)
    if points is not None and math.isfinite(b):
        kwargs["points"] = points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _spi.IntegrationWarning)
        out = _spi.quad(f, a, b, **kwargs)
    value, abserr = out[0], out[1]
    if len(out) > 3:
        # ier > 0; accept only if the reported error still meets the request
        if not abserr <= max(cfg.abs_tol, cfg.rel_tol * abs(value)) * 10:
            raise NumericsError(
                f"quadrature on ({a}, {b}) did not converge: "
                f"value={value!r}, error estimate={abserr!r}: {out[3]}")
    if not math.isfinite(value):
        raise NumericsError(f"quadrature on ({a}, {b}) returned {value}")
    return value


def integrate_vec(f: Callable, a, b, cfg: QuadratureConfig = DEFAULT_QUAD,
                  args=()) -> np.ndarray:
    """Elementwise integrals of a vectorized integrand (tanh-sinh rule).

    ``a`` and ``b`` broadcast against each other and against ``args``;
    ``b`` may be ``inf``.  ``f(x, *args)`` receives arrays.  The rule never
    evaluates the endpoints and copes with integrable endpoint
    singularities, which is why it is used for the nested integrals of the
    stable model.

    Raises :class:`NumericsError` if any element misses the tolerance.
    """
    with np.errstate(under="ignore"):
        res = _spi.tanhsinh(f, a, b, args=args, atol=cfg.abs_tol, rtol=cfg.rel_tol)
    ok = np.asarray(res.success)
    if not ok.all():
        status = np.asarray(res.status)[~ok].ravel()[0]
        raise NumericsError(f"tanh-sinh quadrature failed (status {status}); "
                            f"error estimate {np.max(res.error)!r}")
    out = np.asarray(res.integral, dtype=float)
    if not np.all(np.isfinite(out)):
        raise NumericsError("tanh-sinh quadrature returned a non-finite value")
    return out[()] if out.ndim == 0 else out


def find_root(f: Callable[[float], float], bracket: Tuple[float, float],
              tol: float = 1e-12) -> float:
    """Root of ``f`` inside a sign-changing bracket (Brent's method)."""
    lo, hi = bracket
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NumericsError(
            f"invalid bracket ({lo}, {hi}): f has the same sign at both ends")
    return optimize.brentq(f, lo, hi, xtol=tol * 1e-3, rtol=max(tol, 4e-16),
                           maxiter=1000)


def convolve_at(f: Callable[[float], float], g: Callable[[float], float],
                x: float, cfg: QuadratureConfig = DEFAULT_QUAD,
                vectorized: bool = False) -> float:
    """(f * g)(x) = integral over (0, x) of f(x - y) g(y) dy.

    With ``vectorized=True`` both functions must accept arrays and the
    tanh-sinh rule of :func:`integrate_vec` is used instead of QUADPACK.
    The range is then split at x/2 and each half is integrated in the
    variable that vanishes at its end, so neither f nor g is ever evaluated
    at an argument that rounded to zero.
    """
    if x <= 0.0:
        return 0.0
    if vectorized:
        h = 0.5 * x
        lower = integrate_vec(lambda y: f(x - y) * g(y), 0.0, h, cfg)
        upper = integrate_vec(lambda u: f(u) * g(x - u), 0.0, h, cfg)
        return float(lower + upper)
    return integrate(lambda y: f(x - y) * g(y), 0.0, x, cfg)


# --- Mittag-Leffler -------------------------------------------------------

ML_ASYMPTOTIC_THRESHOLD = 150.0


def _ml_series(alpha, beta, z):
    """Power series; z >= 0.  Stops once three consecutive terms are
    negligible relative to the running sum."""
    if z == 0.0:
        return float(rgamma(beta))
    logz = math.log(z)
    total = 0.0
    small = 0
    k = 0
    while True:
        term = math.exp(k * logz - gammaln(beta + alpha * k))
        total += term
        if k > 2 and abs(term) < 1e-16 * abs(total):
            small += 1
            if small == 3:
                return total
        else:
            small = 0
        k += 1
        if k > 100_000:  # pragma: no cover
            raise NumericsError("Mittag-Leffler series did not converge")


def _ml_algebraic_tail(alpha, beta, z, kmax=None):
    """-sum_{k>=1} z^-k / Gamma(beta - alpha k), truncated at its smallest term."""
    out = 0.0
    prev = math.inf
    for k in range(1, kmax or 60):
        term = float(rgamma(beta - alpha * k)) * z ** (-k)
        if abs(term) > prev and term != 0.0:
            break
        out -= term
        if term != 0.0:
            prev = abs(term)
    return out


def _ml_log_asymptotic(alpha, beta, z):
    return (-math.log(alpha) + (1.0 - beta) / alpha * math.log(z)
            + z ** (1.0 / alpha))


def mittag_leffler(alpha: float, beta: float, z: float) -> float:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for z >= 0.

    Series summation up to ``z = 150``; beyond that the exponential
    asymptotic form plus its algebraic corrections.

    Raises
    ------
    OverflowError
        When the result is beyond the double-precision range.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if z < 0:
        raise ValueError("only z >= 0 is supported")
    if z <= ML_ASYMPTOTIC_THRESHOLD:
        return _ml_series(alpha, beta, z)
    log_lead = _ml_log_asymptotic(alpha, beta, z)
    if log_lead > _LOG_MAX:
        raise OverflowError(f"E_{{{alpha},{beta}}}({z}) overflows")
    return math.exp(log_lead) + _ml_algebraic_tail(alpha, beta, z)


def log_mittag_leffler(alpha: float, beta: float, z: float) -> float:
    """log E_{alpha,beta}(z), finite even where the function overflows.

    Only valid where E is positive (always true for beta >= alpha or z
    large)."""
    if z <= ML_ASYMPTOTIC_THRESHOLD:
        return math.log(_ml_series(alpha, beta, z))
    lead = _ml_log_asymptotic(alpha, beta, z)
    corr = _ml_algebraic_tail(alpha, beta, z)
    return lead + math.log1p(corr * math.exp(-lead)) if lead < _LOG_MAX else lead


@functools.lru_cache(maxsize=8)
def _unit_gauss_legendre(n):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def ml_exponential_difference(alpha: float, w, adaptive: bool = False,
                              n_nodes: int = 24):
    """E_{a,a-1}(w) - w^(1/a) E_{a,a}(w) for 1 < a < 2 and w > 0 (scalar or array).

    The two terms share the same exponentially large leading part, so the
    direct difference loses roughly w^(1/a)/ln(10) digits.  For
    w^(1/a) > 3 the exponential parts are cancelled analytically and the
    remainder is taken from the Hankel-contour integral along
    arg(zeta) = +-pi.  The O(1/w) part of that integral vanishes identically
    (both coefficients carry 1/Gamma at a non-positive integer), so it is
    removed before integrating.

    The contour integrand is smooth and decays like exp(t cos(pi/a)); it is
    integrated with a fixed Gauss-Legendre rule on pieces no longer than a
    half-period of the oscillation, and the substitution t = v^2 on the
    first piece absorbs the fractional powers at the origin.  ``adaptive``
    switches to QUADPACK on the same pieces (slow; used as a cross-check).
    """
    a = alpha
    if not 1.0 < a < 2.0:
        raise ValueError("alpha must lie in (1, 2)")
    w_arr = np.asarray(w, dtype=float)
    if w_arr.ndim:
        flat = w_arr.ravel()
        out = np.empty_like(flat)
        big = flat ** (1.0 / a) > 3.0
        for i in np.flatnonzero(~big):
            out[i] = ml_exponential_difference(a, float(flat[i]))
        if big.any():
            out[big] = _ml_difference_contour(a, flat[big], adaptive, n_nodes)
        return out.reshape(w_arr.shape)
    w = float(w)
    w1a = w ** (1.0 / a)
    if w1a <= 3.0:
        return _ml_series(a, a - 1.0, w) - w1a * _ml_series(a, a, w)
    return float(_ml_difference_contour(a, np.array([w]), adaptive, n_nodes)[0])


def _ml_difference_contour(a, w, adaptive, n_nodes):
    """Contour-integral branch of :func:`ml_exponential_difference`, w array."""
    p1 = (2.0 - a) / a
    p2 = (1.0 - a) / a
    cs, sn = math.cos(math.pi / a), math.sin(math.pi / a)
    w1a = w ** (1.0 / a)

    # r = t^a turns r^(1/a) into t; t has shape (nodes, 1), w shape (k,)
    def integrand(t):
        r = t ** a
        ph = t * sn
        val = (r ** p1 * np.sin(ph + math.pi * p1)
               - w1a * r ** p2 * np.sin(ph + math.pi * p2))
        return np.exp(t * cs) * val * r / (r + w) * a * t ** (a - 1.0)

    # stop at e^-45; pieces of at most a half-period and two decay lengths
    upper = 45.0 / -cs
    step = min(math.pi / sn, 2.0 / -cs)
    edges = np.append(np.arange(step, upper, step), upper)

    if adaptive:
        cfg = QuadratureConfig(1e-300, 1e-10)
        out = np.empty_like(w)
        for k in range(len(w)):
            f = lambda t: 0.0 if t == 0.0 else float(integrand(np.array([[t]]))[0, k])
            total = 0.0
            lo = 0.0
            for hi in edges:
                total += integrate(f, lo, hi, cfg)
                lo = hi
            out[k] = total
        return -out / (a * math.pi * w)

    u, wu = _unit_gauss_legendre(n_nodes)
    lo, hi = edges[:-1], edges[1:]
    t_rest = (lo[:, None] + (hi - lo)[:, None] * u[None, :]).ravel()
    w_rest = ((hi - lo)[:, None] * wu[None, :]).ravel()
    t_first = edges[0] * u ** 2
    w_first = 2.0 * edges[0] * u * wu
    t = np.concatenate((t_first, t_rest))
    weights = np.concatenate((w_first, w_rest))
    return -(weights @ integrand(t[:, None])) / (a * math.pi * w)


# --- Laplace inversion ----------------------------------------------------

def laplace_invert(F: Callable, t: float, n_terms: int = 18, shift: float = 0.0,
                   check_terms: int | None = 14, check_rtol: float = 1e-3) -> float:
    """Gaver-Stehfest inversion of the Laplace transform ``F`` at ``t > 0``.

    ``F`` is called with ``mpmath`` numbers and must use plain arithmetic.
    With ``shift = b`` the routine inverts ``F(s + b)`` and multiplies by
    ``exp(b t)``; choosing ``b`` at or above the growth rate of the original
    function keeps Gaver-Stehfest in its reliable regime (bounded, smooth,
    monotone targets).

    A second inversion with ``check_terms`` terms guards against
    catastrophic cancellation; disagreement beyond ``check_rtol`` raises
    :class:`NumericsError`.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if n_terms % 2:
        raise ValueError("Gaver-Stehfest needs an even number of terms")

    def shifted(s):
        return F(s + shift)

    def run(n):
        with mpmath.workdps(max(30, 2 * n)):
            v = mpmath.invertlaplace(shifted, t, method="stehfest", degree=n)
            return float(v * mpmath.exp(shift * t))

    value = run(n_terms)
    if check_terms:
        other = run(check_terms)
        scale = max(abs(value), abs(other), 1e-300)
        if abs(value - other) > check_rtol * scale:
            raise NumericsError(
                f"Laplace inversion unstable at t={t}: {value!r} ({n_terms} terms) "
                f"vs {other!r} ({check_terms} terms)")
    if not math.isfinite(value):
        raise NumericsError(f"Laplace inversion returned {value} at t={t}")
    return value
