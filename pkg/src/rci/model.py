"""Risk-model catalog and its analytic primitives.

Three spectrally negative Levy models are supported:

* ``classical-exp``  Cramer-Lundberg surplus with Poisson(lambda) claims of
  exponential(mu) size and premium rate ``c``.
* ``perturbed-exp``  the same plus a Brownian perturbation of volatility sigma.
* ``stable``         tempered spectrally negative stable process with Laplace
  exponent ``(s + c)**alpha - c**alpha``.

All functions are pure; :class:`ModelSpec` is frozen and hashable so it can be
used as a cache key.

``laplace_exponent`` is written with plain arithmetic operators so that it also
accepts ``mpmath`` numbers (used by the Laplace-inversion cross-check).
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize, special

from .exceptions import ModelError, NumericsError


class ModelKind(str, enum.Enum):
    CLASSICAL_EXP = "classical-exp"
    PERTURBED_EXP = "perturbed-exp"
    STABLE = "stable"


@dataclass(frozen=True)
class ModelSpec:
    """Validated risk-model parameters. Build with :func:`make_model`."""

    kind: ModelKind
    c: float
    lam: Optional[float] = None
    mu: Optional[float] = None
    sigma: float = 0.0
    alpha: Optional[float] = None

    @property
    def exponential_claims(self) -> bool:
        return self.kind in (ModelKind.CLASSICAL_EXP, ModelKind.PERTURBED_EXP)

    @property
    def theta(self) -> Optional[float]:
        """Safety loading implied by ``c`` (exponential-claims models only)."""
        if not self.exponential_claims:
            return None
        return self.c * self.mu / self.lam - 1.0


@dataclass(frozen=True)
class RhoFactor:
    """Ratio of the mean claim rate to the premium rate, E[S_1]/c."""

    rho: float


def _positive(name, value):
    if value is None:
        raise ModelError(f"{name} is required")
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ModelError(f"{name} must be positive and finite, got {value}")
    return value


def make_model(kind, *, lam=None, mu=None, c=None, theta=None, sigma=None,
               alpha=None) -> ModelSpec:
    """Validate raw parameters and return a :class:`ModelSpec`.

    For the exponential-claims models either ``c`` or the safety loading
    ``theta`` must be given; with ``theta`` the premium rate is
    ``c = (1 + theta) * lam / mu``.

    Raises
    ------
    ModelError
        On unknown kinds, out-of-range parameters, or when the net profit
        condition ``lam / mu < c`` fails.
    """
    try:
        kind = ModelKind(kind)
    except ValueError:
        raise ModelError(f"unknown model kind {kind!r}") from None

    if kind is ModelKind.STABLE:
        if lam is not None or mu is not None or theta is not None:
            raise ModelError("stable model takes only alpha and c")
        if sigma not in (None, 0, 0.0):
            raise ModelError("stable model has no Brownian part (sigma must be 0)")
        alpha = float(alpha) if alpha is not None else None
        if alpha is None or not 1.0 < alpha < 2.0:
            raise ModelError(f"alpha must lie strictly inside (1, 2), got {alpha}")
        return ModelSpec(kind=kind, c=_positive("c", c), alpha=alpha)

    if alpha is not None:
        raise ModelError("alpha applies only to the stable model")
    lam = _positive("lambda", lam)
    mu = _positive("mu", mu)
    if (c is None) == (theta is None):
        raise ModelError("give exactly one of c or theta")
    if theta is not None:
        theta = float(theta)
        c = (1.0 + theta) * lam / mu
        if theta <= 0.0:
            raise ModelError(f"net profit condition violated: theta={theta} <= 0")
    c = _positive("c", c)
    if lam / mu >= c:
        raise ModelError(
            f"net profit condition violated: lambda/mu = {lam / mu} >= c = {c}")

    if kind is ModelKind.CLASSICAL_EXP:
        if sigma not in (None, 0, 0.0):
            raise ModelError("classical-exp model requires sigma = 0")
        sigma = 0.0
    else:
        sigma = _positive("sigma", sigma)
    return ModelSpec(kind=kind, c=c, lam=lam, mu=mu, sigma=sigma)


def laplace_exponent(model: ModelSpec, s):
    """psi(s) = log E[exp(s X_1)] for the dual process X = -Y.

    Defined for ``s > -mu`` (exponential claims) or ``s > -c`` (stable); the
    negative range is needed to locate the negative root Theta(q).
    """
    if model.kind is ModelKind.STABLE:
        return (s + model.c) ** model.alpha - model.c ** model.alpha
    return (model.c * s + 0.5 * model.sigma ** 2 * s * s
            - model.lam * s / (model.mu + s))


def laplace_exponent_derivative(model: ModelSpec, s):
    if model.kind is ModelKind.STABLE:
        return model.alpha * (s + model.c) ** (model.alpha - 1.0)
    return (model.c + model.sigma ** 2 * s
            - model.lam * model.mu / (model.mu + s) ** 2)


def _classical_roots(model, q):
    # c s^2 + (c mu - lam - q) s - q mu = 0; pick the cancellation-free root
    # first and recover the other from the product -q mu / c.
    c, lam, mu = model.c, model.lam, model.mu
    b = c * mu - lam - q
    eta = math.sqrt(b * b + 4.0 * q * mu * c)
    if b >= 0.0:
        theta = (-b - eta) / (2.0 * c)
        phi = -q * mu / (c * theta)
    else:
        phi = (-b + eta) / (2.0 * c)
        theta = -q * mu / (c * phi) if phi > 0.0 else (-b - eta) / (2.0 * c)
    return phi, theta, eta


def eta_q(model: ModelSpec, q: float) -> float:
    """sqrt((q + lam - c mu)^2 + 4 q mu c) for the classical model."""
    return _classical_roots(model, q)[2]


def _check_q(q):
    q = float(q)
    if not math.isfinite(q) or q < 0.0:
        raise ModelError(f"q must be nonnegative, got {q}")
    return q


def _newton_polish(model, q, s, steps=2):
    for _ in range(steps):
        d = laplace_exponent_derivative(model, s)
        if d == 0.0:
            break
        step = (laplace_exponent(model, s) - q) / d
        s -= step
        if abs(step) <= 1e-16 * max(1.0, abs(s)):
            break
    return s


def phi_inverse(model: ModelSpec, q: float) -> float:
    """Right inverse Phi(q) = sup{s >= 0 : psi(s) = q}."""
    q = _check_q(q)
    if q == 0.0:
        return 0.0
    if model.kind is ModelKind.CLASSICAL_EXP:
        return _classical_roots(model, q)[0]
    if model.kind is ModelKind.STABLE:
        c, alpha = model.c, model.alpha
        # (q + c^a)^(1/a) - c without cancellation for small q
        return c * math.expm1(math.log1p(q / c ** alpha) / alpha)

    # perturbed: psi is convex with psi(0)=0 and psi'(0)>0, so bracket upward
    f = lambda s: laplace_exponent(model, s) - q
    hi = max(q / model.c, math.sqrt(2.0 * q) / model.sigma, 1e-12)
    for _ in range(200):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:  # pragma: no cover
        raise NumericsError("could not bracket Phi(q)")
    root = optimize.brentq(f, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                           maxiter=500)
    return _newton_polish(model, q, root)


def theta_root(model: ModelSpec, q: float) -> float:
    """Negative root Theta(q) of psi(s) = q (exponential-claims models).

    For ``q = 0`` the nonzero root ``lambda/c - mu`` (classical) is returned.
    """
    if not model.exponential_claims:
        raise ModelError("Theta(q) is defined only for exponential-claims models")
    q = _check_q(q)
    if model.kind is ModelKind.CLASSICAL_EXP:
        return _classical_roots(model, q)[1]

    c, lam, mu, s2 = model.c, model.lam, model.mu, model.sigma ** 2
    if q == 0.0:
        # psi(s)/s = c + s2 s / 2 - lam / (mu + s) has one root in (-mu, 0)
        g = lambda s: (mu + s) * (c + 0.5 * s2 * s) - lam
    else:
        # numerator of psi(s) - q; positive at -mu, equal to -q mu at 0
        g = lambda s: (mu + s) * (0.5 * s2 * s * s + c * s - q) - lam * s
    root = optimize.brentq(g, -mu, 0.0, xtol=1e-300,
                           rtol=4 * np.finfo(float).eps, maxiter=500)
    return _newton_polish(model, q, root) if q > 0.0 else root


@functools.lru_cache(maxsize=64)
def _rgamma_neg(alpha):
    # 1/Gamma(-alpha), positive for alpha in (1, 2)
    return float(special.rgamma(-alpha))


def levy_density(model: ModelSpec, y):
    """Density of the Levy measure nu(dy)/dy, y > 0."""
    if isinstance(y, float):
        # scalar fast path: this sits in the innermost quadrature loops
        if model.kind is ModelKind.STABLE:
            a = model.alpha
            return math.exp(-model.c * y) * y ** (-1.0 - a) * _rgamma_neg(a)
        return model.lam * model.mu * math.exp(-model.mu * y)
    y = np.asarray(y, dtype=float)
    if model.kind is ModelKind.STABLE:
        a = model.alpha
        out = np.exp(-model.c * y) * y ** (-1.0 - a) / special.gamma(-a)
    else:
        out = model.lam * model.mu * np.exp(-model.mu * y)
    return out[()] if out.ndim == 0 else out


def log_levy_density(model: ModelSpec, y):
    """log of :func:`levy_density`; finite where the density itself overflows."""
    y = np.asarray(y, dtype=float)
    if model.kind is ModelKind.STABLE:
        a = model.alpha
        out = -model.c * y - (1.0 + a) * np.log(y) + math.log(_rgamma_neg(a))
    else:
        out = math.log(model.lam * model.mu) - model.mu * y
    return out[()] if out.ndim == 0 else out


def levy_tail(model: ModelSpec, y: float) -> float:
    """nu(y, inf): rate of claims larger than ``y`` (``y > 0``).

    Exponential claims use the closed form; the stable tail is integrated
    numerically.
    """
    y = float(y)
    if y < 0.0:
        raise ModelError("levy_tail needs y >= 0")
    if model.exponential_claims:
        return model.lam * math.exp(-model.mu * y)
    if y == 0.0:
        return math.inf
    a, c = model.alpha, model.c
    # substitute u = y (1 + t) so the integrand is smooth on (0, inf)
    g = lambda t: math.exp(-c * y * t) * (1.0 + t) ** (-1.0 - a)
    val, _ = integrate.quad(g, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return val * math.exp(-c * y) * y ** (-a) / special.gamma(-a)


def mean_jump(model: ModelSpec) -> float:
    """E[S_1] = integral of the Levy tail over (0, inf).

    Infinite for the stable model: the tail behaves like y**-alpha at 0.
    """
    if model.exponential_claims:
        return model.lam / model.mu
    return math.inf


def rho_factor(model: ModelSpec) -> RhoFactor:
    return RhoFactor(mean_jump(model) / model.c)
