"""Fair net premiums of reinsurance-by-capital-injection (RCI) contracts.

The extreme-loss premium is

    Pi_1(q, x, m) = varphi(q, x, m) + delta(q, sigma, m) * kappa(q, x),

with kappa = f * t, varphi = f * h_m, f = W' - Phi W, and
delta = I_m / (1 - I).  The proportional premium is Pi_2(q, x, a) =
a Pi_1(q, x, 0).

Every building block has two evaluation paths.  ``method="auto"`` uses the
closed forms available for exponential claims and falls back to quadrature
otherwise.  ``method="quadrature"`` forces the generic path, which is what
the stable model always uses and what the closed forms are tested against.

The generic double integrals are reduced to single integrals by swapping
the order of integration and doing the inner exponential integral
analytically:

    t(x)   = (1/Phi) int_x^inf nu(w) (1 - e^{-Phi (w - x)}) dw
    h_m(x) = int_{x+m}^inf nu(w) [(w - x) E1(L) - E2(L)] dw,   L = w - x - m

with E1(L) = (1 - e^{-Phi L})/Phi and E2(L) = (1 - e^{-Phi L}(1 + Phi L))/Phi^2.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import numerics
from .exceptions import DeltaMismatchError, ModelError, NumericsError
from .model import (ModelKind, ModelSpec, levy_density, levy_tail, log_levy_density,
                    mean_jump, phi_inverse, theta_root)
from .numerics import QuadratureConfig
from .scale import scale_evaluator

Q_MIN = 1e-8
Q_WARN = 1e-4

# inner integrals are resolved more tightly than the outer convolution
INNER_QUAD = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-11)
OUTER_QUAD = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-10)
# the stable model needs Mittag-Leffler evaluations inside every outer node
STABLE_INNER_QUAD = QuadratureConfig(abs_tol=1e-14, rel_tol=1e-9)
STABLE_OUTER_QUAD = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-8)

_METHODS = ("auto", "quadrature")


class SmallDiscountWarning(UserWarning):
    """q is accepted but small enough for the 1/q pole of delta to dominate."""


# --- query types -----------------------------------------------------------

@dataclass(frozen=True)
class ExtremeLoss:
    """Pays each injection C_n in full when C_n >= m."""

    m: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= 0.0):
            raise ModelError(f"retention m must be finite and >= 0, got {self.m}")


@dataclass(frozen=True)
class Proportional:
    """Pays the fraction a of every injection.

    ``a >= 1`` is allowed only with ``allow_full_cession=True``; the formulas
    stay valid but such a contract removes the cedent's incentive to avoid
    losses.
    """

    a: float
    allow_full_cession: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 0.0):
            raise ModelError(f"ceded fraction a must be >= 0, got {self.a}")
        if self.a >= 1.0 and not self.allow_full_cession:
            raise ModelError("ceded fraction a must be below 1 "
                             "(pass allow_full_cession to override)")


Contract = Union[ExtremeLoss, Proportional]


def check_discount(q: float) -> float:
    """Validate the discount rate.  Raises :class:`ModelError` for q < 1e-8."""
    q = float(q)
    if not math.isfinite(q):
        raise ModelError(f"q must be finite, got {q}")
    if q == 0.0:
        raise ModelError("q = 0: without discounting the expected injections "
                         "grow without bound, so the premium diverges")
    if q < Q_MIN:
        raise ModelError(f"q = {q} is below the minimum {Q_MIN}; the premium "
                         "has a 1/q pole and is numerically meaningless here")
    if q < Q_WARN:
        warnings.warn(f"q = {q} < {Q_WARN}: premium is dominated by the 1/q pole",
                      SmallDiscountWarning, stacklevel=3)
    return q


@dataclass(frozen=True)
class PremiumQuery:
    q: float
    x: float
    contract: Contract

    def __post_init__(self):
        check_discount(self.q)
        if not (math.isfinite(self.x) and self.x > 0.0):
            raise ModelError(f"initial surplus x must be positive, got {self.x}")
        if not isinstance(self.contract, (ExtremeLoss, Proportional)):
            raise ModelError("contract must be ExtremeLoss or Proportional")


@dataclass(frozen=True)
class PremiumBreakdown:
    """Terms of premium = phi_term + delta_factor * kappa_term.

    For a proportional contract ``phi_term`` and ``kappa_term`` already carry
    the factor a.
    """

    phi_term: float
    kappa_term: float
    delta_factor: float
    i_factor: float
    i_m_value: float
    premium: float


def _quads(model):
    if model.kind is ModelKind.STABLE:
        return STABLE_INNER_QUAD, STABLE_OUTER_QUAD
    return INNER_QUAD, OUTER_QUAD


def _check_method(method):
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")


def _use_closed(model, method):
    _check_method(method)
    return method == "auto" and model.exponential_claims


# --- helpers for the analytic inner integrals --------------------------------

# coefficients of 1 - e^{-s}(1 + s) = sum_{k>=2} (-1)^k (k-1) s^k / k!, for polyval
_E2_SERIES = np.array([(-1) ** k * (k - 1) / math.factorial(k) for k in range(15, 1, -1)]
                      + [0.0, 0.0])


def _e1(phi, L):
    """(1 - e^{-Phi L}) / Phi."""
    return -np.expm1(-phi * L) / phi


def _e2(phi, L):
    """(1 - e^{-Phi L}(1 + Phi L)) / Phi^2, series for small Phi L."""
    s = phi * np.asarray(L, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        direct = -np.expm1(-s) - s * np.exp(-s)
    return np.where(s < 0.1, np.polyval(_E2_SERIES, s), direct) / phi ** 2


def _decay_rate(model):
    """Exponential decay rate of the Levy density at infinity."""
    return model.c if model.kind is ModelKind.STABLE else model.mu


def _exp_tail_integral(f, lo, rate, cfg, args=()):
    """int_lo^inf f(w) dw for f decaying like exp(-rate w), elementwise in lo.

    Integrated in u = exp(-rate (w - lo)) on (0, 1).  Plain tanh-sinh on the
    half line can stop at a low level with a badly optimistic error estimate
    (seen at the 1e-5 level); on (0, 1) the integrand is nearly constant.
    """
    def g(u, lo, *a):
        with np.errstate(divide="ignore"):
            lu = np.log(u)
        return f(lo - lu / rate, lo, *a) / (rate * u)

    return numerics.integrate_vec(g, 0.0, 1.0, cfg, args=(lo,) + tuple(args))


def _levy_integral(model, bracket, lo, cfg):
    """int_lo^inf nu(w) bracket(w, w - lo) dw elementwise over an array of lo > 0.

    ``bracket(w, L)`` must be nonnegative.  The stable density varies on the
    scale of lo itself, and the nodes the outer convolution places near the
    origin push lo down to 1e-200 and below.  The piece (lo, 1) is therefore
    integrated on a finite interval in s = log(w/lo), where every scale
    between lo and 1 is O(1) wide.  There the product is formed in log space
    (nu(w) alone overflows) and normalised by its maximum on a coarse grid, since the
    tanh-sinh error estimate degrades for integrands of size 1e30 and up.
    The rest, (max(lo, 1), inf), goes through :func:`_exp_tail_integral`
    with the factor exp(-rate w0) taken out.  Exponential-claims densities
    are bounded, so for them the whole range takes that route.

    Subnormal lo is raised to the smallest normal double, where w keeps full
    precision.  Such lo only appear as nodes of the outer convolution, and
    the piece of it they stand for is of order 1e-300.
    """
    lo = np.asarray(lo, dtype=float)
    lo1 = np.maximum(np.atleast_1d(lo), np.finfo(float).tiny)
    rate = _decay_rate(model)
    stable = model.kind is ModelKind.STABLE
    w0 = np.maximum(lo1, 1.0) if stable else lo1

    def direct(w, w0, lo):
        return (np.exp(log_levy_density(model, w) + rate * w0)
                * bracket(w, w - lo))

    out = np.array(_exp_tail_integral(direct, w0, rate, cfg, args=(lo1,)),
                   dtype=float, ndmin=1) * np.exp(-rate * w0)
    small = (lo1 < 1.0) & stable
    if small.any():
        def log_integrand(s, lo):
            # lo may be subnormal, where lo * exp(s) overflows before the product
            w = np.exp(np.log(lo) + s)
            with np.errstate(divide="ignore"):
                return (log_levy_density(model, w) + np.log(w)
                        + np.log(bracket(w, -w * np.expm1(-s))))

        los = lo1[small]
        grid = np.linspace(0.0, 1.0, 65)[1:, None] * -np.log(los)
        ref = np.max(log_integrand(grid, los), axis=0)
        ref = np.where(np.isfinite(ref), ref, 0.0)
        scaled = numerics.integrate_vec(lambda s, lo, r: np.exp(log_integrand(s, lo) - r),
                                        0.0, -np.log(los), cfg, args=(los, ref))
        out[small] += scaled * np.exp(ref)
    return out.reshape(lo.shape) if lo.ndim else float(out[0])


def _t_generic(model, phi, x, cfg):
    """t at an array of points by tanh-sinh quadrature."""
    return _levy_integral(model, lambda w, L: _e1(phi, L), x, cfg)


def _h_generic(model, phi, m, x, cfg, statement=False):
    """h_m at an array of points; ``statement`` selects the (u - v) variant."""
    def bracket(w, L):
        lead = L if statement else L + m
        return lead * _e1(phi, L) - _e2(phi, L)

    return _levy_integral(model, bracket, np.asarray(x) + m, cfg)


# --- building blocks ---------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def t_fn(model: ModelSpec, q: float, x: float, method: str = "auto") -> float:
    """t(x) = e^{Phi x} int_x^inf e^{-Phi v} nu(v, inf) dv, x > 0."""
    if x <= 0.0:
        raise ValueError("t is evaluated on x > 0")
    phi = phi_inverse(model, q)
    if _use_closed(model, method):
        return model.lam * math.exp(-model.mu * x) / (phi + model.mu)
    return float(_t_generic(model, phi, x, _quads(model)[0]))


@functools.lru_cache(maxsize=4096)
def h_m_fn(model: ModelSpec, q: float, m: float, x: float, method: str = "auto") -> float:
    """h_m(x) = e^{Phi x} int_x^inf e^{-Phi v} int (u + m) nu(du + v + m) dv.

    This is the form that follows from the overshoot representation of
    varphi; see :func:`h_m_statement_fn` for the variant with (u - v).
    """
    if x <= 0.0:
        raise ValueError("h_m is evaluated on x > 0")
    if m < 0.0:
        raise ModelError("m must be >= 0")
    phi = phi_inverse(model, q)
    if _use_closed(model, method):
        mu = model.mu
        return (model.lam * (m * mu + 1.0) / (mu * (phi + mu))
                * math.exp(-mu * (x + m)))
    return float(_h_generic(model, phi, m, x, _quads(model)[0]))


def h_m_statement_fn(model: ModelSpec, q: float, m: float, x: float) -> float:
    """Diagnostic variant with inner integrand (u - v) nu(du + m) over (v, inf).

    Differs from :func:`h_m_fn` by the m nu(v + m, inf) contribution; kept
    only for comparison.
    """
    if x <= 0.0:
        raise ValueError("h_m is evaluated on x > 0")
    phi = phi_inverse(model, q)
    return float(_h_generic(model, phi, m, x, _quads(model)[0], statement=True))


@functools.lru_cache(maxsize=4096)
def kappa(model: ModelSpec, q: float, x: float, method: str = "auto") -> float:
    """kappa(q, x) = (f * t)(x)."""
    if x <= 0.0:
        raise ValueError("kappa is evaluated on x > 0")
    _check_method(method)
    if method == "auto" and model.kind is ModelKind.CLASSICAL_EXP:
        phi, th = phi_inverse(model, q), theta_root(model, q)
        return (model.lam / (model.c * (model.mu + phi))
                * (math.exp(th * x) - math.exp(-model.mu * x)))
    ev = scale_evaluator(model, q)
    inner, outer = _quads(model)
    phi = ev.phi
    if _use_closed(model, method):
        t = lambda y: model.lam * np.exp(-model.mu * y) / (phi + model.mu)
    else:
        t = lambda y: _t_generic(model, phi, y, inner)
    return numerics.convolve_at(ev.f, t, x, outer, vectorized=True)


@functools.lru_cache(maxsize=4096)
def varphi(model: ModelSpec, q: float, x: float, m: float, method: str = "auto") -> float:
    """varphi(q, x, m) = (f * h_m)(x)."""
    if x <= 0.0:
        raise ValueError("varphi is evaluated on x > 0")
    if m < 0.0:
        raise ModelError("m must be >= 0")
    _check_method(method)
    if method == "auto" and model.kind is ModelKind.CLASSICAL_EXP:
        mu = model.mu
        return math.exp(-mu * m) * (m * mu + 1.0) / mu * kappa(model, q, x)
    ev = scale_evaluator(model, q)
    inner, outer = _quads(model)
    phi = ev.phi
    if _use_closed(model, method):
        mu = model.mu
        h = lambda y: (model.lam * (m * mu + 1.0) / (mu * (phi + mu))
                       * np.exp(-mu * (y + m)))
    else:
        h = lambda y: _h_generic(model, phi, m, y, inner)
    return numerics.convolve_at(ev.f, h, x, outer, vectorized=True)


def kappa_gap(model: ModelSpec, q: float, x: float) -> float:
    """Part of E[e^{-q tau_x}; tau_x < inf] that f * t leaves out.

    f * t counts ruin by a jump from the absolutely continuous part of W
    only.  Two pieces are missing:

    * W(0) t(x): bounded-variation models have W(0) > 0, and the atom of the
      distributional derivative of W at the origin is not in f.
    * (sigma^2 / 2) f(x): ruin by creeping across x, possible only when
      sigma > 0.

    At most one of them is nonzero for the supported models.
    """
    ev = scale_evaluator(model, q)
    gap = ev.w_zero * t_fn(model, q, x) if ev.w_zero else 0.0
    if model.sigma > 0.0:
        gap += 0.5 * model.sigma ** 2 * ev.f(x)
    return gap


def varphi_gap(model: ModelSpec, q: float, x: float, m: float) -> float:
    """W(0) h_m(x), the analogue of :func:`kappa_gap` for varphi.

    Creeping leaves no overshoot, so only the atom contributes.
    """
    w0 = scale_evaluator(model, q).w_zero
    return w0 * h_m_fn(model, q, m, x) if w0 else 0.0


# --- kernel integrals --------------------------------------------------------

def _pm_terms(model, q):
    phi = phi_inverse(model, q)
    d = 2.0 * model.c + model.sigma ** 2 * phi
    return phi, d


def geometric_factor_i(model: ModelSpec, q: float) -> float:
    """I = int e^{Phi u} (H * G)(du).

    sigma > 0: 1 - 2q / (Phi (2c + sigma^2 Phi)); sigma = 0: 1 - q / (Phi c).

    Raises
    ------
    ModelError
        When the value falls outside (0, 1).  This happens for the stable
        model whenever q >= c Phi(q), e.g. always when alpha c^(alpha-2) >= 1.
    """
    q = check_discount(q)
    phi, d = _pm_terms(model, q)
    val = 1.0 - 2.0 * q / (phi * d)
    if not 0.0 < val < 1.0:
        raise ModelError(f"geometric factor I = {val} lies outside (0, 1) for "
                         f"{model} at q = {q}; the record-count series diverges")
    return val


@functools.lru_cache(maxsize=1024)
def i_m_parts(model: ModelSpec, q: float, m: float, method: str = "auto"):
    """(I_m^1, I_m^2) for sigma > 0.

    I_m^1 is closed form for every model with finite mean jump; I_m^2 is a
    double integral over (0, m) x (0, inf), closed form for exponential claims.
    """
    if model.sigma == 0.0:
        raise ModelError("the I_m^1 / I_m^2 split applies to sigma > 0 only")
    phi, d = _pm_terms(model, q)
    s2 = model.sigma ** 2
    gamma = d / s2
    j = (d * phi - 2.0 * q) / (2.0 * phi)
    es1 = mean_jump(model)
    i1 = math.exp(-gamma * m) * (2.0 / d) * ((s2 / d - 1.0 / phi + m) * j + es1 / phi)
    if m == 0.0:
        return i1, 0.0

    if _use_closed(model, method):
        mu = model.mu
        if abs(gamma - mu) < 1e-12 * mu:
            decay = m * math.exp(-mu * m)
        else:
            decay = (math.exp(-mu * m) - math.exp(-gamma * m)) / (gamma - mu)
        i2 = (2.0 * model.lam / (phi * s2)
              * (1.0 / mu + (m * phi - 1.0) / (mu + phi)) * decay)
        return i1, i2

    inner_cfg, outer_cfg = _quads(model)
    tail = _levy_tail_vec(model)

    def inner(v):
        g = lambda u, lo, v: (1.0 + (m * phi - 1.0) * np.exp(-phi * u)) * tail(u + m - v)
        return _exp_tail_integral(g, np.zeros_like(v), _decay_rate(model), inner_cfg,
                                  args=(v,))

    outer = numerics.integrate_vec(lambda v: np.exp(-gamma * v) * inner(v), 0.0, m,
                                   outer_cfg)
    return i1, 2.0 / (phi * s2) * float(outer)


def _levy_tail_vec(model):
    if model.exponential_claims:
        return lambda y: model.lam * np.exp(-model.mu * y)
    return np.vectorize(lambda y: levy_tail(model, y), otypes=[float])


@functools.lru_cache(maxsize=1024)
def i_m_kernel(model: ModelSpec, q: float, m: float, method: str = "auto") -> float:
    """I_m = int_{u + v > m} e^{Phi (u + v)} (u + v) H(du) G(dv)."""
    q = check_discount(q)
    if m < 0.0:
        raise ModelError("m must be >= 0")
    if model.sigma > 0.0:
        return sum(i_m_parts(model, q, m, method))
    phi = phi_inverse(model, q)
    c = model.c
    if _use_closed(model, method):
        mu = model.mu
        return model.lam * (m * mu + 1.0) * math.exp(-mu * m) / (c * mu * (phi + mu))

    def bracket(w, L):
        return w * _e1(phi, L) - _e2(phi, L)

    cfg = _quads(model)[0]
    if m > 0.0:
        return _levy_integral(model, bracket, m, cfg) / c

    # m = 0: the integrand behaves like w^(1 - alpha) at the origin, where
    # nu(w) alone overflows, so (0, 1) is done with the product in log space
    def near(w):
        with np.errstate(divide="ignore"):
            return np.exp(log_levy_density(model, w) + np.log(bracket(w, w)))

    far = lambda w, lo: levy_density(model, w) * bracket(w, w)
    return float(numerics.integrate_vec(near, 0.0, 1.0, cfg)
                 + _exp_tail_integral(far, 1.0, _decay_rate(model), cfg)) / c


def delta_closed_form(model: ModelSpec, q: float, m: float, method: str = "auto") -> float:
    """Printed closed form of delta(q, sigma, m) with rho = E[S_1]/c.

    sigma > 0:  c[2q + Phi (rho + m - 1) D] / (q Phi D) e^{-D m / sigma^2}
                + I_m^2 Phi D / (2q),   D = 2c + sigma^2 Phi.
    sigma = 0:  I_m Phi c / q.
    """
    q = check_discount(q)
    phi, d = _pm_terms(model, q)
    c = model.c
    if model.sigma == 0.0:
        return i_m_kernel(model, q, m, method) * phi * c / q
    rho = mean_jump(model) / c
    _, i2 = i_m_parts(model, q, m, method)
    first = c * (2.0 * q + phi * (rho + m - 1.0) * d) / (q * phi * d)
    return first * math.exp(-d * m / model.sigma ** 2) + i2 * phi * d / (2.0 * q)


@dataclass(frozen=True)
class DeltaCheck:
    """Both evaluations of delta and the rho that would reconcile them."""

    primary: float
    closed_form: float
    rel_diff: float
    implied_rho: float
    assumed_rho: float


def delta_dual_check(model: ModelSpec, q: float, m: float, method: str = "auto") -> DeltaCheck:
    """Compare I_m/(1 - I) with :func:`delta_closed_form`.

    ``implied_rho`` solves the closed form (linear in rho) for the value that
    reproduces I_m/(1 - I); NaN when sigma = 0, where rho does not appear.
    """
    primary = delta_factor(model, q, m, method)
    closed = delta_closed_form(model, q, m, method)
    rel = abs(primary - closed) / abs(primary)
    assumed = mean_jump(model) / model.c
    if model.sigma > 0.0:
        phi, d = _pm_terms(model, q)
        c = model.c
        _, i2 = i_m_parts(model, q, m, method)
        rest = primary - i2 * phi * d / (2.0 * q)
        scaled = rest * math.exp(d * m / model.sigma ** 2) * q * phi * d / c
        implied = (scaled - 2.0 * q) / (phi * d) - m + 1.0
    else:
        implied = math.nan
    return DeltaCheck(primary, closed, rel, implied, assumed)


def delta_factor(model: ModelSpec, q: float, m: float, method: str = "auto",
                 strict: bool = False, rtol: float = 1e-8) -> float:
    """delta(q, sigma, m) = I_m / (1 - I).

    With ``strict=True`` the printed closed form is evaluated as well and a
    :class:`DeltaMismatchError` carrying both values is raised if they differ
    by more than ``rtol``.  The two agree at m = 0 but not for m > 0, which is
    why the check is opt-in.
    """
    q = check_discount(q)
    i = geometric_factor_i(model, q)
    val = i_m_kernel(model, q, m, method) / (1.0 - i)
    if strict:
        closed = delta_closed_form(model, q, m, method)
        if abs(val - closed) > rtol * abs(val):
            raise DeltaMismatchError(
                f"delta: I_m/(1-I) = {val!r} but the closed form gives {closed!r}",
                val, closed)
    return val


# --- premiums ----------------------------------------------------------------

def _classical_extreme_loss(model, q, x, m):
    phi, th, mu = phi_inverse(model, q), theta_root(model, q), model.mu
    return (model.lam * phi * math.exp(-mu * m) * (m * mu + 1.0)
            / (mu * q * (mu + phi)) * (math.exp(th * x) - math.exp(-mu * x)))


def _extreme_loss_parts(model, q, x, m, method, corrected=False):
    phi_t = varphi(model, q, x, m, method)
    kap = kappa(model, q, x, method)
    if corrected:
        phi_t += varphi_gap(model, q, x, m)
        kap += kappa_gap(model, q, x)
    i = geometric_factor_i(model, q)
    i_m = i_m_kernel(model, q, m, method)
    delta = i_m / (1.0 - i)
    return phi_t, kap, delta, i, i_m


def premium_extreme_loss(model: ModelSpec, query: PremiumQuery, method: str = "auto",
                         corrected: bool = False) -> PremiumBreakdown:
    """Pi_1(q, x, m) = varphi(q, x, m) + delta(q, sigma, m) kappa(q, x).

    With ``corrected`` the pieces returned by :func:`varphi_gap` and
    :func:`kappa_gap` are added to the two terms, which turns kappa into the
    full Laplace transform of the ruin time.  Without it, the classical
    assembled value is checked against the direct closed form to 1e-10
    relative.
    """
    if not isinstance(query.contract, ExtremeLoss):
        raise ModelError("premium_extreme_loss needs an ExtremeLoss contract")
    q, x, m = query.q, query.x, query.contract.m
    phi_t, kap, delta, i, i_m = _extreme_loss_parts(model, q, x, m, method, corrected)
    premium = phi_t + delta * kap
    if model.kind is ModelKind.CLASSICAL_EXP and not corrected:
        direct = _classical_extreme_loss(model, q, x, m)
        scale = max(abs(direct), abs(premium))
        if scale > 0.0 and abs(direct - premium) > 1e-10 * scale:
            raise NumericsError(f"assembled premium {premium!r} disagrees with the "
                                f"closed form {direct!r}")
    return PremiumBreakdown(phi_t, kap, delta, i, i_m, premium)


def premium_proportional(model: ModelSpec, query: PremiumQuery, method: str = "auto",
                         corrected: bool = False) -> PremiumBreakdown:
    """Pi_2(q, x, a) = a varphi(q, x, 0) + a delta(q, sigma, 0) kappa(q, x)."""
    if not isinstance(query.contract, Proportional):
        raise ModelError("premium_proportional needs a Proportional contract")
    a = query.contract.a
    base = premium_extreme_loss(model, PremiumQuery(query.q, query.x, ExtremeLoss(0.0)),
                                method, corrected)
    phi_t = a * base.phi_term
    kap = a * base.kappa_term
    return PremiumBreakdown(phi_t, kap, base.delta_factor, base.i_factor,
                            base.i_m_value, a * base.premium)


def premium(model: ModelSpec, query: PremiumQuery, method: str = "auto",
            corrected: bool = False) -> PremiumBreakdown:
    """Dispatch on the contract type."""
    if isinstance(query.contract, ExtremeLoss):
        return premium_extreme_loss(model, query, method, corrected)
    return premium_proportional(model, query, method, corrected)
