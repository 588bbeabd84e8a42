"""q-scale functions W^(q) and their derivatives.

* classical-exp: two-exponential closed form.
* perturbed-exp: 1/(psi(s) - q) = (mu + s)/P(s) with P a cubic whose three
  real roots are Phi(q), Theta(q) and a root below -mu; W^(q) is the sum of
  the residues.  A Gaver-Stehfest path (``method="inversion"``) is kept as an
  independent cross-check.
* stable: exp(-c x) x^(a-1) E_{a,a}((q + c^a) x^a).
"""
from __future__ import annotations

import functools
import math

import numpy as np
from scipy.interpolate import CubicSpline

from . import numerics
from .exceptions import ModelError
from .model import ModelKind, ModelSpec, eta_q, laplace_exponent, phi_inverse, theta_root


class ScaleEvaluator:
    """W^(q), W'^(q) and f = W'^(q) - Phi(q) W^(q) for a fixed (model, q).

    Parameters
    ----------
    model : ModelSpec
    q : float
        Discount rate, ``q >= 0``.
    method : {"auto", "inversion"}
        ``"auto"`` uses the closed forms.  ``"inversion"`` inverts
        ``1/(psi(s) - q)`` numerically on a lazily built grid with cubic
        interpolation (not thread-safe while the grid grows).
    """

    def __init__(self, model: ModelSpec, q: float, method: str = "auto"):
        if q < 0:
            raise ModelError("q must be nonnegative")
        if method not in ("auto", "inversion"):
            raise ValueError(f"unknown method {method!r}")
        self.model = model
        self.q = float(q)
        self.method = method
        self.phi = phi_inverse(model, q)
        self.theta = theta_root(model, q) if model.exponential_claims else None
        self.eta = eta_q(model, q) if model.kind is ModelKind.CLASSICAL_EXP else None

        if model.kind is ModelKind.PERTURBED_EXP:
            self._roots, self._coef = self._partial_fractions()
        self._nodes = None
        self._spline = None

    def __repr__(self):
        return f"ScaleEvaluator({self.model!r}, q={self.q}, method={self.method!r})"

    # -- closed forms -----------------------------------------------------

    def _partial_fractions(self):
        m = self.model
        s2 = m.sigma ** 2
        r1, r2 = self.phi, self.theta
        # the three roots of P sum to -mu - 2c/sigma^2
        r3 = -m.mu - 2.0 * m.c / s2 - r1 - r2
        roots = np.array([r1, r2, r3])
        coef = np.empty(3)
        for i, r in enumerate(roots):
            others = np.delete(roots, i)
            coef[i] = (m.mu + r) / (0.5 * s2 * np.prod(r - others))
        return roots, coef

    @property
    def w_zero(self) -> float:
        """W^(q)(0): 1/c for the classical model, 0 otherwise."""
        if self.model.kind is ModelKind.CLASSICAL_EXP:
            return 1.0 / self.model.c
        return 0.0

    def _stable_w(self, x):
        m = self.model
        a = m.alpha
        if x == 0.0:
            return 0.0
        z = (self.q + m.c ** a) * x ** a
        logw = -m.c * x + (a - 1.0) * math.log(x) + numerics.log_mittag_leffler(a, a, z)
        return math.exp(logw) if logw < numerics._LOG_MAX else math.inf

    # -- inversion path ---------------------------------------------------

    def _transform(self, s):
        return 1 / (laplace_exponent(self.model, s) - self.q)

    def _ensure_grid(self, x_max):
        if self._nodes is not None and self._nodes[-1] >= x_max:
            return
        if self._nodes is None:
            nodes, vals = [0.0], [self.w_zero]
        else:
            nodes, vals = list(self._nodes), list(self._vals)
        # extend the grid; only the new nodes are inverted
        while nodes[-1] < x_max:
            t = nodes[-1] + 0.01 * (1.0 + nodes[-1])
            nodes.append(t)
            # interpolate the bounded function exp(-Phi x) W(x)
            vals.append(numerics.laplace_invert(self._transform, t, shift=self.phi)
                        * math.exp(-self.phi * t))
        self._nodes, self._vals = np.array(nodes), np.array(vals)
        self._spline = CubicSpline(self._nodes, self._vals)

    def _inverted(self, x, derivative=False):
        self._ensure_grid(max(1.25 * x + 0.1, 1.0))
        g = float(self._spline(x))
        e = math.exp(self.phi * x)
        if not derivative:
            return e * g
        return e * (float(self._spline(x, 1)) + self.phi * g)

    # -- public API -------------------------------------------------------

    def w(self, x):
        """W^(q)(x); zero for x < 0."""
        if np.ndim(x):
            return np.array([self.w(v) for v in np.asarray(x, dtype=float)])
        x = float(x)
        if x < 0.0:
            return 0.0
        m = self.model
        if self.method == "inversion":
            return self.w_zero if x == 0.0 else self._inverted(x)
        if m.kind is ModelKind.CLASSICAL_EXP:
            mu, phi, th = m.mu, self.phi, self.theta
            return ((mu + phi) * math.exp(phi * x) - (mu + th) * math.exp(th * x)) / self.eta
        if m.kind is ModelKind.PERTURBED_EXP:
            return float(np.dot(self._coef, np.exp(self._roots * x)))
        return self._stable_w(x)

    def w_prime(self, x):
        """Derivative of W^(q) at x > 0."""
        if np.ndim(x):
            return np.array([self.w_prime(v) for v in np.asarray(x, dtype=float)])
        x = float(x)
        if x <= 0.0:
            raise ValueError("W'^(q) is evaluated on x > 0 only")
        m = self.model
        if self.method == "inversion":
            return self._inverted(x, derivative=True)
        if m.kind is ModelKind.CLASSICAL_EXP:
            mu, phi, th = m.mu, self.phi, self.theta
            return ((mu + phi) * phi * math.exp(phi * x)
                    - (mu + th) * th * math.exp(th * x)) / self.eta
        if m.kind is ModelKind.PERTURBED_EXP:
            return float(np.dot(self._coef * self._roots, np.exp(self._roots * x)))
        return self.f(x) + self.phi * self._stable_w(x)

    def f(self, x):
        """W'^(q)(x) - Phi(q) W^(q)(x), x > 0 (scalar or array).

        The exp(Phi x) parts cancel analytically in every closed form, so
        this stays accurate where W itself is large.
        """
        xa = np.asarray(x, dtype=float)
        if np.any(xa <= 0.0):
            raise ValueError("f is evaluated on x > 0 only")
        m = self.model
        if self.method == "inversion":
            if xa.ndim:
                return np.array([self.w_prime(v) - self.phi * self.w(v) for v in xa.ravel()]
                                ).reshape(xa.shape)
            return self.w_prime(float(xa)) - self.phi * self.w(float(xa))
        if m.kind is ModelKind.CLASSICAL_EXP:
            out = (m.mu + self.theta) / m.c * np.exp(self.theta * xa)
        elif m.kind is ModelKind.PERTURBED_EXP:
            r, a = self._roots[1:], self._coef[1:]
            out = np.exp(np.multiply.outer(xa, r)) @ (a * (r - self.phi))
        else:
            a = m.alpha
            z = (self.q + m.c ** a) * xa ** a
            d = numerics.ml_exponential_difference(a, z)
            out = np.exp(-m.c * xa) * xa ** (a - 2.0) * d
        return float(out) if np.ndim(out) == 0 else out


@functools.lru_cache(maxsize=256)
def scale_evaluator(model: ModelSpec, q: float, method: str = "auto") -> ScaleEvaluator:
    """Cached :class:`ScaleEvaluator` keyed on (model, q, method)."""
    return ScaleEvaluator(model, q, method)


def w_q(ev: ScaleEvaluator, x):
    return ev.w(x)


def w_q_prime(ev: ScaleEvaluator, x):
    return ev.w_prime(x)
