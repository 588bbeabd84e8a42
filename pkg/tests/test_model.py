import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from rci.exceptions import ModelError
from rci.model import (ModelKind, laplace_exponent, laplace_exponent_derivative,
                       levy_density, levy_tail, log_levy_density, make_model,
                       mean_jump, phi_inverse, rho_factor, theta_root)

pos = st.floats(0.2, 5.0)
loading = st.floats(0.05, 2.0)
disc = st.floats(1e-4, 3.0)


@st.composite
def exp_models(draw):
    lam, mu, th = draw(pos), draw(pos), draw(loading)
    if draw(st.booleans()):
        return make_model("classical-exp", lam=lam, mu=mu, theta=th)
    return make_model("perturbed-exp", lam=lam, mu=mu, theta=th, sigma=draw(st.floats(0.05, 2.0)))


@st.composite
def stable_models(draw):
    return make_model("stable", alpha=draw(st.floats(1.05, 1.95)), c=draw(pos))


def test_theta_sets_premium_rate():
    m = make_model("classical-exp", lam=2.0, mu=0.5, theta=0.25)
    assert m.c == pytest.approx(1.25 * 2.0 / 0.5)
    assert m.theta == pytest.approx(0.25)
    assert m.kind is ModelKind.CLASSICAL_EXP


@pytest.mark.parametrize("kwargs", [
    dict(kind="classical-exp", lam=1, mu=1, c=0.9),
    dict(kind="classical-exp", lam=1, mu=1, theta=0.0),
    dict(kind="classical-exp", lam=1, mu=1, c=2, theta=0.5),
    dict(kind="classical-exp", lam=1, mu=1, theta=0.5, sigma=0.3),
    dict(kind="perturbed-exp", lam=1, mu=1, theta=0.5),
    dict(kind="stable", alpha=2.0, c=1.0),
    dict(kind="stable", alpha=1.5, c=-1.0),
    dict(kind="stable", alpha=1.5, c=1.0, lam=1.0),
    dict(kind="cauchy", c=1.0),
])
def test_invalid_parameters_rejected(kwargs):
    kind = kwargs.pop("kind")
    with pytest.raises(ModelError):
        make_model(kind, **kwargs)


@given(exp_models(), disc)
def test_phi_and_theta_are_roots(model, q):
    phi, th = phi_inverse(model, q), theta_root(model, q)
    assert phi > 0.0 and -model.mu < th < 0.0
    assert laplace_exponent(model, phi) == pytest.approx(q, rel=1e-10, abs=1e-14)
    assert laplace_exponent(model, th) == pytest.approx(q, rel=1e-10, abs=1e-14)
    assert laplace_exponent_derivative(model, phi) > 0.0


@given(stable_models(), disc)
def test_stable_phi_is_root(model, q):
    phi = phi_inverse(model, q)
    assert laplace_exponent(model, phi) == pytest.approx(q, rel=1e-12)


def test_classical_roots_match_quadratic():
    m = make_model("classical-exp", lam=1.0, mu=1.0, theta=0.25)
    q = 0.05
    # c s^2 + (c mu - lam - q) s - q mu = 0
    roots = np.sort(np.roots([m.c, m.c * m.mu - m.lam - q, -q * m.mu]))
    assert theta_root(m, q) == pytest.approx(roots[0], rel=1e-13)
    assert phi_inverse(m, q) == pytest.approx(roots[1], rel=1e-13)


def test_phi_at_zero_and_small_q():
    m = make_model("classical-exp", lam=1.0, mu=1.0, theta=0.25)
    assert phi_inverse(m, 0.0) == 0.0
    # Phi(q) ~ q / psi'(0) as q -> 0
    assert phi_inverse(m, 1e-10) == pytest.approx(1e-10 / (m.c - m.lam / m.mu), rel=1e-8)
    assert theta_root(m, 0.0) == pytest.approx(m.lam / m.c - m.mu)


@given(stable_models(), st.floats(0.01, 5.0))
def test_stable_tail_matches_density_integral(model, y):
    ref, _ = integrate.quad(lambda u: levy_density(model, u), y, np.inf,
                            epsabs=0, epsrel=1e-12, limit=200)
    assert levy_tail(model, y) == pytest.approx(ref, rel=1e-9)


@given(st.one_of(exp_models(), stable_models()), st.floats(1e-3, 30.0))
def test_log_density_consistent(model, y):
    assert log_levy_density(model, y) == pytest.approx(math.log(levy_density(model, y)),
                                                       rel=1e-12, abs=1e-12)
    assert levy_density(model, float(y)) == pytest.approx(levy_density(model, np.array(y)),
                                                          rel=1e-14)


def test_exponential_tail_and_mean():
    m = make_model("perturbed-exp", lam=2.0, mu=3.0, theta=0.5, sigma=0.4)
    assert levy_tail(m, 0.7) == pytest.approx(2.0 * math.exp(-2.1))
    assert mean_jump(m) == pytest.approx(2.0 / 3.0)
    assert rho_factor(m).rho == pytest.approx(1.0 / 1.5)
    s = make_model("stable", alpha=1.5, c=1.0)
    assert math.isinf(mean_jump(s))
    assert math.isinf(levy_tail(s, 0.0))
