import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from rci.exceptions import ModelError
from rci.model import laplace_exponent, make_model
from rci.scale import ScaleEvaluator, scale_evaluator, w_q, w_q_prime

CLASSICAL = make_model("classical-exp", lam=1.0, mu=1.0, theta=0.25)
PERTURBED = make_model("perturbed-exp", lam=1.0, mu=1.0, theta=0.3, sigma=0.5)
STABLE = make_model("stable", alpha=1.5, c=3.0)
MODELS = [CLASSICAL, PERTURBED, STABLE]


def laplace_of_w(ev, s, x_max):
    g = lambda x: math.exp(-s * x) * ev.w(x)
    cuts = np.linspace(0.0, x_max, 13)
    return sum(integrate.quad(g, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
               for a, b in zip(cuts[:-1], cuts[1:]))


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
@pytest.mark.parametrize("q", [0.05, 0.5])
def test_transform_identity(model, q):
    ev = ScaleEvaluator(model, q)
    for ds in (0.5, 1.0, 2.0):
        s = ev.phi + ds
        ref = 1.0 / (laplace_exponent(model, s) - q)
        assert laplace_of_w(ev, s, 60.0 / ds) == pytest.approx(ref, rel=1e-9)


def test_values_at_origin():
    assert ScaleEvaluator(CLASSICAL, 0.1).w(0.0) == pytest.approx(1.0 / CLASSICAL.c)
    assert ScaleEvaluator(PERTURBED, 0.1).w(0.0) == pytest.approx(0.0, abs=1e-15)
    assert ScaleEvaluator(STABLE, 0.1).w(0.0) == 0.0
    for m in MODELS:
        assert ScaleEvaluator(m, 0.1).w(-1.0) == 0.0


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
@given(x=st.floats(0.05, 8.0), q=st.floats(0.01, 2.0))
def test_derivative_and_f(model, x, q):
    ev = scale_evaluator(model, q)
    h = 1e-5 * max(x, 1.0)
    fd = (ev.w(x + h) - ev.w(x - h)) / (2 * h)
    assert ev.w_prime(x) == pytest.approx(fd, rel=1e-6)
    assert ev.f(x) == pytest.approx(ev.w_prime(x) - ev.phi * ev.w(x), rel=1e-8,
                                    abs=1e-12 * ev.w_prime(x))


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_w_positive_increasing(model):
    ev = ScaleEvaluator(model, 0.2)
    xs = np.linspace(0.01, 10.0, 200)
    w = ev.w(xs)
    assert np.all(w > 0) and np.all(np.diff(w) > 0)
    assert np.all(ev.f(xs) > 0)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.kind.value)
def test_inversion_cross_check(model):
    a = ScaleEvaluator(model, 0.05)
    b = ScaleEvaluator(model, 0.05, method="inversion")
    for x in (0.1, 0.7, 2.0, 4.5):
        assert b.w(x) == pytest.approx(a.w(x), rel=1e-5)
        assert b.w_prime(x) == pytest.approx(a.w_prime(x), rel=2e-4)


def test_vectorized_f_matches_scalar():
    for m in MODELS:
        ev = ScaleEvaluator(m, 0.3)
        xs = np.array([0.05, 0.5, 3.0, 9.0])
        assert np.allclose(ev.f(xs), [ev.f(x) for x in xs], rtol=1e-13, atol=0)
        assert w_q(ev, 1.0) == ev.w(1.0) and w_q_prime(ev, 1.0) == ev.w_prime(1.0)


def test_domain_errors():
    ev = ScaleEvaluator(CLASSICAL, 0.1)
    with pytest.raises(ValueError):
        ev.f(0.0)
    with pytest.raises(ValueError):
        ev.w_prime(-1.0)
    with pytest.raises(ModelError):
        ScaleEvaluator(CLASSICAL, -0.1)
    with pytest.raises(ValueError):
        ScaleEvaluator(CLASSICAL, 0.1, method="series")
