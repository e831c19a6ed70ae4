import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from stablab import QI, stability
from stablab.metric import c_act, distance, quotient_distance_stab, random_stability


def test_distance_to_self_is_zero(sigma):
    assert distance(sigma, sigma).value == 0


def test_distance_example(sigma, sigma_unstable):
    d = distance(sigma, sigma_unstable)
    assert d.value == pytest.approx(0.5 * math.log(2))
    assert d.witness in ("S1", "S2")


def test_integer_action_is_shift(sigma):
    s2 = c_act(sigma, 2)
    assert s2.heart == sigma.model.heart("H0[2]")
    assert c_act(sigma, 1.999).heart == s2.heart
    assert distance(sigma, s2).value == 2
    assert c_act(sigma, 1).charge.values == tuple(-v for v in sigma.charge.values)


def test_imaginary_action_rescales(sigma):
    s = c_act(sigma, 0.25j)
    assert s.heart == sigma.heart
    assert distance(sigma, s).value == pytest.approx(0.25 * math.pi)


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(seed=st.integers(0, 10**6), re=st.floats(-1, 1), im=st.floats(-1, 1))
def test_orbit_formula(a2, seed, re, im):
    s = random_stability(a2, np.random.default_rng(seed), exact=bool(seed % 2))
    lam = complex(re, im)
    assert distance(s, c_act(s, lam)).value == pytest.approx(max(abs(re), math.pi * abs(im)), abs=1e-9)


@settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(seed=st.integers(0, 10**6))
def test_metric_axioms(a2, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_stability(a2, rng, exact=False) for _ in range(3))
    assert distance(a, b).value == pytest.approx(distance(b, a).value, abs=1e-12)
    assert distance(a, c).value <= distance(a, b).value + distance(b, c).value + 1e-12


def test_quotient_distance_on_an_orbit(sigma):
    q, lam = quotient_distance_stab(sigma, c_act(sigma, 0.3 + 0.2j))
    assert q.value < 1e-4


def test_quotient_is_below_distance(sigma, sigma_unstable):
    q, _ = quotient_distance_stab(sigma, sigma_unstable)
    assert q.value <= distance(sigma, sigma_unstable).value


def test_different_hearts_have_finite_distance(a2, sigma):
    tau = stability(a2, "H3", [QI(-1, 1), QI(1, 2)])
    d = distance(sigma, tau).value
    assert 0 < d < math.inf
