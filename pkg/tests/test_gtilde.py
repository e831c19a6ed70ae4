import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablab.errors import DomainError
from stablab.gtilde import (
    GroupElement,
    c_embed,
    check_element,
    dG,
    delta,
    g_act,
    g_compose,
    g_inverse,
    hyp_distance,
    mobius_project,
    quotient_distance_G,
    random_element,
    theta_eval,
    theta_inverse_bisect,
)
from stablab.metric import c_act, distance
from stablab.stability import semistable_phases

E = GroupElement.identity()
elements = st.integers(0, 10**6).map(lambda s: random_element(np.random.default_rng(s), lift_range=2))


def close(g, h, tol=1e-12):
    ts = np.linspace(-1, 1, 9)
    return np.allclose(g.matrix, h.matrix, atol=tol) and np.allclose(theta_eval(g, ts), theta_eval(h, ts), atol=tol)


def test_theta_examples():
    assert theta_eval(E, 0.3) == pytest.approx(0.3)
    assert theta_eval(GroupElement.diagonal(4), 0.25) == pytest.approx(math.atan(0.25) / math.pi)
    assert theta_eval(GroupElement.diagonal(7), 0.5) == pytest.approx(0.5)
    r = GroupElement.rotation(1 / 3)
    assert theta_eval(g_compose(r, r), 0.1) == pytest.approx(0.1 + 2 / 3)


def test_group_laws():
    h = GroupElement.diagonal(3)
    assert close(g_compose(E, h), h)
    assert close(g_inverse(E), E)
    assert close(g_inverse(GroupElement.rotation(0.2)), GroupElement.rotation(-0.2))


def test_inverse_matches_bisection():
    g = GroupElement.diagonal(4)
    gi = g_inverse(g)
    for t in np.linspace(-1.5, 1.5, 13):
        assert theta_eval(gi, t) == pytest.approx(theta_inverse_bisect(g, t), abs=1e-10)


def test_delta_examples():
    assert delta(E) == 0
    assert delta(GroupElement.rotation(1 / 3)) == pytest.approx(1 / 3)
    assert dG(E, GroupElement.rotation(1 / 3)) == pytest.approx(1 / 3)
    for lam in (0.3 + 0.1j, -0.7 + 0.05j, 0.2 - 0.3j):
        assert delta(c_embed(lam)) == pytest.approx(max(abs(lam.real), math.pi * abs(lam.imag)), abs=1e-9)


def test_projection_and_hyperbolic_distance():
    assert mobius_project(E) == 1j
    assert mobius_project(GroupElement.diagonal(4)) == pytest.approx(4j)
    assert hyp_distance(1j, 1j) == 0
    assert hyp_distance(1j, 3j) == pytest.approx(math.log(3))
    with pytest.raises(DomainError):
        hyp_distance(1j, 1 + 0j)
    with pytest.raises(DomainError):
        GroupElement(((1, 0), (0, -1)))


@pytest.mark.parametrize("a", [2, 4, 10])
def test_quotient_of_diagonal(a):
    q, _ = quotient_distance_G(E, GroupElement.diagonal(a))
    assert q == pytest.approx(0.5 * math.log(a), abs=1e-3)


def test_quotient_of_equal_elements():
    g = GroupElement.diagonal(3)
    assert quotient_distance_G(g, g)[0] == 0


def test_diagonal_sequence_converges():
    target = GroupElement.diagonal(4)
    ds = [dG(GroupElement.diagonal(4 + 1 / n), target) for n in (1, 10, 100, 1000)]
    assert ds == sorted(ds, reverse=True) and ds[-1] < 1e-3


@settings(max_examples=40, deadline=None)
@given(g=elements)
def test_element_invariants(g):
    assert check_element(g).ok
    assert close(g_compose(g, g_inverse(g)), E, 1e-9)
    assert delta(g) > 0


@settings(max_examples=30, deadline=None)
@given(f=elements, g=elements, h=elements)
def test_left_invariance_and_metric(f, g, h):
    assert dG(g_compose(f, g), g_compose(f, h)) == pytest.approx(dG(g, h), abs=1e-9)
    assert dG(g, h) == pytest.approx(dG(h, g), abs=1e-9)
    assert dG(g, h) <= dG(g, f) + dG(f, h) + 1e-9


@settings(max_examples=30, deadline=None)
@given(g=elements, re=st.floats(-1, 1), im=st.floats(-1, 1))
def test_projection_constant_on_cosets(g, re, im):
    assert mobius_project(g_compose(g, c_embed(complex(re, im)))) == pytest.approx(mobius_project(g), abs=1e-9)


def test_action(sigma):
    assert g_act(sigma, E).heart == sigma.heart
    lam = 0.3 + 0.2j
    assert distance(g_act(sigma, c_embed(lam)), c_act(sigma, lam)).value < 1e-12
    rng = np.random.default_rng(5)
    for _ in range(10):
        g, h = random_element(rng, 0, 0.4), random_element(rng, 0, 0.4)
        t = g_act(sigma, g)
        assert set(semistable_phases(t)) == set(semistable_phases(sigma))
        assert distance(g_act(t, h), g_act(sigma, g_compose(g, h))).value < 1e-9


def test_json_round_trip():
    g = GroupElement(((2.0, 1.0), (0.5, 3.0)), -2)
    assert GroupElement.from_dict(g.to_dict()) == g
