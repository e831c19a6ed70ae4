import math

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from stablab import QI, ObjectExpr, Ref, check_stability_axioms, hn_filtration, is_semistable, phase_data, stability
from stablab.errors import DomainError
from stablab.stability import (
    CentralCharge,
    StabilityCondition,
    charge_from_simples,
    resolve_heart,
    semistable_phases,
    stability_from_dict,
    stability_to_dict,
)

small = st.fractions(min_value=-3, max_value=3, max_denominator=6)
positive = st.fractions(min_value=0, max_value=3, max_denominator=6).filter(lambda x: x > 0)
upper = st.one_of(st.builds(QI, small, positive), st.builds(QI, positive.map(lambda x: -x), st.just(0)))
objects = st.lists(st.tuples(st.sampled_from(["S1", "S2", "X"]), st.integers(-2, 2)), min_size=1, max_size=4).map(
    lambda xs: ObjectExpr(tuple(Ref(u, k) for u, k in xs)))


def test_semistable_extension(sigma):
    f = hn_filtration(sigma, "X")
    assert len(f) == 1
    assert f.phi_plus == pytest.approx(math.atan2(2, 1) / math.pi)
    assert is_semistable(sigma, "X") == (True, f.phi_plus)


def test_destabilised_extension(sigma_unstable):
    f = hn_filtration(sigma_unstable, "X")
    assert [str(x.obj) for x in f.factors] == ["S2", "S1"]
    assert f.phases == [0.5, 0.25]
    assert [str(c) for c in f.chain] == ["S2", "X"]
    assert str(f.quotients[0]) == "S1"
    assert phase_data(sigma_unstable, "X") == pytest.approx((0.25, 0.5, math.sqrt(2) + 1))
    assert is_semistable(sigma_unstable, "X") == (False, None)


def test_direct_sum_merges_equal_phases(a2):
    s = stability(a2, "H0", [QI(0, 1), QI(0, 2)])
    f = hn_filtration(s, "S1+S2+X")
    assert len(f) == 1 and f.phi_plus == 0.5


def test_zero_object_rejected(sigma):
    with pytest.raises(DomainError):
        hn_filtration(sigma, "0")


def test_axioms(a2, sigma):
    assert check_stability_axioms(sigma).ok
    assert check_stability_axioms(stability(a2, "H0", [QI(-1, 0), QI(0, 1)])).ok  # phase 1 simple
    bad = StabilityCondition(a2, a2.heart("H0"), charge_from_simples(a2, a2.heart("H0"), [QI(0, 1), QI(1, 0)]))
    rep = check_stability_axioms(bad)
    assert not rep["axiom-1"].passed and "S2" in rep["axiom-1"].witness


def test_semistable_object_outside_heart_shifts(a2):
    # X is in no shift of <S1[1], S2>; its filtration comes from the triangle S2 -> X -> S1
    s = stability(a2, "H2", [QI(-1, 1), QI(1, 1)])
    f = hn_filtration(s, "X")
    assert [str(x.obj) for x in f.factors] == ["S2", "S1"]
    assert check_stability_axioms(s).ok


def test_floating_mode_matches_exact(sigma):
    fl = StabilityCondition(sigma.model, sigma.heart, sigma.charge.to_floating())
    for obj in ("X", "S1+S2[1]", "X[-2]+S1"):
        a, b = hn_filtration(sigma, obj), hn_filtration(fl, obj)
        assert a.phases == pytest.approx(b.phases, abs=1e-12)


def test_resolve_heart_recovers_the_heart(sigma):
    again = resolve_heart(sigma.model, sigma.charge, semistable_phases(sigma))
    assert again.heart == sigma.heart


def test_stability_file_round_trip(a2, sigma):
    d = stability_to_dict(sigma)
    assert d["charge"] == [[0, 1, 1, 1], [1, 1, 1, 1]]
    assert stability_from_dict(a2, d) == sigma
    assert stability_from_dict(a2, {"heart": "H0", "charge": [[0, 1], [1, 1]], "mode": "floating"}).charge.mode == "floating"


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(z1=upper, z2=upper, obj=objects, k=st.integers(-3, 3))
def test_hn_invariants(a2, z1, z2, obj, k):
    s = stability(a2, "H0", [z1, z2])
    f = hn_filtration(s, obj)
    assert all(a.key > b.key for a, b in zip(f.factors, f.factors[1:]))
    assert sum((x.charge for x in f.factors[1:]), f.factors[0].charge) == s.Z(obj)
    assert f.mass >= abs(s.Z(obj)) - 1e-12
    if f.phi_plus - f.phi_minus < 2:
        assert (len(f) == 1) == math.isclose(f.mass, abs(s.Z(obj)), rel_tol=1e-12)
    lo, hi, m = phase_data(s, obj)
    assert phase_data(s, obj.shifted(k)) == pytest.approx((lo + k, hi + k, m))


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(z1=upper, z2=upper, label=st.sampled_from(["H0", "H1", "H2", "H3"]))
def test_phase_bounds_on_triangles(a2, z1, z2, label):
    h = a2.heart(label)
    s = StabilityCondition(a2, h, charge_from_simples(a2, h, [z1, z2]))
    for t in a2.triangles:
        fa, fb, fc = (hn_filtration(s, x) for x in (t.a, t.b, t.c))
        assert min(fa.phi_minus, fc.phi_minus) - 1e-12 <= fb.phi_minus
        assert fb.phi_plus <= max(fa.phi_plus, fc.phi_plus) + 1e-12
    assert check_stability_axioms(s).ok


def test_mass_equality_needs_phase_range_below_two(a2):
    # factors two phases apart have aligned charges, so mass = |Z| without semistability
    s = stability(a2, "H0", [QI(-1, 0), QI(0, 1)])
    f = hn_filtration(s, "S1+S1[2]")
    assert f.phases == [3.0, 1.0]
    assert f.mass == abs(s.Z(f.obj)) == 2.0


def test_a1(a1):
    s = stability(a1, "H0", [QI(-2, 0)])
    assert phase_data(s, "S+S[1]") == (1.0, 2.0, 4.0)
    assert CentralCharge((QI(1, 1),)).exact
