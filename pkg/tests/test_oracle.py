import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from stablab import QI, CentralCharge, StabilityCondition, hn_filtration
from stablab.errors import DomainError
from stablab.oracle import (
    Quiver,
    Rep,
    all_representations,
    ext_dim,
    hom_dim,
    model_reps,
    oracle_hn,
    rep_to_object,
    subrepresentations,
    subspaces,
)
from stablab.stability import charge_from_simples

A2 = Quiver(2, ((0, 1),))
Z_FLIP = CentralCharge((QI(1, 1), QI(0, 1)))


def test_subspace_counts():
    # Gaussian binomials at q = 2
    assert [len(subspaces(d)) for d in range(4)] == [1, 2, 5, 16]


def test_oracle_examples():
    X = Rep((1, 1), (((1,),),))
    split = Rep((1, 1), (((0,),),))
    assert oracle_hn(A2, X, Z_FLIP).classes == ((0, 1), (1, 0))
    assert oracle_hn(A2, split, Z_FLIP).classes == ((0, 1), (1, 0))
    assert oracle_hn(A2, Rep((0, 1), (((),),)), Z_FLIP).classes == ((0, 1),)
    z = CentralCharge((QI(0, 1), QI(1, 1)))
    assert oracle_hn(A2, X, z).classes == ((1, 1),)
    assert oracle_hn(A2, split, z).classes == ((1, 0), (0, 1))


def test_oracle_refuses_large_reps():
    big = Rep((4, 0), ((),))
    with pytest.raises(DomainError):
        oracle_hn(A2, big, Z_FLIP)


def test_hom_ext(a2):
    q, reps = model_reps(a2)
    S1, S2, X = reps["S1"], reps["S2"], reps["X"]
    assert [hom_dim(q, S2, X), hom_dim(q, X, S1), hom_dim(q, S1, S2), hom_dim(q, X, S2)] == [1, 1, 0, 0]
    assert ext_dim(q, S1, S2) == 1 and ext_dim(q, S2, S1) == 0 and ext_dim(q, X, X) == 0


def test_representation_enumeration():
    reps = list(all_representations(A2, (1, 2)))
    # (0,1): 1, (0,2): 1, (1,0): 1, (1,1): 2, (1,2): 4
    assert len(reps) == 9
    assert len(subrepresentations(A2, Rep((1, 1), (((1,),),)))) == 3


_reps = list(all_representations(A2, (3, 3)))
fr = st.fractions(min_value=-2, max_value=2, max_denominator=5)
pos = st.fractions(min_value=0, max_value=2, max_denominator=5).filter(lambda x: x > 0)


@settings(max_examples=80, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(rep=st.sampled_from(_reps), z1=st.builds(QI, fr, pos), z2=st.builds(QI, fr, pos))
def test_hn_agrees_with_oracle(a2, rep, z1, z2):
    h = a2.heart("H0")
    Z = charge_from_simples(a2, h, [z1, z2])
    o = oracle_hn(A2, rep, Z)
    f = hn_filtration(StabilityCondition(a2, h, Z), rep_to_object(a2, rep))
    assert tuple(a2.class_of(x.obj) for x in f.factors) == o.classes
    assert f.phases == pytest.approx(list(o.phases), abs=1e-12)
