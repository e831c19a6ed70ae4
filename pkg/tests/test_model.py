import copy

import pytest

from stablab import ObjectExpr, Ref, fixture, validate_model
from stablab.errors import ModelMismatchError
from stablab.model import a2_rep_object, model_from_dict, parse_object, parse_ref


def test_object_grammar(a2):
    assert parse_ref("S1[1]") == Ref("S1", 1)
    assert parse_ref("S1@-1") == Ref("S1", -1)
    obj = ObjectExpr.parse(" S1[1] + X ")
    assert obj == ObjectExpr((Ref("X"), Ref("S1", 1)))
    assert ObjectExpr.parse("0").is_zero()
    assert a2.class_of(obj) == (0, 1)  # odd shifts negate the class
    with pytest.raises(ModelMismatchError):
        parse_object(a2, "Y")


def test_shipped_fixtures_validate(a1, a2):
    rep = validate_model(a2)
    assert rep.ok, rep.failures()
    assert rep["oracle-hom-table"].passed
    assert validate_model(a1).ok


def test_broken_additivity_is_reported(a2):
    data = copy.deepcopy(a2.to_dict())
    for u in data["indecomposables"]:
        if u["id"] == "X":
            u["class"] = [2, 1]
    rep = validate_model(model_from_dict(data), oracle=False)
    assert not rep["class-additivity"].passed


def test_empty_model_is_degenerate():
    rep = validate_model(model_from_dict({"lattice_rank": 0, "indecomposables": [], "triangles": [], "hom": []}))
    assert not rep.ok and rep.failures()[0].name == "nondegenerate"


def test_hom_convention(a2):
    # (a@k, b) in the table means Hom(a[k], b) != 0
    assert a2.hom_nonzero(Ref("S2"), Ref("X"))
    assert a2.hom_nonzero(Ref("S1", -1), Ref("S2"))
    assert a2.hom_nonzero(Ref("S1"), Ref("S2", 1))
    assert not a2.hom_nonzero(Ref("S1"), Ref("S2"))


def test_model_round_trip(a2):
    again = model_from_dict(a2.to_dict())
    assert again.to_dict() == a2.to_dict()


def test_rep_objects():
    assert str(a2_rep_object(1, 1, 1)) == "X"
    assert a2_rep_object(2, 3, 1) == ObjectExpr.parse("X+S1+S2+S2")


def test_hearts(a1, a2):
    assert len(a2.atlas.window()) == 5
    assert len({h.members for h in a2.atlas.window()}) == 5
    assert len(fixture("a1").atlas.hearts) == 1
    h0 = a2.heart("H0")
    assert set(map(str, h0.simples)) == {"S1", "S2"}
    assert a2.heart("H0[1]").members == frozenset(r.shifted(1) for r in h0.members)
