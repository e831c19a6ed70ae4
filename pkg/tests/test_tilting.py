import numpy as np
import pytest

from stablab import QI, stability
from stablab.errors import DomainError
from stablab.gtilde import g_act, random_element
from stablab.limits import a2_sequence
from stablab.metric import distance, random_stability
from stablab.tilting import (
    dual_pair_after_left_tilt,
    dual_pair_after_right_tilt,
    enumerate_torsion_pairs,
    left_tilt,
    limiting_torsion_pair,
    right_tilt,
    tilt_decompose_pair,
    torsion_pair,
)


def names(refs):
    return sorted(map(str, refs))


def test_torsion_pairs_of_standard_heart(a2):
    pairs = enumerate_torsion_pairs(a2, a2.heart("H0"))
    assert sorted(names(tp.torsion) for tp in pairs) == [[], ["S1"], ["S1", "S2", "X"], ["S1", "X"], ["S2"]]
    with pytest.raises(DomainError):
        torsion_pair(a2, a2.heart("H0"), "X")


def test_tilts(a2):
    A = a2.heart("H0")
    tp = torsion_pair(a2, A, "S1,X")
    assert names(right_tilt(a2, A, tp).members) == ["S1", "S2[1]", "X"]
    assert names(left_tilt(a2, A, tp).members) == ["S1[-1]", "S2", "X[-1]"]
    full = torsion_pair(a2, A, "S1,S2,X")
    assert left_tilt(a2, A, full) == a2.heart("H0[-1]")


def test_tilt_inversion_on_window(a2):
    count = 0
    for A in a2.atlas.window():
        for tp in enumerate_torsion_pairs(a2, A):
            count += 1
            assert right_tilt(a2, left_tilt(a2, A, tp), dual_pair_after_left_tilt(tp)) == A
            assert left_tilt(a2, right_tilt(a2, A, tp), dual_pair_after_right_tilt(tp)) == A
    assert count == 24


def test_atlas_graph(a2):
    d = a2.atlas.to_dict()
    assert d["nodes"][0]["id"] == "H0"
    assert {e["direction"] for e in d["edges"]} == {"left", "right"}


def test_tilt_decomposition(a2):
    rng = np.random.default_rng(11)
    done = 0
    while done < 20:
        s = random_stability(a2, rng, exact=False)
        t = g_act(s, random_element(rng, 0, 0.3))
        d = distance(s, t).value
        if d < 0.5:
            dec = tilt_decompose_pair(s, t, d)
            assert dec.replay(a2, s.heart) == t.heart
            done += 1


def test_tilt_decomposition_needs_close_pair(a2, sigma):
    far = stability(a2, "H0[1]", [QI(0, 1), QI(1, 1)])
    with pytest.raises(DomainError):
        tilt_decompose_pair(sigma, far)


def test_limiting_torsion_pair(a2):
    tp = limiting_torsion_pair(a2_sequence(a2, 30))
    assert names(tp.torsion) == ["S1", "X"] and names(tp.free) == ["S2"]
