import math
from fractions import Fraction

import pytest

from stablab import QI, hn_filtration
from stablab.errors import DomainError, ScheduleError
from stablab.limits import (
    SPLIT,
    StabilitySequence,
    a2_sequence,
    constant_sequence,
    length_bound,
    limit_hn,
    limit_stability,
    limiting_phase,
    orbit_sequence,
)
from stablab.metric import c_act, distance
from stablab.model import a2_rep_object
from stablab.stability import CentralCharge, check_stability_axioms


@pytest.fixture(scope="module")
def seq(a2):
    return a2_sequence(a2, 60)


def test_sequence_is_consistent(seq):
    assert seq.validate().ok


def test_limiting_phases(seq):
    assert limiting_phase(seq, "S2") == 0
    assert limiting_phase(seq, "X") == pytest.approx(0.25)
    assert limiting_phase(seq, "S1+S2") is SPLIT


def test_limit_filtrations(seq):
    assert [(str(o), t) for o, t in limit_hn(seq, "X").factors] == [("X", 0.25)]
    assert [(str(o), t) for o, t in limit_hn(seq, "S1+S2").factors] == [("S1", 0.5), ("S2", 0.0)]
    lf = limit_hn(seq, "S1+S2[1]+X")
    assert lf.thetas == sorted(lf.thetas, reverse=True)
    assert lf.thetas == pytest.approx([1.0, 0.5, 0.25])


def test_limit_stability(seq):
    s = limit_stability(seq)
    assert sorted(map(str, s.heart.members)) == ["S1", "S2[1]", "X"]
    assert sorted(map(str, s.heart.simples)) == ["S2[1]", "X"]
    assert s.Z("S2[1]") == QI(-1, 0)
    assert check_stability_axioms(s).ok
    assert all(distance(t, s).value <= 1 / n + 1e-12 for n, t in seq.samples)


def test_constant_sequence(sigma_unstable):
    seq = constant_sequence(sigma_unstable)
    assert limit_stability(seq) == sigma_unstable
    f = hn_filtration(sigma_unstable, "X+S1[1]")
    assert limit_hn(seq, "X+S1[1]").thetas == pytest.approx(f.phases)


def test_orbit_sequence(sigma):
    lam = 0.3 + 0.1j
    seq = orbit_sequence(sigma, lam)
    assert seq.validate().ok
    assert distance(limit_stability(seq), c_act(sigma, lam)).value < 1e-9
    for n, s in seq.samples:
        step = (0.1 + 0.05j) / n
        assert distance(s, limit_stability(seq)).value == pytest.approx(max(abs(step.real), math.pi * abs(step.imag)))


def test_inconsistent_schedule_is_reported(a2, seq):
    tight = StabilitySequence(a2, seq.samples, seq.limit_charge, ((1, 1e-4),))
    assert not tight.validate()["distances-within-schedule"].passed
    with pytest.raises(ScheduleError):
        limiting_phase(tight, "S2")


def test_limit_charge_killing_a_class_is_rejected(a2, seq):
    dead = StabilitySequence(a2, seq.samples, CentralCharge((QI(0, 1), QI(0, 0))), seq.epsilon)
    with pytest.raises(DomainError):
        limit_stability(dead)


def test_sequence_file_round_trip(a2, seq, tmp_path):
    p = tmp_path / "seq.json"
    import json

    p.write_text(json.dumps(seq.to_dict("a2")))
    again = StabilitySequence.load(p)
    assert [(n, s.heart, s.charge) for n, s in again.samples] == [(n, s.heart, s.charge) for n, s in seq.samples]
    assert again.limit_charge == seq.limit_charge


def test_length_bound_worked_example(sigma):
    assert length_bound(sigma.charge, (0.25, 0.75), QI(1, 2)) == 8
    assert length_bound(sigma.charge, (0.25, 0.75), a2_rep_object(1, 1, 1), sigma.model) == 8
    # the interval may be given in any integer window
    assert length_bound(sigma.charge, (2.25, 2.75), QI(1, 2)) == 8


def test_length_bound_finer_lattice(a2):
    Z = CentralCharge((QI(0, 1), QI(Fraction(1, 2), Fraction(1, 2))))
    # lattice spanned by i and (1+i)/2: x = +-1/2 at height 1/2, x in {-1, 0, 1} at height 1
    assert length_bound(Z, (0.25, 0.75), QI(0, 1)) == 2 + 3


def test_length_bound_errors(sigma, a2):
    with pytest.raises(DomainError):
        length_bound(sigma.charge.to_floating(), (0.25, 0.75), QI(1, 2))
    with pytest.raises(DomainError):
        length_bound(sigma.charge, (0.0, 1.0), QI(1, 2))
    with pytest.raises(DomainError):
        length_bound(sigma.charge, (0.6, 0.75), QI(1, 2))


def test_length_bound_dominates_hn_lengths(sigma, sigma_unstable):
    for s in (sigma, sigma_unstable):
        for d1 in range(4):
            for d2 in range(4):
                for r in range(min(d1, d2) + 1):
                    if d1 + d2:
                        obj = a2_rep_object(d1, d2, r)
                        f = hn_filtration(s, obj)
                        assert len(f) <= length_bound(s.charge, (f.phi_minus, f.phi_plus), obj, s.model)
