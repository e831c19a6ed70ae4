import cmath
import math
from fractions import Fraction

from hypothesis import given, strategies as st

from stablab.gaussian import QI, arg01, cross, dump_gaussian, in_half_plane, is_zero, parse_gaussian

fr = st.fractions(min_value=-20, max_value=20, max_denominator=12)
qi = st.builds(QI, fr, fr)


def test_arithmetic_is_exact():
    z = QI(Fraction(1, 3), Fraction(1, 2))
    assert z + z == QI(Fraction(2, 3), 1)
    assert z * QI(0, 1) == QI(Fraction(-1, 2), Fraction(1, 3))
    assert z.norm2() == Fraction(1, 9) + Fraction(1, 4)
    assert -z + z == 0


def test_parse_and_dump():
    assert parse_gaussian([1, 2, -3, 4]) == QI(Fraction(1, 2), Fraction(-3, 4))
    assert parse_gaussian([0.5, 1.0]) == complex(0.5, 1.0)
    for z in (QI(Fraction(7, 3), -2), 1.5 - 2j):
        assert parse_gaussian(dump_gaussian(z)) == z


def test_half_plane_convention():
    assert in_half_plane(QI(0, 1))
    assert in_half_plane(QI(-1, 0))  # negative real axis has phase 1
    assert not in_half_plane(QI(1, 0))
    assert not in_half_plane(QI(0, -1))
    assert arg01(QI(-1, 0)) == 1.0
    assert is_zero(QI(0, 0)) and is_zero(0j)


@given(qi, qi)
def test_field_laws(a, b):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b).norm2() == a.norm2() * b.norm2()
    assert abs(complex(a * b) - complex(a) * complex(b)) < 1e-9


@given(qi, qi)
def test_cross_sign_orders_phases(a, b):
    if not (in_half_plane(a) and in_half_plane(b)):
        return
    s = cross(a, b)
    pa, pb = cmath.phase(complex(a)), cmath.phase(complex(b))
    pa = math.pi if pa == -math.pi else pa
    pb = math.pi if pb == -math.pi else pb
    if s > 0:
        assert pb > pa
    elif s < 0:
        assert pb < pa
    else:
        assert math.isclose(pa, pb, abs_tol=1e-12)
