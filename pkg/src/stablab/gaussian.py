"""Exact arithmetic in Q[i] and phase helpers shared by exact and floating charges."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union


@dataclass(frozen=True)
class QI:
    """A Gaussian rational ``re + im*i`` with ``Fraction`` parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Rational)):
            return cls(Fraction(x))
        raise TypeError(f"cannot coerce {x!r} to an exact Gaussian rational")

    def __add__(self, other):
        if isinstance(other, complex) or isinstance(other, float):
            return complex(self) + other
        o = QI.coerce(other)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) * other
        o = QI.coerce(other)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, QI):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"QI({self.re}, {self.im})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


Scalar = Union[QI, complex]


def re_im(z: Scalar):
    if isinstance(z, QI):
        return z.re, z.im
    z = complex(z)
    return z.real, z.imag


def cross(z1: Scalar, z2: Scalar):
    """``im(conj(z1) * z2)``; positive iff z2 lies counterclockwise of z1 (within pi)."""
    a, b = re_im(z1)
    c, d = re_im(z2)
    return a * d - b * c


def is_zero(z: Scalar) -> bool:
    if isinstance(z, QI):
        return not z
    return complex(z) == 0


def in_half_plane(z: Scalar) -> bool:
    """Semiclosed upper half-plane: im > 0, or im == 0 and re < 0."""
    x, y = re_im(z)
    return y > 0 or (y == 0 and x < 0)


def arg01(z: Scalar) -> float:
    """``arg(z)/pi`` normalised to (0, 2]; equals the heart phase for half-plane values."""
    x, y = re_im(z)
    a = math.atan2(float(y), float(x))
    if a <= 0:
        a += 2 * math.pi
    return a / math.pi


def to_complex(z: Scalar) -> complex:
    return complex(z)


def parse_gaussian(entry) -> Scalar:
    """Read one charge entry: ``[re_num, re_den, im_num, im_den]`` exactly, or ``[re, im]`` floats."""
    if isinstance(entry, (list, tuple)) and len(entry) == 4:
        rn, rd, inum, iden = entry
        return QI(Fraction(int(rn), int(rd)), Fraction(int(inum), int(iden)))
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise ValueError(f"bad charge entry {entry!r}")


def dump_gaussian(z: Scalar) -> list:
    if isinstance(z, QI):
        return [z.re.numerator, z.re.denominator, z.im.numerator, z.im.denominator]
    z = complex(z)
    return [z.real, z.imag]
