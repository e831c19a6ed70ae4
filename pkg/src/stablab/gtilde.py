"""The universal cover of GL2+(R) acting on stability conditions.

An element is a matrix ``T`` with positive determinant and an integer ``lift``
choosing one of the increasing maps ``theta`` with ``theta(t + 1) = theta(t) + 1``
that induce the circle map of ``T``; ``lift = 0`` is the one with
``theta(0)`` in [0, 2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, Report
from .metric import _grid_then_refine
from .stability import CentralCharge, StabilityCondition, resolve_heart, semistable_phases

GRID = 4096


@dataclass(frozen=True)
class GroupElement:
    T: tuple
    lift: int = 0

    def __post_init__(self):
        T = tuple(tuple(float(x) for x in row) for row in np.asarray(self.T, dtype=float))
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "lift", int(self.lift))
        if self.det <= 0:
            raise DomainError(f"matrix {T} does not have positive determinant")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.T)

    @property
    def det(self) -> float:
        (a, b), (c, d) = self.T
        return a * d - b * c

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(((1.0, 0.0), (0.0, 1.0)), 0)

    @classmethod
    def diagonal(cls, a: float) -> "GroupElement":
        """``diag(sqrt a, 1/sqrt a)`` with the lift fixing phase 0."""
        r = math.sqrt(a)
        return cls(((r, 0.0), (0.0, 1.0 / r)), 0)

    @classmethod
    def rotation(cls, c: float) -> "GroupElement":
        """The lift ``theta(t) = t + c`` of rotation by ``pi c``."""
        return c_embed(complex(c, 0.0))

    def to_dict(self) -> dict:
        return {"matrix": [list(r) for r in self.T], "lift": self.lift}

    @classmethod
    def from_dict(cls, d: dict) -> "GroupElement":
        return cls(tuple(tuple(r) for r in d["matrix"]), int(d.get("lift", 0)))


def _theta0(T: np.ndarray, t):
    """Normalised lift (``theta(0)`` in [0, 2)) evaluated at ``t`` (array ok)."""
    t = np.asarray(t, dtype=float)
    n = np.floor(t)
    f = t - n
    v0 = T @ np.array([1.0, 0.0])
    a0 = math.atan2(v0[1], v0[0]) % (2 * math.pi)
    if a0 > 2 * math.pi - 1e-12:  # roundoff just below the branch cut; keeps near-identity lifts at 0
        a0 = 0.0
    x = T[0, 0] * np.cos(np.pi * f) + T[0, 1] * np.sin(np.pi * f)
    y = T[1, 0] * np.cos(np.pi * f) + T[1, 1] * np.sin(np.pi * f)
    ang = np.mod(np.arctan2(y, x) - a0, 2 * np.pi)
    # the angle sweeps exactly pi over one unit of t; values just below 2pi are roundoff at f = 0
    ang = np.where(ang > 1.5 * np.pi, ang - 2 * np.pi, ang)
    return (a0 + ang) / np.pi + n


def theta_eval(g: GroupElement, t):
    """``theta_g(t)``: continuous argument of ``T (cos pi t, sin pi t)`` over pi, plus ``2 lift``."""
    out = _theta0(g.matrix, t) + 2 * g.lift
    return float(out) if np.ndim(out) == 0 else out


def _lift_for(T: np.ndarray, target_at_zero: float) -> int:
    return int(round((target_at_zero - float(_theta0(T, 0.0))) / 2.0))


def g_compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """``(T_g T_h, theta_g o theta_h)``."""
    T = g.matrix @ h.matrix
    return GroupElement(T, _lift_for(T, theta_eval(g, theta_eval(h, 0.0))))


def g_inverse(g: GroupElement) -> GroupElement:
    """Inverse matrix; the lift is fixed so that ``theta_inv(theta_g(0)) = 0``."""
    Ti = np.linalg.inv(g.matrix)
    x = float(_theta0(Ti, theta_eval(g, 0.0)))
    return GroupElement(Ti, int(round(-x / 2.0)))


def check_element(g: GroupElement, grid: int = 1024, tol: float = 1e-9) -> Report:
    """Monotonicity, ``theta(t + 1) = theta(t) + 1`` and agreement with the circle map of ``T`` on a grid."""
    rep = Report()
    ts = np.arange(-grid, 2 * grid + 1) / grid
    th = theta_eval(g, ts)
    steps = np.diff(th)
    rep.add("theta-increasing", bool(np.all(steps > 0)), None if np.all(steps > 0) else float(ts[np.argmin(steps)]))
    per = np.abs(theta_eval(g, ts[:grid] + 1) - th[:grid] - 1)
    rep.add("theta-periodic", bool(per.max() <= tol), float(per.max()))
    v = g.matrix @ np.vstack([np.cos(np.pi * ts), np.sin(np.pi * ts)])
    diff = np.mod(np.arctan2(v[1], v[0]) - np.pi * th + np.pi, 2 * np.pi) - np.pi
    rep.add("theta-circle-map", bool(np.abs(diff).max() <= tol), float(np.abs(diff).max()))
    return rep


def theta_inverse_bisect(g: GroupElement, s: float, tol: float = 1e-12) -> float:
    """Independent inverse of ``theta_g`` by monotone bisection."""
    lo, hi = s - 3.0 - 2 * abs(g.lift), s + 3.0 + 2 * abs(g.lift)
    while theta_eval(g, lo) > s:
        lo -= 2.0
    while theta_eval(g, hi) < s:
        hi += 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if theta_eval(g, mid) < s:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def c_embed(lam) -> GroupElement:
    """The element acting like ``lam`` in C: ``T = exp(i pi lam)`` as a real matrix, ``theta = t + re lam``."""
    lam = complex(lam)
    w = cmath.exp(1j * math.pi * lam)
    T = np.array([[w.real, -w.imag], [w.imag, w.real]])
    return GroupElement(T, _lift_for(T, lam.real))


def singular_values(T: np.ndarray) -> tuple:
    """Singular values ``(s_max, s_min)`` of a 2x2 matrix, as ``Q + R`` and ``|Q - R|``.

    ``Q`` and ``R`` are the norms of the conformal and anticonformal parts, which
    avoids the cancellation of the quadratic formula near the identity.
    """
    (a, b), (c, d) = T
    Q = math.hypot(a + d, c - b) / 2
    R = math.hypot(a - d, c + b) / 2
    return Q + R, abs(Q - R)


def theta_displacement(g: GroupElement, grid: int = GRID) -> float:
    """``sup_t |theta(t) - t|`` over one period: grid search, then bounded refinement near the grid maximum.

    For a multiple of a rotation ``theta(t) - t`` is constant, so ``|theta(0)|`` is used directly.
    """
    (a, b), (c, d) = g.T
    if a == d and b == -c:
        return abs(theta_eval(g, 0.0))
    ts = np.arange(grid) / grid
    vals = np.abs(theta_eval(g, ts) - ts)
    i = int(np.argmax(vals))
    h = 1.0 / grid
    best = float(vals[i])
    res = minimize_scalar(lambda t: -abs(theta_eval(g, t) - t), bounds=(ts[i] - h, ts[i] + h),
                          method="bounded", options={"xatol": 1e-12})
    return max(best, -float(res.fun))


def delta(g: GroupElement) -> float:
    """``max{sup|theta - id|, log ||T||, log ||T^-1||}``."""
    smax, smin = singular_values(g.matrix)
    return max(theta_displacement(g), math.log(smax), -math.log(smin))


def dG(g: GroupElement, h: GroupElement) -> float:
    """Left-invariant metric ``delta(h^-1 g)``."""
    return delta(g_compose(g_inverse(h), g))


def mobius_project(g: GroupElement) -> complex:
    """``(a i + b) / (c i + d)``; constant on cosets of the C-subgroup."""
    (a, b), (c, d) = g.T
    return (a * 1j + b) / (c * 1j + d)


def hyp_distance(z: complex, w: complex) -> float:
    """Curvature -1 distance on the upper half-plane."""
    if z.imag <= 0 or w.imag <= 0:
        raise DomainError("points must lie in the open upper half-plane")
    return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def quotient_distance_G(g: GroupElement, h: GroupElement, tol: float = 1e-4) -> tuple:
    """``inf_lam dG(h lam, g)`` as ``(value, best lam)``.

    The search box is centred at the mean angular offset of ``h^-1 g`` (so that
    elements with large lifts are handled) and at the scale balancing the norm terms.
    """
    k = g_compose(g_inverse(h), g)
    d0 = delta(k)
    if d0 == 0:
        return 0.0, 0j
    ts = np.arange(256) / 256
    shift = float(np.mean(theta_eval(k, ts) - ts))
    scale = math.log(k.det) / (2 * math.pi)

    def objective(x):
        return delta(g_compose(c_embed(complex(-x[0], -x[1])), k))

    val, lam = _grid_then_refine(objective, (shift, -scale), (1.0, max(d0 / math.pi, 1e-6)), tol=tol)
    return val, lam


def g_act(sigma: StabilityCondition, g: GroupElement) -> StabilityCondition:
    """``(T^-1 o Z, P o theta)``: semistables kept, a phase ``p`` becomes ``theta^-1(p)``."""
    Ti = np.linalg.inv(g.matrix)
    vals = []
    for z in sigma.charge.values:
        z = complex(z)
        x, y = Ti @ np.array([z.real, z.imag])
        vals.append(complex(x, y))
    charge = CentralCharge(tuple(vals))
    gi = g_inverse(g)
    predicted = {u: theta_eval(gi, p) for u, p in semistable_phases(sigma).items()}
    return resolve_heart(sigma.model, charge, predicted)


def random_element(rng, lift_range: int = 1, log_scale: float = 1.0) -> GroupElement:
    """A random element: rotation, diagonal stretch, rotation, scalar, random lift."""
    def rot(a):
        return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])

    s = math.exp(rng.uniform(-log_scale, log_scale))
    T = rot(rng.uniform(0, 2 * math.pi)) @ np.diag([s, 1 / s]) @ rot(rng.uniform(0, 2 * math.pi))
    T = T * math.exp(rng.uniform(-log_scale, log_scale) / 2)
    return GroupElement(T, int(rng.integers(-lift_range, lift_range + 1)))
