"""The generalised metric on stability conditions, the C-action, and the quotient metric.

The supremum over all nonzero objects reduces to a maximum over the base
indecomposables: phi+ and phi- of a direct sum are the max and min over the
summands, masses add, ``|log(sum a / sum b)| <= max |log(a_i / b_i)|``, and all
three quantities are shift-equivariant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import ModelMismatchError
from .model import ObjectExpr, Ref
from .stability import (
    CentralCharge,
    StabilityCondition,
    hn_filtration,
    resolve_heart,
    semistable_phases,
)


@dataclass(frozen=True)
class MetricValue:
    """A value in [0, inf]; ``witness`` names the indecomposable attaining the maximum."""

    value: float
    witness: Optional[str] = None

    @property
    def infinite(self) -> bool:
        return math.isinf(self.value)

    def __float__(self) -> float:
        return self.value

    @classmethod
    def infinity(cls) -> "MetricValue":
        return cls(math.inf)


def object_terms(sigma: StabilityCondition, tau: StabilityCondition, c) -> float:
    """``max{|dphi-|, |dphi+|, |log mass ratio|}`` for one nonzero object."""
    f, g = hn_filtration(sigma, c), hn_filtration(tau, c)
    return max(abs(f.phi_minus - g.phi_minus), abs(f.phi_plus - g.phi_plus), abs(math.log(f.mass / g.mass)))


def profile(sigma: StabilityCondition) -> np.ndarray:
    """Rows ``(phi-, phi+, log mass)`` for the base indecomposables, in model order."""
    rows = []
    for u in sigma.model.base_ids:
        f = hn_filtration(sigma, ObjectExpr((Ref(u, 0),)))
        rows.append((f.phi_minus, f.phi_plus, math.log(f.mass)))
    return np.array(rows)


def distance(sigma: StabilityCondition, tau: StabilityCondition) -> MetricValue:
    """``d(sigma, tau)``, with the base indecomposable attaining it."""
    if sigma.model is not tau.model:
        raise ModelMismatchError("stability conditions live on different models")
    diff = np.abs(profile(sigma) - profile(tau)).max(axis=1)
    i = int(np.argmax(diff))
    return MetricValue(float(diff[i]), sigma.model.base_ids[i])


def c_act(sigma: StabilityCondition, lam) -> StabilityCondition:
    """Right action of ``lam``: charge times ``exp(-i pi lam)``, phases lowered by ``re lam``."""
    lam = complex(lam)
    model = sigma.model
    if lam == 0:
        return sigma
    if lam.imag == 0 and lam.real == int(lam.real):
        n = int(lam.real)
        charge = sigma.charge if n % 2 == 0 else sigma.charge.negated()
        return StabilityCondition(model, model.atlas.find(r.shifted(n) for r in sigma.heart.members), charge)
    charge = sigma.charge.scaled(cmath.exp(-1j * math.pi * lam))
    if lam.real == 0:
        return StabilityCondition(model, sigma.heart, charge)
    predicted = {u: p - lam.real for u, p in semistable_phases(sigma).items()}
    return resolve_heart(model, charge, predicted)


def _grid_then_refine(objective, center, half_widths, n: int = 9, tol: float = 1e-4):
    xs = np.linspace(center[0] - half_widths[0], center[0] + half_widths[0], n)
    ys = np.linspace(center[1] - half_widths[1], center[1] + half_widths[1], n)
    best = min(((objective(np.array([x, y])), (x, y)) for x in xs for y in ys), key=lambda t: t[0])
    res = minimize(objective, np.array(best[1]), method="Nelder-Mead",
                   options={"xatol": tol * 1e-2, "fatol": tol * 1e-2, "maxiter": 2000,
                            "initial_simplex": np.array(best[1]) + np.array(
                                [[0, 0], [half_widths[0] / n, 0], [0, max(half_widths[1], 1e-3) / n]])})
    if res.fun < best[0]:
        return float(res.fun), complex(res.x[0], res.x[1])
    return float(best[0]), complex(*best[1])


def quotient_distance_stab(sigma: StabilityCondition, tau: StabilityCondition, tol: float = 1e-4) -> tuple:
    """``inf_lam d(sigma, tau lam)`` as ``(value, best lam)``; an upper bound within ``tol``."""
    d0 = distance(sigma, tau).value
    if d0 == 0:
        return MetricValue(0.0), 0j

    def objective(x):
        return distance(sigma, c_act(tau, complex(x[0], x[1]))).value

    val, lam = _grid_then_refine(objective, (0.0, 0.0), (1.0, max(d0 / math.pi, 1e-6)), tol=tol)
    if d0 <= val:
        return MetricValue(d0), 0j
    return MetricValue(val), lam


def random_charge_values(rng, n: int, exact: bool = True, den: int = 8, rmin: float = 0.3, rmax: float = 2.0):
    """Random values in the open upper half-plane (plus occasionally the negative real axis)."""
    from fractions import Fraction

    from .gaussian import QI

    out = []
    for _ in range(n):
        phi = rng.uniform(0.02, 1.0)
        r = rng.uniform(rmin, rmax)
        z = r * cmath.exp(1j * math.pi * phi)
        if exact:
            re_ = Fraction(round(z.real * den), den)
            im_ = Fraction(max(1, round(z.imag * den)), den)
            out.append(QI(re_, im_))
        else:
            out.append(z)
    return out


def random_stability(model, rng, exact: bool = True, hearts=None) -> StabilityCondition:
    """A random valid stability condition on a random heart (default: the left tilts of the standard heart).

    ``rng`` is a ``numpy.random.Generator``.
    """
    from .stability import charge_from_simples

    hearts = hearts or model.atlas.window()
    heart = hearts[int(rng.integers(len(hearts)))]
    vals = random_charge_values(rng, len(heart.simples), exact=exact)
    return StabilityCondition(model, heart, charge_from_simples(model, heart, vals))


__all__ = [
    "CentralCharge",
    "MetricValue",
    "c_act",
    "distance",
    "object_terms",
    "profile",
    "quotient_distance_stab",
    "random_stability",
]
