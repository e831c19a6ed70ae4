"""Sampled Cauchy sequences of stability conditions and their limits.

A sequence is a finite list of samples, a declared limit charge and an epsilon
schedule bounding ``d(sigma_m, sigma_n)`` for ``m, n >= from_n``. Everything here
checks consistency of that data; nothing takes a genuine limit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import (
    DomainError,
    ModelDataError,
    NeedMoreSamplesError,
    Report,
    ScheduleError,
)
from .gaussian import QI, dump_gaussian, parse_gaussian
from .metric import c_act, distance, profile
from .model import CategoryModel, ObjectExpr, Ref, load_model, parse_object, require_nonzero
from .stability import (
    CentralCharge,
    StabilityCondition,
    charge_of,
    check_stability_axioms,
    hn_filtration,
    resolve_heart,
    stability,
    stability_from_dict,
    stability_to_dict,
)

PHASE_TOL = 1e-6


class _Split:
    """Marker returned by :func:`limiting_phase` for objects whose phases stay apart."""

    def __repr__(self) -> str:
        return "SPLIT"


SPLIT = _Split()


@dataclass(frozen=True)
class StabilitySequence:
    model: CategoryModel
    samples: tuple
    limit_charge: CentralCharge
    epsilon: tuple
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        samples = tuple(sorted(((int(n), s) for n, s in self.samples), key=lambda t: t[0]))
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "epsilon", tuple(sorted((int(a), float(b)) for a, b in self.epsilon)))
        if not samples:
            raise NeedMoreSamplesError("a sequence needs at least one sample")
        if any(s.model is not self.model for _, s in samples):
            raise ModelDataError("samples of a sequence must share one model")
        if len(self.limit_charge.values) != self.model.rank:
            raise ModelDataError("limit charge has the wrong rank")

    @property
    def indices(self) -> list:
        return [n for n, _ in self.samples]

    def eps(self, n: int) -> float:
        """The schedule bound valid for all ``m, n' >= n``."""
        best = None
        for a, b in self.epsilon:
            if a <= n:
                best = b if best is None else min(best, b)
        if best is None:
            raise ScheduleError(f"the epsilon schedule says nothing about index {n}")
        return best

    def tail(self, n0: Optional[int] = None) -> list:
        n0 = self.epsilon[0][0] if n0 is None else n0
        return [(n, s) for n, s in self.samples if n >= n0]

    def validate(self, tol: float = 1e-9) -> Report:
        rep = Report()
        covered = [n for n in self.indices if any(a <= n for a, _ in self.epsilon)]
        rep.add("schedule-covers-samples", len(covered) == len(self.samples),
                [n for n in self.indices if n not in covered] or None)
        if len(covered) != len(self.samples):
            return rep
        # all pairwise distances from the stacked (phi-, phi+, log m) profiles at once
        P = np.stack([profile(s) for _, s in self.samples])
        D = np.abs(P[:, None, :, :] - P[None, :, :, :]).max(axis=(2, 3))
        eps = np.array([self.eps(n) for n in self.indices])
        bound = np.minimum.outer(np.arange(len(eps)), np.arange(len(eps)))
        allowed = eps[bound] + tol
        bad = np.argwhere(D > allowed)
        rep.add("distances-within-schedule", bad.size == 0,
                [{"m": self.indices[i], "n": self.indices[j], "distance": float(D[i, j])} for i, j in bad[:5]] or None)
        zl = np.array([complex(v) for v in self.limit_charge.values])
        errs = [float(np.max(np.abs(np.array([complex(v) for v in s.charge.values]) - zl))) for _, s in self.samples]
        ok = len(errs) == 1 or errs[-1] <= errs[0] + tol
        rep.add("charges-approach-limit", ok, None if ok else {"first": errs[0], "last": errs[-1]})
        return rep

    def to_dict(self, model_path: Optional[str] = None) -> dict:
        return {
            "model": model_path or self.source or self.model.name,
            "samples": [{"n": n, "stability": stability_to_dict(s)} for n, s in self.samples],
            "limit_charge": [dump_gaussian(v) for v in self.limit_charge.values],
            "epsilon": [{"from_n": a, "bound": b} for a, b in self.epsilon],
        }

    @classmethod
    def from_dict(cls, data: dict, model: Optional[CategoryModel] = None, base: Optional[Path] = None):
        if model is None:
            mp = Path(data["model"])
            if base is not None and not mp.is_absolute() and (base / mp).exists():
                mp = base / mp
            model = load_model(mp)
        samples = [(e["n"], stability_from_dict(model, e["stability"])) for e in data["samples"]]
        charge = CentralCharge(tuple(parse_gaussian(e) for e in data["limit_charge"]))
        eps = [(e["from_n"], e["bound"]) for e in data["epsilon"]]
        return cls(model, tuple(samples), charge, tuple(eps), source=str(data["model"]))

    @classmethod
    def load(cls, path, model: Optional[CategoryModel] = None) -> "StabilitySequence":
        p = Path(path)
        with open(p) as f:
            return cls.from_dict(json.load(f), model, base=p.parent)


# shipped sequences --------------------------------------------------------------


def a2_sequence(model: CategoryModel, N: int = 50, indices=None) -> StabilitySequence:
    """``Z_n(S1) = i``, ``Z_n(S2) = 1 + i/n`` on the standard heart, ``eps(n) = 1/n``."""
    idx = list(indices) if indices is not None else list(range(1, N + 1))
    samples = [(n, stability(model, "H0", [QI(0, 1), QI(1, Fraction(1, n))])) for n in idx]
    limit = CentralCharge((QI(0, 1), QI(1, 0)))
    return StabilitySequence(model, tuple(samples), limit, tuple((n, 1.0 / n) for n in idx))


def constant_sequence(sigma: StabilityCondition, N: int = 3) -> StabilitySequence:
    return StabilitySequence(sigma.model, tuple((n, sigma) for n in range(1, N + 1)), sigma.charge, ((1, 0.0),))


def orbit_sequence(sigma: StabilityCondition, lam: complex, step: complex = 0.1 + 0.05j, N: int = 10):
    """``sigma . (lam + step/n)``; the orbit formula gives ``eps(n) = max(|re step|, pi |im step|) / n``."""
    lam, step = complex(lam), complex(step)
    samples = [(n, c_act(sigma, lam + step / n)) for n in range(1, N + 1)]
    limit = c_act(sigma, lam).charge if lam != 0 else sigma.charge
    c = max(abs(step.real), math.pi * abs(step.imag))
    return StabilitySequence(sigma.model, tuple(samples), limit, tuple((n, c / n) for n in range(1, N + 1)))


# limiting phases -----------------------------------------------------------------


def _obj(model: CategoryModel, c) -> ObjectExpr:
    if isinstance(c, Ref):
        c = ObjectExpr((c,))
    obj = parse_object(model, c)
    require_nonzero(obj)
    return obj


def _nearest_branch(z: complex, target: float) -> float:
    base = math.atan2(z.imag, z.real) / math.pi
    return base + 2 * round((target - base) / 2)


@dataclass(frozen=True)
class PhaseTrace:
    """Phases ``(n, phi-, phi+)`` of one object along the samples."""

    rows: tuple

    @property
    def last(self) -> tuple:
        return self.rows[-1]


def phase_trace(seq: StabilitySequence, c) -> PhaseTrace:
    obj = _obj(seq.model, c)
    rows = []
    for n, s in seq.samples:
        f = hn_filtration(s, obj)
        rows.append((n, f.phi_minus, f.phi_plus))
    return PhaseTrace(tuple(rows))


def limiting_phase(seq: StabilitySequence, c, tol: float = PHASE_TOL):
    """The limit ``theta`` of both ``phi_n-`` and ``phi_n+`` of ``c``, or :data:`SPLIT`.

    Converged when the last sampled spread is within twice the schedule bound;
    the value is the branch of ``arg Z_limit(c) / pi`` nearest the sampled phases.
    """
    obj = _obj(seq.model, c)
    tail = seq.tail()
    if not tail:
        raise NeedMoreSamplesError("no samples lie inside the epsilon schedule")
    nN, sN = tail[-1]
    eN = seq.eps(nN)
    if len(tail) < 2 and eN > tol:
        raise NeedMoreSamplesError(f"one sample cannot certify convergence at tolerance {tol}")
    trace = phase_trace(seq, obj)
    _, lo, hi = trace.last
    # Cauchy criterion on the sampled tail
    for n, a, b in trace.rows:
        if n >= tail[0][0] and (abs(a - lo) > seq.eps(n) + tol or abs(b - hi) > seq.eps(n) + tol):
            raise ScheduleError(f"phases of {obj} at n={n} move more than the schedule allows")
    if hi - lo > 2 * eN + tol:
        return SPLIT
    z = complex(charge_of(seq.model, seq.limit_charge, obj))
    if abs(z) <= tol:
        raise DomainError(f"the limit charge kills {obj}; the sequence leaves the full component")
    theta = _nearest_branch(z, 0.5 * (lo + hi))
    if abs(theta - 0.5 * (lo + hi)) > 2 * eN + tol:
        raise ScheduleError(f"limit charge of {obj} has phase {theta}, sampled phases near {0.5 * (lo + hi)}")
    return theta


def _stable_from(seq: StabilitySequence, trace: PhaseTrace, tol: float) -> int:
    """First sample index after which the spread stays within the schedule bound."""
    first = trace.rows[-1][0]
    for n, a, b in reversed(trace.rows):
        try:
            e = seq.eps(n)
        except ScheduleError:
            break
        if b - a > 2 * e + tol:
            break
        first = n
    return first


# limiting filtrations --------------------------------------------------------------


@dataclass(frozen=True)
class LimitingFiltration:
    obj: ObjectExpr
    factors: tuple
    provenance: tuple

    @property
    def thetas(self) -> list:
        return [t for _, t in self.factors]

    def __len__(self):
        return len(self.factors)

    def summary(self) -> list:
        return [{"object": str(o), "theta": t, "from_n": n} for (o, t), n in zip(self.factors, self.provenance)]


def limit_hn(seq: StabilitySequence, c, tol: float = PHASE_TOL) -> LimitingFiltration:
    """Filtration of ``c`` by limiting semistable objects.

    Split objects are cut at a sample whose schedule bound is below
    ``alpha / (2 (L + 1))`` (``alpha`` the sampled limit of ``phi+ - phi-``,
    ``L`` the largest HN length over the tail) along an HN phase gap wider than
    twice that bound; both halves are treated recursively.
    """
    model = seq.model
    obj = _obj(model, c)
    lf = _limit_hn(seq, obj, tol, depth=0)
    thetas = lf.thetas
    if any(not a > b + tol for a, b in zip(thetas, thetas[1:])):
        raise ScheduleError(f"limiting factors of {obj} do not have decreasing phases: {thetas}")
    total = sum((complex(charge_of(model, seq.limit_charge, o)) for o, _ in lf.factors), 0j)
    if abs(total - complex(charge_of(model, seq.limit_charge, obj))) > 1e-9 * max(1.0, abs(total)):
        raise ModelDataError(f"limiting factor charges of {obj} do not add up")
    return lf


def _limit_hn(seq: StabilitySequence, obj: ObjectExpr, tol: float, depth: int) -> LimitingFiltration:
    if depth > 4 * seq.model.rank + 8:
        raise ScheduleError(f"limit filtration recursion does not terminate for {obj}")
    theta = limiting_phase(seq, obj, tol)
    if theta is not SPLIT:
        return LimitingFiltration(obj, ((obj, theta),), (_stable_from(seq, phase_trace(seq, obj), tol),))
    tail = seq.tail()
    fs = [(n, hn_filtration(s, obj)) for n, s in tail]
    L = max(len(f) for _, f in fs)
    alpha = fs[-1][1].phi_plus - fs[-1][1].phi_minus
    target = alpha / (2 * (L + 1))
    cut = next(((n, f) for n, f in fs if seq.eps(n) < target), None)
    if cut is None:
        raise NeedMoreSamplesError(f"no sample of {obj} has schedule bound below {target:.3g}")
    n, f = cut
    gaps = [a.phase - b.phase for a, b in zip(f.factors, f.factors[1:])]
    i = next((j for j, g in enumerate(gaps) if g > 2 * target), None)
    if i is None:
        raise ScheduleError(f"no HN phase gap above {2 * target:.3g} for {obj} at n={n}: phases {f.phases}")
    sub, quo = f.chain[i], f.quotients[i]
    if quo is None:
        raise ModelDataError(f"the model lists no cone of {sub} -> {obj}")
    left = _limit_hn(seq, sub, tol, depth + 1)
    right = _limit_hn(seq, quo, tol, depth + 1)
    return LimitingFiltration(obj, left.factors + right.factors, left.provenance + right.provenance)


# the limit stability condition ------------------------------------------------------


def limit_stability(seq: StabilitySequence, tol: float = PHASE_TOL) -> StabilityCondition:
    """``(Z_limit, P)`` with the heart spanned by limiting semistables of phase in (0, 1]."""
    model = seq.model
    for u in model.base_ids:
        z = complex(charge_of(model, seq.limit_charge, ObjectExpr((Ref(u, 0),))))
        if abs(z) <= tol:
            raise DomainError(f"the limit charge kills the class of {u}; the limit leaves the full component")
    predicted = {}
    for u in model.base_ids:
        theta = limiting_phase(seq, u, tol)
        if theta is not SPLIT:
            predicted[u] = theta
    sigma = resolve_heart(model, seq.limit_charge, predicted, tol=max(tol, 1e-7))
    rep = check_stability_axioms(sigma)
    if not rep.ok:
        raise ModelDataError(f"limit fails the stability axioms: {rep.failures()}")
    return sigma


# length bound --------------------------------------------------------------------------


def _image_lattice(values: list) -> tuple:
    """Integer basis ``(w, x2)`` and denominator ``D`` of the lattice spanned by Q[i] values.

    ``w = (wx, g)`` has the smallest positive imaginary part and ``(x2, 0)`` spans
    the real points, so every lattice point is ``j w + k (x2, 0)``.
    """
    D = 1
    for v in values:
        D = D * v.re.denominator // math.gcd(D, v.re.denominator)
        D = D * v.im.denominator // math.gcd(D, v.im.denominator)
    vecs = [(int(v.re * D), int(v.im * D)) for v in values]
    wx, g = 0, 0
    for x, y in vecs:
        # extended gcd merge of (wx, g) with (x, y) on the second coordinate
        if y == 0:
            continue
        if g == 0:
            wx, g = (x, y) if y > 0 else (-x, -y)
            continue
        a, b, gg = _egcd(g, y)
        wx, g = a * wx + b * x, gg
    x2 = 0
    for x, y in vecs:
        if g:
            x = x - (y // g) * wx
        x2 = math.gcd(x2, x)
    if x2:
        wx %= x2
    return (wx, g), x2, D


def _egcd(a: int, b: int) -> tuple:
    """``(s, t, d)`` with ``s a + t b = d = gcd(a, b) > 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return s0, t0, a


def length_bound(Z: CentralCharge, interval, a, model: Optional[CategoryModel] = None) -> int:
    """Number of nonzero image-lattice points ``z`` with ``arg z / pi`` in ``I`` and ``im z <= im Z(a)``.

    ``a`` is an object (with ``model``) or directly its charge. ``I`` is moved by an
    integer into (0, 1), flipping the sign of ``Z(a)`` for odd moves.
    """
    if not Z.exact:
        raise DomainError("length bound needs an exact charge with values in Q[i]")
    lo, hi = float(interval[0]), float(interval[1])
    if not hi - lo < 1 or hi < lo:
        raise DomainError(f"interval [{lo}, {hi}] must have length < 1")
    k = math.floor(lo)
    lo, hi = lo - k, hi - k
    if lo <= 0 or hi >= 1:
        raise DomainError(f"interval must avoid the real axis after normalisation, got [{lo}, {hi}]")
    za = charge_of(model, Z, a) if model is not None else QI.coerce(a)
    if k % 2:
        za = -za
    za = QI.coerce(za)
    if not za.im > 0 or not lo - 1e-12 <= math.atan2(float(za.im), float(za.re)) / math.pi <= hi + 1e-12:
        raise DomainError("Z(a) does not have its phase in the interval")
    (wx, g), x2, D = _image_lattice(list(Z.values))
    if g == 0:
        return 0
    ymax = za.im * D
    cot_hi, cot_lo = 1 / math.tan(math.pi * hi), 1 / math.tan(math.pi * lo)
    count = 0
    j = 1
    while j * g <= ymax:
        y = j * g
        xmin, xmax = y * cot_hi - 1e-9, y * cot_lo + 1e-9
        if x2 == 0:
            count += int(xmin <= j * wx <= xmax)
        else:
            base = j * wx
            count += max(0, math.floor((xmax - base) / x2) - math.ceil((xmin - base) / x2) + 1)
        j += 1
    return count
