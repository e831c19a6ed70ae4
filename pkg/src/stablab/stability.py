"""Central charges, stability conditions and Harder-Narasimhan filtrations.

A stability condition is a heart from the model's atlas together with a
central charge sending every simple of the heart into the semiclosed upper
half-plane. The slicing is never stored: semistability and HN filtrations are
derived from the heart's short exact sequences (the model's triangles whose
three terms lie in the heart).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    HeartResolutionError,
    ModelDataError,
    ModelMismatchError,
    NotHNCompleteError,
    Report,
    UniquenessViolationError,
)
from .gaussian import QI, Scalar, arg01, cross, in_half_plane, is_zero
from .model import CategoryModel, Heart, ObjectExpr, Ref, parse_object, require_nonzero

PHASE_TOL = 1e-9


@dataclass(frozen=True)
class CentralCharge:
    """Values of Z on the lattice basis; exact (Q[i]) or floating."""

    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if all(isinstance(v, QI) for v in vals):
            pass
        elif all(isinstance(v, (QI, int, Fraction)) for v in vals):
            vals = tuple(QI.coerce(v) for v in vals)
        else:
            vals = tuple(complex(v) for v in vals)
        object.__setattr__(self, "values", vals)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, QI) for v in self.values)

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "floating"

    def __call__(self, cls) -> Scalar:
        if len(cls) != len(self.values):
            raise ModelMismatchError(f"class of length {len(cls)} against a charge on rank {len(self.values)}")
        acc = QI(0) if self.exact else 0j
        for v, x in zip(self.values, cls):
            if x:
                acc = acc + v * x
        return acc

    def to_floating(self) -> "CentralCharge":
        return CentralCharge(tuple(complex(v) for v in self.values))

    def scaled(self, w: complex) -> "CentralCharge":
        return CentralCharge(tuple(complex(v) * w for v in self.values))

    def negated(self) -> "CentralCharge":
        return CentralCharge(tuple(-v for v in self.values))


def charge_of(model: CategoryModel, Z: CentralCharge, c) -> Scalar:
    """``Z(c)``; additive over direct sums and sign-alternating under shift."""
    if isinstance(c, str):
        c = ObjectExpr.parse(c)
    return Z(model.class_of(c))


@dataclass(frozen=True)
class Phase:
    """Phase ``shift + arg(z)/pi`` with ``z`` in the semiclosed upper half-plane.

    Exact charges compare by the sign of a cross product, floating ones by
    value with tolerance ``PHASE_TOL``.
    """

    shift: int
    z: object

    @property
    def exact(self) -> bool:
        return isinstance(self.z, QI)

    @property
    def value(self) -> float:
        return self.shift + arg01(self.z)

    def __float__(self) -> float:
        return self.value

    def shifted(self, k: int) -> "Phase":
        return Phase(self.shift + k, self.z)

    def cmp(self, other: "Phase") -> int:
        if self.exact and other.exact:
            if self.shift != other.shift:
                return -1 if self.shift < other.shift else 1
            s = cross(self.z, other.z)
            return 0 if s == 0 else (-1 if s > 0 else 1)
        d = self.value - other.value
        return 0 if abs(d) <= PHASE_TOL else (-1 if d < 0 else 1)

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def same(self, other: "Phase") -> bool:
        return self.cmp(other) == 0


@dataclass(frozen=True)
class HNFactor:
    obj: ObjectExpr
    key: Phase
    charge: object

    @property
    def phase(self) -> float:
        return self.key.value

    @property
    def mass(self) -> float:
        return abs(self.charge)


@dataclass(frozen=True)
class HNFiltration:
    """Semistable factors of strictly decreasing phase.

    ``chain[i]`` is the subobject with factors ``0..i`` and ``quotients[i]`` the
    cone of ``chain[i] -> obj`` (None when the model lists no such extension).
    """

    obj: ObjectExpr
    factors: tuple
    chain: tuple
    quotients: tuple

    @property
    def phases(self) -> list:
        return [f.phase for f in self.factors]

    @property
    def phi_plus(self) -> float:
        return self.factors[0].phase

    @property
    def phi_minus(self) -> float:
        return self.factors[-1].phase

    @property
    def mass(self) -> float:
        return math.fsum(f.mass for f in self.factors)

    def __len__(self):
        return len(self.factors)

    def shifted(self, k: int) -> "HNFiltration":
        return HNFiltration(
            self.obj.shifted(k),
            tuple(HNFactor(f.obj.shifted(k), f.key.shifted(k), -f.charge if k % 2 else f.charge) for f in self.factors),
            tuple(c.shifted(k) for c in self.chain),
            tuple(q.shifted(k) if q is not None else None for q in self.quotients),
        )

    def signature(self, model: CategoryModel) -> list:
        return [(model.class_of(f.obj), f.key) for f in self.factors]

    def summary(self) -> list:
        return [{"object": str(f.obj), "phase": f.phase, "mass": f.mass} for f in self.factors]


@dataclass(frozen=True, eq=True)
class StabilityCondition:
    model: CategoryModel
    heart: Heart
    charge: CentralCharge

    @property
    def exact(self) -> bool:
        return self.charge.exact

    def Z(self, c) -> Scalar:
        return charge_of(self.model, self.charge, c)

    def __repr__(self) -> str:
        vals = ", ".join(str(v) for v in self.charge.values)
        return f"StabilityCondition(heart={self.heart.id or self.heart}, Z=({vals}))"

    def with_charge(self, charge: CentralCharge, heart: Optional[Heart] = None) -> "StabilityCondition":
        return StabilityCondition(self.model, heart or self.heart, charge)


def validity_failures(sigma: StabilityCondition) -> list:
    """Simples outside the semiclosed upper half-plane and heart members with zero charge."""
    bad = []
    for s in sigma.heart.simples:
        z = sigma.Z(ObjectExpr((s,)))
        if is_zero(z) or not in_half_plane(z):
            bad.append(str(s))
    for m in sigma.heart.members:
        if is_zero(sigma.Z(ObjectExpr((m,)))) and str(m) not in bad:
            bad.append(str(m))
    return bad


def require_valid(sigma: StabilityCondition) -> None:
    bad = validity_failures(sigma)
    if bad:
        raise DomainError(f"charge is not a stability function on heart {sigma.heart}: {bad}")


# Harder-Narasimhan filtrations ----------------------------------------------


def _merge(model: CategoryModel, parts: Sequence[HNFiltration]) -> HNFiltration:
    if len(parts) == 1:
        return parts[0]
    keys = [f.key for p in parts for f in p.factors]
    keys.sort(key=cmp_to_key(lambda a, b: b.cmp(a)))
    distinct: list = []
    for k in keys:
        if not distinct or not distinct[-1].same(k):
            distinct.append(k)
    factors, chain, quotients = [], [], []
    for key in distinct:
        objs, charge = [], None
        sub, quo = ObjectExpr(), ObjectExpr()
        known = True
        for p in parts:
            j = 0
            for f in p.factors:
                if f.key.same(key):
                    objs.append(f.obj)
                    charge = f.charge if charge is None else charge + f.charge
                if f.key >= key:
                    j += 1
            if j:
                sub = sub + p.chain[j - 1]
                q = p.quotients[j - 1]
            else:
                q = p.obj
            if q is None:
                known = False
            else:
                quo = quo + q
        factors.append(HNFactor(ObjectExpr.of(*objs), key, charge))
        chain.append(sub)
        quotients.append(quo if known else None)
    obj = ObjectExpr.of(*(p.obj for p in parts))
    return HNFiltration(obj, tuple(factors), tuple(chain), tuple(quotients))


def _single(sigma: StabilityCondition, obj: ObjectExpr) -> HNFiltration:
    z = sigma.Z(obj)
    return HNFiltration(obj, (HNFactor(obj, Phase(0, z), z),), (obj,), (ObjectExpr(),))


def _concat(model: CategoryModel, h: ObjectExpr, fa: HNFiltration, fc: HNFiltration) -> HNFiltration:
    a, x = fa.obj, fc.obj
    chain = list(fa.chain)
    quotients = []
    for q in fa.quotients[:-1]:
        quotients.append(model.find_middle(q, x) if q is not None else None)
    quotients.append(x)
    for j, c in enumerate(fc.chain):
        chain.append(h if j == len(fc.chain) - 1 else model.find_middle(a, c))
        quotients.append(fc.quotients[j])
    return HNFiltration(h, fa.factors + fc.factors, tuple(chain), tuple(quotients))


@lru_cache(maxsize=1 << 16)
def _obj_hn(sigma: StabilityCondition, obj: ObjectExpr) -> HNFiltration:
    return _merge(sigma.model, [_indec_hn(sigma, r) for r in obj])


def _check_unique(model: CategoryModel, who, candidates: list) -> HNFiltration:
    sig0 = candidates[0].signature(model)
    for cand in candidates[1:]:
        sig = cand.signature(model)
        if len(sig) != len(sig0) or any(c1 != c2 or not p1.same(p2) for (c1, p1), (c2, p2) in zip(sig, sig0)):
            raise UniquenessViolationError(f"inequivalent HN filtrations of {who}: {sig0} vs {sig}")
    return candidates[0]


@lru_cache(maxsize=1 << 16)
def _member_hn(sigma: StabilityCondition, h: Ref) -> HNFiltration:
    """HN filtration of a heart member by search over the heart's short exact sequences."""
    model = sigma.model
    hobj = ObjectExpr((h,))
    ph = Phase(0, sigma.Z(hobj))
    subs = model.sub_triangles(sigma.heart.members, h)
    candidates = []
    if all(Phase(0, sigma.Z(t.a)) <= ph for t in subs):
        candidates.append(_single(sigma, hobj))
    for t in subs:
        fa, fc = _obj_hn(sigma, t.a), _obj_hn(sigma, t.c)
        if fa.factors[-1].key > fc.factors[0].key:
            candidates.append(_concat(model, hobj, fa, fc))
    if not candidates:
        raise NotHNCompleteError(f"no Harder-Narasimhan filtration of {h} found in heart {sigma.heart}")
    return _check_unique(model, h, candidates)


_IN_PROGRESS: set = set()


@lru_cache(maxsize=1 << 16)
def _indec_hn(sigma: StabilityCondition, u: Ref) -> HNFiltration:
    """HN filtration of any shifted indecomposable.

    Shifts of heart members reduce to the heart; other indecomposables are
    split along listed triangles ``a -> u -> c`` whose factor phases decrease.
    """
    s = sigma.heart.shift_of(u.base)
    if s is not None:
        return _member_hn(sigma, Ref(u.base, s)).shifted(u.shift - s)
    if u.shift != 0:
        return _indec_hn(sigma, Ref(u.base, 0)).shifted(u.shift)
    model = sigma.model
    key = (id(sigma), u)
    if key in _IN_PROGRESS:
        raise NotHNCompleteError(f"cyclic triangle search for {u} in heart {sigma.heart}")
    _IN_PROGRESS.add(key)
    try:
        uobj = ObjectExpr((u,))
        candidates = []
        for t in model.triangles_all_shifts(u):
            if t.b != uobj or t.a.is_zero() or t.c.is_zero():
                continue
            try:
                fa, fc = _obj_hn(sigma, t.a), _obj_hn(sigma, t.c)
            except NotHNCompleteError:
                continue
            if fa.factors[-1].key > fc.factors[0].key:
                candidates.append(_concat(model, uobj, fa, fc))
    finally:
        _IN_PROGRESS.discard(key)
    if not candidates:
        raise NotHNCompleteError(f"no Harder-Narasimhan filtration of {u} relative to heart {sigma.heart}")
    return _check_unique(model, u, candidates)


def hn_filtration(sigma: StabilityCondition, c) -> HNFiltration:
    """The Harder-Narasimhan filtration of a nonzero object."""
    c = parse_object(sigma.model, c)
    require_nonzero(c)
    return _obj_hn(sigma, c)


def phase_data(sigma: StabilityCondition, c) -> tuple:
    """``(phi_minus, phi_plus, mass)``."""
    f = hn_filtration(sigma, c)
    return f.phi_minus, f.phi_plus, f.mass


def is_semistable(sigma: StabilityCondition, c) -> tuple:
    """``(True, phase)`` for semistable objects, ``(False, None)`` otherwise."""
    f = hn_filtration(sigma, c)
    return (True, f.factors[0].phase) if len(f) == 1 else (False, None)


def semistable_phases(sigma: StabilityCondition) -> dict:
    """Phases of the semistable base indecomposables (shift 0 representatives)."""
    out = {}
    for u in sigma.model.base_ids:
        f = hn_filtration(sigma, ObjectExpr((Ref(u, 0),)))
        if len(f) == 1:
            out[u] = f.factors[0].phase
    return out


# construction helpers --------------------------------------------------------


def _solve_exact(rows: list, rhs: list) -> list:
    """Solve ``rows @ v = rhs`` over Q (rhs entries may be QI)."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise DomainError("classes of the simples do not form a basis")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col][:n]] + [a[col][n] * (1 / p)]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r][:n], a[col][:n])] + [a[r][n] - a[col][n] * f]
    return [a[i][n] for i in range(n)]


def charge_from_simples(model: CategoryModel, heart: Heart, simple_values: Sequence) -> CentralCharge:
    """The central charge taking the given values on the simples of ``heart`` (in ``heart.simples`` order)."""
    rows = model.heart_simple_matrix(heart)
    if len(rows) != model.rank:
        raise DomainError(f"heart {heart} has {len(rows)} simples for a rank-{model.rank} lattice")
    if all(isinstance(v, (QI, int, Fraction)) for v in simple_values):
        return CentralCharge(tuple(_solve_exact(rows, [QI.coerce(v) for v in simple_values])))
    sol = np.linalg.solve(np.array(rows, dtype=float), np.array([complex(v) for v in simple_values]))
    return CentralCharge(tuple(complex(v) for v in sol))


def stability(model: CategoryModel, heart, simple_values: Sequence) -> StabilityCondition:
    """Convenience constructor: heart label or Heart, values on its simples."""
    h = model.heart(heart)
    sigma = StabilityCondition(model, h, charge_from_simples(model, h, simple_values))
    require_valid(sigma)
    return sigma


def _window_shifts(phi: float) -> list:
    """Shifts ``k`` with ``phi + k`` in (0, 1]; two candidates when ``phi`` sits on an integer."""
    k = math.floor(1 - phi)
    frac = phi - math.floor(phi)
    if frac < 1e-9:
        return [k, k - 1]
    if frac > 1 - 1e-9:
        return [k, k + 1]
    return [k]


def resolve_heart(model: CategoryModel, charge: CentralCharge, predicted: dict, tol: float = 1e-7) -> StabilityCondition:
    """The stability condition with ``charge`` whose semistable indecomposables have the predicted phases.

    ``predicted`` maps base ids to the phase of their shift-0 representative.
    The heart is the extension closure of the predicted semistables moved into
    the window (0, 1]; it is registered in the model's atlas.
    """
    if not predicted:
        raise HeartResolutionError("no semistable objects predicted")
    options = [[Ref(u, k) for k in _window_shifts(p)] for u, p in predicted.items()]
    found = []
    for choice in product(*options):
        try:
            heart = model.atlas.find(choice)
        except ModelDataError:
            continue
        sigma = StabilityCondition(model, heart, charge)
        if validity_failures(sigma):
            continue
        try:
            got = semistable_phases(sigma)
        except (NotHNCompleteError, UniquenessViolationError):
            continue
        if got.keys() == predicted.keys() and all(abs(got[u] - predicted[u]) <= tol for u in got):
            if sigma.heart not in [f.heart for f in found]:
                found.append(sigma)
    if not found:
        raise HeartResolutionError(f"no heart realises the predicted slicing {predicted}")
    if len(found) > 1:
        raise HeartResolutionError(f"ambiguous heart resolution: {[str(f.heart) for f in found]}")
    return found[0]


# axioms ---------------------------------------------------------------------


def check_stability_axioms(sigma: StabilityCondition, window: int = 2) -> Report:
    """Verify the four stability axioms on all shifts ``|k| <= window`` of the base indecomposables."""
    rep = Report()
    model = sigma.model
    bad = validity_failures(sigma)
    semis: list = []
    hn_fail = []
    align_fail = []
    for u in model.base_ids:
        for k in range(-window, window + 1):
            obj = ObjectExpr((Ref(u, k),))
            try:
                f = hn_filtration(sigma, obj)
            except Exception as e:  # noqa: BLE001 - reported, never raised
                hn_fail.append({"object": str(obj), "error": str(e)})
                continue
            if len(f) == 1:
                z = sigma.Z(obj)
                ph = f.factors[0].phase
                if is_zero(z) or abs(((arg01(z) - ph) % 2.0 + 1.0) % 2.0 - 1.0) > 1e-9:
                    align_fail.append({"object": str(obj), "phase": ph})
                semis.append((obj.summands[0], f.factors[0].key))
    rep.add("axiom-1", not bad and not align_fail, (bad + align_fail) or None)

    shift_fail = []
    for u in model.base_ids:
        try:
            f0 = hn_filtration(sigma, ObjectExpr((Ref(u, 0),)))
            f1 = hn_filtration(sigma, ObjectExpr((Ref(u, 1),)))
        except Exception as e:  # noqa: BLE001
            shift_fail.append({"object": u, "error": str(e)})
            continue
        if len(f0) != len(f1) or any(abs(b.phase - a.phase - 1) > 1e-9 for a, b in zip(f0.factors, f1.factors)):
            shift_fail.append({"object": u, "phases": [f0.phases, f1.phases]})
    rep.add("axiom-2", not shift_fail, shift_fail or None)

    hom_fail = []
    for x, px in semis:
        for y, py in semis:
            if px > py and model.hom_nonzero(x, y):
                hom_fail.append({"from": str(x), "to": str(y), "phases": [px.value, py.value]})
    rep.add("axiom-3", not hom_fail, hom_fail or None)

    objs = [ObjectExpr((Ref(u, 0),)) for u in model.base_ids]
    ids = model.base_ids
    for i, u in enumerate(ids):
        for v in ids[i:]:
            for k in (0, 1):
                objs.append(ObjectExpr((Ref(u, 0), Ref(v, k))))
    for obj in objs:
        try:
            f = hn_filtration(sigma, obj)
        except Exception as e:  # noqa: BLE001
            hn_fail.append({"object": str(obj), "error": str(e)})
            continue
        problems = _hn_invariant_failures(sigma, f)
        if problems:
            hn_fail.append({"object": str(obj), "error": problems})
    rep.add("axiom-4", not hn_fail, hn_fail or None)
    return rep


def _hn_invariant_failures(sigma: StabilityCondition, f: HNFiltration) -> list:
    out = []
    if any(not (a.key > b.key) for a, b in zip(f.factors, f.factors[1:])):
        out.append("phases not strictly decreasing")
    total = sum((x.charge for x in f.factors[1:]), f.factors[0].charge)
    z = sigma.Z(f.obj)
    if sigma.exact:
        if total != z:
            out.append("charges not additive")
    elif abs(complex(total) - complex(z)) > 1e-9 * max(1.0, abs(complex(z))):
        out.append("charges not additive")
    for x in f.factors:
        zx = sigma.Z(x.obj)
        if (zx != x.charge) if sigma.exact else abs(complex(zx) - complex(x.charge)) > 1e-9:
            out.append(f"factor {x.obj} charge mismatch")
    return out


# serialisation ----------------------------------------------------------------


def stability_to_dict(sigma: StabilityCondition) -> dict:
    """``{"heart", "members", "charge", "mode"}``; members make the heart label reproducible."""
    from .gaussian import dump_gaussian

    return {
        "heart": sigma.heart.id,
        "members": sorted(f"{r.base}@{r.shift}" for r in sigma.heart.members),
        "charge": [dump_gaussian(v) for v in sigma.charge.values],
        "mode": sigma.charge.mode,
    }


def stability_from_dict(model: CategoryModel, data: dict) -> StabilityCondition:
    """Read a stability file body; ``members`` (if given) take precedence over the heart label."""
    from .gaussian import parse_gaussian
    from .model import parse_ref

    if data.get("members"):
        heart = model.atlas.find(parse_ref(t) for t in data["members"])
    else:
        heart = model.heart(data["heart"])
    vals = [parse_gaussian(e) for e in data["charge"]]
    if len(vals) != model.rank:
        raise ModelMismatchError(f"charge has {len(vals)} entries for a rank-{model.rank} lattice")
    charge = CentralCharge(tuple(vals))
    if data.get("mode", charge.mode) == "floating":
        charge = charge.to_floating()
    elif data.get("mode") == "exact" and not charge.exact:
        raise DomainError("mode 'exact' needs [re_num, re_den, im_num, im_den] entries")
    sigma = StabilityCondition(model, heart, charge)
    require_valid(sigma)
    return sigma


def load_stability(model: CategoryModel, path) -> StabilityCondition:
    import json

    with open(path) as f:
        return stability_from_dict(model, json.load(f))
