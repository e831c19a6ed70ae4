"""Torsion pairs, left and right tilts, and the atlas of hearts reachable by tilting."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .errors import DomainError, ModelDataError, ModelTooLargeError
from .model import CategoryModel, Heart, Ref, canonical_members


@dataclass(frozen=True)
class TorsionPair:
    torsion: frozenset
    free: frozenset

    def names(self) -> tuple:
        return sorted(str(r) for r in self.torsion), sorted(str(r) for r in self.free)

    def __str__(self) -> str:
        t, f = self.names()
        return f"T={{{', '.join(t)}}} F={{{', '.join(f)}}}"


@dataclass
class Atlas:
    """Hearts up to shift (``H0`` is the standard heart) with the tilt graph between them."""

    model: CategoryModel
    hearts: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    parent: dict = field(default_factory=dict)
    _index: dict = field(default_factory=dict)

    def _register(self, members: frozenset) -> tuple:
        canon, k = canonical_members(self.model.ext_closure(members))
        if canon not in self._index:
            hid = f"H{len(self.hearts)}"
            heart = self.model.make_heart(canon, hid)
            check_heart(self.model, heart)
            self._index[canon] = heart
            self.hearts.append(heart)
        return self._index[canon], -k

    def find(self, members) -> Heart:
        """The atlas heart with exactly these members (labelled ``Hi[k]``), registering it if new."""
        canon, k = self._register(frozenset(members))
        return self.shift(canon, k)

    def get(self, hid: str, k: int = 0) -> Heart:
        for h in self.hearts:
            if h.id == hid:
                return self.shift(h, k)
        raise KeyError(f"no heart {hid!r} in atlas")

    def shift(self, heart: Heart, k: int) -> Heart:
        base_id, base_k = _split_label(heart.id)
        k_total = base_k + k
        label = base_id if k_total == 0 else f"{base_id}[{k_total}]"
        return Heart(label, frozenset(r.shifted(k) for r in heart.members), tuple(r.shifted(k) for r in heart.simples))

    def __len__(self):
        return len(self.hearts)

    def window(self) -> list:
        """Hearts between the standard heart and its shift by [-1]: the left tilts of ``H0``."""
        h0 = self.hearts[0]
        return [self.find(tp.free | {t.shifted(-1) for t in tp.torsion})
                for tp in enumerate_torsion_pairs(self.model, h0)]

    def chain_to(self, hid: str) -> list:
        """Tilt chain from ``H0`` to ``hid`` recorded during breadth-first construction."""
        path = [hid]
        while path[-1] in self.parent:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {"id": h.id, "members": sorted(str(r) for r in h.members),
                 "simples": [str(s) for s in h.simples], "chain": self.chain_to(h.id)}
                for h in self.hearts
            ],
            "edges": self.edges,
        }


def _split_label(label: str) -> tuple:
    if "[" in label:
        base, rest = label.split("[", 1)
        return base, int(rest.rstrip("]"))
    return label, 0


def check_heart(model: CategoryModel, heart: Heart) -> None:
    """Simples give a lattice basis and members are nonnegative combinations of simples."""
    rows = [model.class_of(s) for s in heart.simples]
    n = model.rank
    if len(rows) != n or round(abs(_det(rows))) != 1:
        raise ModelDataError(f"simples of {heart} do not form a lattice basis")
    for m in heart.members:
        coeffs = _coords(rows, model.class_of(m))
        if any(c < 0 or c.denominator != 1 for c in coeffs):
            raise ModelDataError(f"member {m} of {heart} is not a nonnegative combination of simples")


def _det(rows: list):
    from fractions import Fraction

    a = [[Fraction(x) for x in r] for r in rows]
    n, det = len(a), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def _coords(rows: list, v: tuple) -> list:
    """Coordinates of ``v`` in the basis ``rows`` (exact)."""
    from fractions import Fraction

    n = len(rows)
    # solve sum_s c_s rows[s] = v, i.e. rows^T c = v
    a = [[Fraction(rows[s][i]) for s in range(n)] + [Fraction(v[i])] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        a[c] = [x / a[c][c] for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[i][n] for i in range(n)]


# torsion pairs ----------------------------------------------------------------


def _closed(model: CategoryModel, heart: Heart, T: frozenset) -> bool:
    for t in model.triangles_in(heart.members):
        a_in = all(r in T for r in t.a)
        b_in = all(r in T for r in t.b)
        c_in = all(r in T for r in t.c)
        if b_in and not c_in:
            return False
        if a_in and c_in and not b_in:
            return False
    return True


def _perp(model: CategoryModel, heart: Heart, T: frozenset) -> frozenset:
    return frozenset(m for m in heart.members if not any(model.hom_nonzero(t, m) for t in T))


def _left_perp(model: CategoryModel, heart: Heart, F: frozenset) -> frozenset:
    return frozenset(m for m in heart.members if not any(model.hom_nonzero(m, f) for f in F))


def _has_ses(model: CategoryModel, heart: Heart, T: frozenset, F: frozenset) -> bool:
    for m in heart.members:
        if m in T or m in F:
            continue
        ok = any(
            all(r in T for r in t.a) and all(r in F for r in t.c) and list(t.b) == [m]
            for t in model.triangles_in(heart.members)
        )
        if not ok:
            return False
    return True


def enumerate_torsion_pairs(model: CategoryModel, heart: Heart) -> list:
    """All torsion pairs of a heart, found by exhaustive search over member subsets."""
    members = sorted(heart.members)
    out = []
    for size in range(len(members) + 1):
        for subset in combinations(members, size):
            T = frozenset(subset)
            if not _closed(model, heart, T):
                continue
            F = _perp(model, heart, T)
            if _left_perp(model, heart, F) != T or not _has_ses(model, heart, T, F):
                continue
            out.append(TorsionPair(T, F))
    return out


def torsion_pair(model: CategoryModel, heart: Heart, torsion) -> TorsionPair:
    """Complete a torsion class (Refs or names like ``"S1,X"``) to a validated torsion pair."""
    if isinstance(torsion, str):
        names = [s.strip() for s in torsion.split(",") if s.strip()]
        torsion = []
        for name in names:
            s = heart.shift_of(name)
            if s is None:
                raise DomainError(f"{name} is not a member of heart {heart}")
            torsion.append(Ref(name, s))
    T = frozenset(torsion)
    for tp in enumerate_torsion_pairs(model, heart):
        if tp.torsion == T:
            return tp
    raise DomainError(f"{sorted(map(str, T))} is not a torsion class of {heart}")


def _atlas_or_new(model: CategoryModel, members) -> Heart:
    if "atlas" in model._heart_cache:
        return model.atlas.find(members)
    heart = model.make_heart(members)
    check_heart(model, heart)
    return heart


def left_tilt(model: CategoryModel, heart: Heart, tp: TorsionPair) -> Heart:
    """The heart generated by the torsion-free part and the torsion part shifted by [-1]."""
    return _atlas_or_new(model, tp.free | {t.shifted(-1) for t in tp.torsion})


def right_tilt(model: CategoryModel, heart: Heart, tp: TorsionPair) -> Heart:
    """The heart generated by the torsion-free part shifted by [1] and the torsion part."""
    return _atlas_or_new(model, {f.shifted(1) for f in tp.free} | tp.torsion)


def dual_pair_after_left_tilt(tp: TorsionPair) -> TorsionPair:
    """The torsion pair (F, T[-1]) in the left tilt; right tilting at it undoes the left tilt."""
    return TorsionPair(tp.free, frozenset(t.shifted(-1) for t in tp.torsion))


def dual_pair_after_right_tilt(tp: TorsionPair) -> TorsionPair:
    """The torsion pair (F[1], T) in the right tilt; left tilting at it undoes the right tilt."""
    return TorsionPair(frozenset(f.shifted(1) for f in tp.free), tp.torsion)


def torsion_from_intermediate(model: CategoryModel, A: Heart, E: Heart) -> TorsionPair:
    """The torsion pair ``(A & E[1], A & E)`` of ``A``, checked to left tilt to the intermediate heart ``E``."""
    T = frozenset(a for a in A.members if a.shifted(-1) in E.members)
    F = frozenset(a for a in A.members if a in E.members)
    tp = TorsionPair(T, F)
    if F != _perp(model, A, T) or T != _left_perp(model, A, F) or not _has_ses(model, A, T, F):
        raise DomainError(f"{E} is not intermediate between {A} and its shift [-1]")
    if left_tilt(model, A, tp) != E:
        raise ModelDataError(f"left tilt of {A} at {tp} does not reproduce {E}")
    return tp


def spread(members) -> int:
    shifts = [r.shift for r in members]
    return max(shifts) - min(shifts)


def heart_atlas(model: CategoryModel, cap: int = 10000, max_spread: int = 1) -> Atlas:
    """Closure of the standard heart under left and right tilts, up to shift.

    Only hearts whose members span at most ``max_spread + 1`` consecutive shifts
    are explored: the unrestricted closure is infinite already for A2. Hearts
    met later by heart resolution are registered on demand.
    """
    atlas = Atlas(model)
    start, _ = atlas._register(model.standard_heart.members)
    queue = deque([start])
    seen = {start.id}
    while queue:
        heart = queue.popleft()
        for tp in enumerate_torsion_pairs(model, heart):
            t_names, _ = tp.names()
            for direction, members in (
                ("left", tp.free | {t.shifted(-1) for t in tp.torsion}),
                ("right", {f.shifted(1) for f in tp.free} | tp.torsion),
            ):
                if spread(model.ext_closure(members)) > max_spread:
                    continue
                target, k = atlas._register(frozenset(members))
                atlas.edges.append({"from": heart.id, "to": target.id, "shift": k,
                                    "torsion": t_names, "direction": direction})
                if target.id not in seen:
                    seen.add(target.id)
                    atlas.parent[target.id] = heart.id
                    queue.append(target)
                if len(atlas.hearts) > cap:
                    raise ModelTooLargeError(f"atlas exceeded {cap} hearts")
    return atlas


# stability-driven tilts -----------------------------------------------------------


@dataclass(frozen=True)
class TiltDecomposition:
    intermediate: Heart
    left: TorsionPair
    right: TorsionPair

    def replay(self, model: CategoryModel, A: Heart) -> Heart:
        return right_tilt(model, left_tilt(model, A, self.left), self.right)


def tilt_decompose_pair(sigma, tau, distance_value: Optional[float] = None) -> TiltDecomposition:
    """Left tilt of the heart of ``sigma`` followed by a right tilt reaching the heart of ``tau``."""
    from .metric import c_act, distance

    model = sigma.model
    d = distance(sigma, tau).value if distance_value is None else distance_value
    if not d < 0.5:
        raise DomainError(f"tilt decomposition needs distance < 1/2, got {d}")
    E = c_act(tau, -0.5).heart
    T = torsion_from_intermediate(model, sigma.heart, E)
    T_tau = torsion_from_intermediate(model, tau.heart, E)
    dec = TiltDecomposition(E, T, dual_pair_after_left_tilt(T_tau))
    if dec.replay(model, sigma.heart) != tau.heart:
        raise ModelDataError(f"tilt decomposition does not reach {tau.heart}")
    return dec


def limiting_torsion_pair(seq, tol: float = 1e-6) -> TorsionPair:
    """Members whose largest phase tends to 0 form F; the rest form T."""
    from .limits import limit_hn, limit_stability

    model = seq.model
    A = seq.samples[0][1].heart
    if any(s.heart != A for _, s in seq.samples):
        raise DomainError("samples of the sequence do not share a heart")
    F = []
    for m in A.members:
        lf = limit_hn(seq, m.base if m.shift == 0 else str(m))
        if abs(lf.factors[0][1]) <= tol:
            F.append(m)
    F = frozenset(F)
    tp = TorsionPair(A.members - F, F)
    if tp not in enumerate_torsion_pairs(model, A):
        raise ModelDataError(f"limiting classification {tp} is not a torsion pair")
    limit = limit_stability(seq)
    if right_tilt(model, A, tp) != limit.heart:
        raise ModelDataError(f"right tilt at {tp} differs from the limit heart {limit.heart}")
    return tp
