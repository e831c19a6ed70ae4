"""Finite presentations of triangulated categories.

A model lists its indecomposables up to shift together with their classes in
a rank-n lattice, a list of exact triangles stored up to shift, and a table of
nonvanishing Hom spaces. Objects are formal direct sums of shifted
indecomposables, which is sound for hereditary categories of Dynkin type.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .errors import DomainError, ModelMismatchError, Report


@dataclass(frozen=True, order=True)
class Ref:
    """The indecomposable ``base[shift]``."""

    base: str
    shift: int = 0

    def shifted(self, k: int) -> "Ref":
        return Ref(self.base, self.shift + k)

    def __str__(self) -> str:
        return self.base if self.shift == 0 else f"{self.base}[{self.shift}]"


_SUMMAND = re.compile(r"^([A-Za-z_][A-Za-z0-9_']*)(?:\[(-?\d+)\]|@(-?\d+))?$")


def parse_ref(text: str) -> Ref:
    """Parse ``"S1"``, ``"S1[1]"`` or ``"S1@-1"``."""
    m = _SUMMAND.match(text.strip().replace(" ", ""))
    if not m:
        raise ValueError(f"cannot parse indecomposable {text!r}")
    k = m.group(2) if m.group(2) is not None else m.group(3)
    return Ref(m.group(1), int(k) if k is not None else 0)


@dataclass(frozen=True)
class ObjectExpr:
    """A finite direct sum of shifted indecomposables (sorted multiset)."""

    summands: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(sorted(self.summands)))

    @classmethod
    def of(cls, *refs) -> "ObjectExpr":
        out = []
        for r in refs:
            if isinstance(r, ObjectExpr):
                out.extend(r.summands)
            elif isinstance(r, str):
                out.extend(cls.parse(r).summands)
            else:
                out.append(r)
        return cls(tuple(out))

    @classmethod
    def parse(cls, text) -> "ObjectExpr":
        """Grammar: summands joined by ``+``, shifts as ``[k]``; ``"0"`` is the zero object."""
        if isinstance(text, (list, tuple)):
            return cls(tuple(parse_ref(t) for t in text))
        text = text.replace(" ", "")
        if text in ("", "0"):
            return cls(())
        return cls(tuple(parse_ref(p) for p in text.split("+")))

    def shifted(self, k: int) -> "ObjectExpr":
        return ObjectExpr(tuple(r.shifted(k) for r in self.summands))

    def __add__(self, other: "ObjectExpr") -> "ObjectExpr":
        return ObjectExpr(self.summands + other.summands)

    def is_zero(self) -> bool:
        return not self.summands

    def __iter__(self):
        return iter(self.summands)

    def __len__(self):
        return len(self.summands)

    def __str__(self) -> str:
        return "+".join(str(r) for r in self.summands) or "0"

    def to_list(self) -> list:
        return [f"{r.base}@{r.shift}" for r in self.summands]


@dataclass(frozen=True)
class Indecomposable:
    id: str
    name: str
    cls: tuple


@dataclass(frozen=True)
class Triangle:
    """``a -> b -> c -> a[1]``."""

    a: ObjectExpr
    b: ObjectExpr
    c: ObjectExpr

    def shifted(self, k: int) -> "Triangle":
        return Triangle(self.a.shifted(k), self.b.shifted(k), self.c.shifted(k))

    def refs(self) -> list:
        return [*self.a, *self.b, *self.c]

    def canonical(self) -> "Triangle":
        shifts = [r.shift for r in self.refs()]
        return self.shifted(-min(shifts)) if shifts else self

    def rotated(self) -> "Triangle":
        return Triangle(self.b, self.c, self.a.shifted(1))

    def __str__(self) -> str:
        return f"{self.a} -> {self.b} -> {self.c}"


@dataclass(frozen=True)
class Heart:
    """A heart given extensionally by its member indecomposables."""

    id: str
    members: frozenset
    simples: tuple

    def shift_of(self, base: str) -> Optional[int]:
        for r in self.members:
            if r.base == base:
                return r.shift
        return None

    def contains(self, obj) -> bool:
        if isinstance(obj, Ref):
            return obj in self.members
        return all(r in self.members for r in obj)

    def key(self) -> frozenset:
        return self.members

    def __eq__(self, other):
        return isinstance(other, Heart) and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __str__(self) -> str:
        return "<" + ", ".join(str(r) for r in sorted(self.members)) + ">"


def canonical_members(members: Iterable[Ref]) -> tuple:
    """Shift a member set so its smallest shift is 0; returns (members, applied shift)."""
    members = frozenset(members)
    k = -min(r.shift for r in members)
    return frozenset(r.shifted(k) for r in members), k


class CategoryModel:
    """Finite model of a triangulated category.

    ``hom`` holds triples ``(a, k, b)`` meaning ``Hom(a[k], b) != 0`` for base ids
    ``a``, ``b``. Triangles are stored canonically up to shift.
    """

    def __init__(self, lattice_rank: int, indecomposables, triangles, hom, *, name: str = "model", quiver=None):
        self.name = name
        self.rank = int(lattice_rank)
        self.indecomposables = {u.id: u for u in indecomposables}
        seen, tri = set(), []
        for t in triangles:
            c = t.canonical()
            if c not in seen:
                seen.add(c)
                tri.append(c)
        self.triangles = tri
        self.hom = frozenset(hom)
        self.quiver = quiver
        self.atlas_cap = 10000
        self._heart_cache: dict = {}

    def __repr__(self) -> str:
        return f"CategoryModel({self.name!r}, rank={self.rank}, {len(self.indecomposables)} indecomposables)"

    @property
    def base_ids(self) -> list:
        return list(self.indecomposables)

    def check_ref(self, r: Ref) -> None:
        if r.base not in self.indecomposables:
            raise ModelMismatchError(f"unknown indecomposable {r.base!r} in model {self.name!r}")

    def class_of(self, obj) -> tuple:
        if isinstance(obj, Ref):
            obj = ObjectExpr((obj,))
        v = [0] * self.rank
        for r in obj:
            self.check_ref(r)
            sign = -1 if r.shift % 2 else 1
            for i, x in enumerate(self.indecomposables[r.base].cls):
                v[i] += sign * x
        return tuple(v)

    def hom_nonzero(self, x: Ref, y: Ref) -> bool:
        """Whether ``Hom(x, y) != 0`` for shifted indecomposables."""
        return (x.base, x.shift - y.shift, y.base) in self.hom

    def hom_nonzero_obj(self, x: ObjectExpr, y: ObjectExpr) -> bool:
        return any(self.hom_nonzero(a, b) for a in x for b in y)

    def triangles_all_shifts(self, anchor: Ref) -> Iterator[Triangle]:
        """Stored triangles shifted so some summand equals ``anchor``."""
        seen = set()
        for t in self.triangles:
            for r in t.refs():
                if r.base == anchor.base:
                    s = t.shifted(anchor.shift - r.shift)
                    if s not in seen:
                        seen.add(s)
                        yield s

    def triangles_in(self, members: frozenset) -> list:
        """All shifted triangles whose three terms lie in ``members`` (short exact sequences)."""
        key = ("tri", members)
        if key in self._heart_cache:
            return self._heart_cache[key]
        shift = {r.base: r.shift for r in members}
        out = []
        for t in self.triangles:
            b0 = t.b.summands[0] if t.b.summands else t.refs()[0]
            if b0.base not in shift:
                continue
            s = t.shifted(shift[b0.base] - b0.shift)
            if all(r in members for r in s.refs()) and not s.a.is_zero() and not s.c.is_zero():
                out.append(s)
        self._heart_cache[key] = out
        return out

    def sub_triangles(self, members: frozenset, h: Ref) -> list:
        """Triangles ``a -> h -> c`` inside the heart with ``a, c`` nonzero."""
        target = ObjectExpr((h,))
        return [t for t in self.triangles_in(members) if t.b == target]

    def find_middle(self, a: ObjectExpr, c: ObjectExpr) -> Optional[ObjectExpr]:
        """A listed extension ``a -> ? -> c``, or None."""
        if a.is_zero():
            return c
        if c.is_zero():
            return a
        anchor = a.summands[0]
        for t in self.triangles_all_shifts(anchor):
            if t.a == a and t.c == c:
                return t.b
        return None

    def ext_closure(self, members) -> frozenset:
        """Indecomposables generated from ``members`` by listed extensions."""
        out = set(members)
        changed = True
        while changed:
            changed = False
            for anchor in list(out):
                for t in self.triangles_all_shifts(anchor):
                    if len(t.b) == 1 and t.b.summands[0] not in out and not t.a.is_zero() and not t.c.is_zero() \
                            and all(r in out for r in t.a) and all(r in out for r in t.c):
                        out.add(t.b.summands[0])
                        changed = True
        return frozenset(out)

    def make_heart(self, members, hid: str = "") -> Heart:
        members = self.ext_closure(members)
        simples = []
        for m in sorted(members):
            if not self.sub_triangles(members, m):
                simples.append(m)
        return Heart(hid, members, tuple(simples))

    @cached_property
    def standard_heart(self) -> Heart:
        return self.make_heart((Ref(u, 0) for u in self.indecomposables), "H0")

    @property
    def atlas(self):
        from .tilting import heart_atlas

        if "atlas" not in self._heart_cache:
            self._heart_cache["atlas"] = heart_atlas(self, cap=self.atlas_cap)
        return self._heart_cache["atlas"]

    def heart(self, label) -> Heart:
        """Look up an atlas heart by label ``"H2"`` or ``"H2[1]"``; Hearts pass through."""
        if isinstance(label, Heart):
            return label
        m = re.match(r"^(\w+?)(?:\[(-?\d+)\])?$", str(label).strip())
        if not m:
            raise ValueError(f"bad heart label {label!r}")
        return self.atlas.get(m.group(1), int(m.group(2) or 0))

    def heart_simple_matrix(self, heart: Heart):
        return [self.class_of(s) for s in heart.simples]

    # serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "lattice_rank": self.rank,
            "indecomposables": [
                {"id": u.id, "name": u.name, "class": list(u.cls)} for u in self.indecomposables.values()
            ],
            "triangles": [[t.a.to_list(), t.b.to_list(), t.c.to_list()] for t in self.triangles],
            "hom": [[f"{a}@{k}", b, True] for (a, k, b) in sorted(self.hom)],
        }
        if self.quiver is not None:
            d["quiver"] = self.quiver
        return d


def model_from_dict(data: dict) -> CategoryModel:
    try:
        rank = int(data["lattice_rank"])
        inds = [Indecomposable(str(u["id"]), str(u.get("name", u["id"])), tuple(int(x) for x in u["class"]))
                for u in data["indecomposables"]]
        tris = []
        for i, entry in enumerate(data.get("triangles", [])):
            if len(entry) != 3:
                raise ValueError(f"triangles[{i}]: expected three terms")
            tris.append(Triangle(*(ObjectExpr.parse(list(x)) for x in entry)))
        hom = set()
        for i, entry in enumerate(data.get("hom", [])):
            src, dst = parse_ref(entry[0]), str(entry[1])
            flag = entry[2] if len(entry) > 2 else True
            if flag:
                hom.add((src.base, src.shift, dst))
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed model data: missing or bad field {e}") from e
    return CategoryModel(rank, inds, tris, hom, name=data.get("name", "model"), quiver=data.get("quiver"))


def load_model(path) -> CategoryModel:
    """Load a model file; bare names ``a1``/``a2`` (or ``models/a2.json``) fall back to bundled fixtures."""
    p = Path(path)
    if p.exists():
        with open(p) as f:
            return model_from_dict(json.load(f))
    stem = p.stem
    return fixture(stem)


def fixture(name: str) -> CategoryModel:
    """The bundled model ``a1`` or ``a2``."""
    name = name[:-5] if name.endswith(".json") else name
    try:
        text = resources.files("stablab").joinpath("models", f"{name}.json").read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"no model file or bundled fixture named {name!r}") from None
    return model_from_dict(json.loads(text))


def validate_model(model: CategoryModel, *, oracle: bool = True) -> Report:
    """Check the structural invariants of a model; never raises."""
    rep = Report()
    if model.rank <= 0 or not model.indecomposables:
        rep.add("nondegenerate", False, {"lattice_rank": model.rank, "indecomposables": len(model.indecomposables)})
        return rep
    rep.add("nondegenerate", True)

    bad_len = [u.id for u in model.indecomposables.values() if len(u.cls) != model.rank]
    rep.add("class-length", not bad_len, bad_len or None)

    unknown = sorted({r.base for t in model.triangles for r in t.refs() if r.base not in model.indecomposables}
                     | {x for (a, _, b) in model.hom for x in (a, b) if x not in model.indecomposables})
    rep.add("known-ids", not unknown, unknown or None)
    if unknown or bad_len:
        return rep

    canon = [t.canonical() for t in model.triangles]
    dup = [str(t) for t, n in Counter(canon).items() if n > 1]
    rep.add("shift-closure", len(set(canon)) == len(canon) and all(t == c for t, c in zip(model.triangles, canon)),
            dup or None)

    bad_add = []
    for t in model.triangles:
        ca, cb, cc = model.class_of(t.a), model.class_of(t.b), model.class_of(t.c)
        if tuple(x + z for x, z in zip(ca, cc)) != cb:
            bad_add.append(str(t))
    rep.add("class-additivity", not bad_add, bad_add or None)

    bad_hom = []
    for t in model.triangles:
        if t.a.is_zero() or t.b.is_zero() or t.c.is_zero():
            continue
        if not model.hom_nonzero_obj(t.a, t.b) or not model.hom_nonzero_obj(t.b, t.c):
            bad_hom.append(str(t))
    rep.add("hom-triangle-consistency", not bad_hom, bad_hom or None)

    ident = [u for u in model.indecomposables if (u, 0, u) not in model.hom]
    rep.add("identity-homs", not ident, ident or None)

    if oracle and model.quiver is not None:
        from .oracle import cross_validate_model

        rep.extend(cross_validate_model(model))
    return rep


def a2_rep_object(d1: int, d2: int, rank: int) -> ObjectExpr:
    """The A2 fixture object isomorphic to a representation ``k^d1 -> k^d2`` of the given rank."""
    refs = [Ref("X")] * rank + [Ref("S1")] * (d1 - rank) + [Ref("S2")] * (d2 - rank)
    return ObjectExpr(tuple(refs))


def parse_object(model: CategoryModel, text) -> ObjectExpr:
    obj = text if isinstance(text, ObjectExpr) else ObjectExpr.parse(text)
    for r in obj:
        model.check_ref(r)
    return obj


def require_nonzero(obj: ObjectExpr) -> None:
    if obj.is_zero():
        raise DomainError("the zero object has no phase or mass")
