"""Brute-force checks over representations of a quiver with coefficients in F2.

Vectors of F2^d are bitmasks; a subspace is stored as the bitmask of its
elements (bit ``v`` set when vector ``v`` lies in it), so inclusion of
subspaces is a single ``&``. Nothing here uses the category model's triangles
or hom table, which is what makes it a useful cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import DomainError, Report, UniquenessViolationError

MAX_DIM = 3


@dataclass(frozen=True)
class Quiver:
    vertices: int
    arrows: tuple

    @classmethod
    def from_dict(cls, d: dict) -> "Quiver":
        return cls(int(d["vertices"]), tuple((int(a), int(b)) for a, b in d["arrows"]))


@dataclass(frozen=True)
class Rep:
    """Dimension vector plus one ``dims[t] x dims[s]`` matrix per arrow ``s -> t``, rows as tuples."""

    dims: tuple
    maps: tuple

    @classmethod
    def from_dict(cls, d: dict) -> "Rep":
        return cls(tuple(d["dims"]), tuple(tuple(tuple(int(x) % 2 for x in row) for row in m) for m in d["maps"]))


def _columns(matrix: tuple, src_dim: int) -> tuple:
    """Images of the basis vectors as bitmasks."""
    return tuple(sum(((row[j] & 1) << i) for i, row in enumerate(matrix)) for j in range(src_dim))


def _apply(cols: tuple, v: int) -> int:
    out = 0
    j = 0
    while v:
        if v & 1:
            out ^= cols[j]
        v >>= 1
        j += 1
    return out


@lru_cache(maxsize=None)
def subspaces(d: int) -> tuple:
    """All subspaces of F2^d as ``(dimension, element bitmask, element tuple)``."""
    seen = {}
    frontier = [frozenset([0])]
    while frontier:
        nxt = []
        for s in frontier:
            if s in seen:
                continue
            seen[s] = None
            for v in range(1, 1 << d):
                if v not in s:
                    nxt.append(s | {x ^ v for x in s})
        frontier = nxt
    out = []
    for s in seen:
        mask = sum(1 << v for v in s)
        out.append((int(math.log2(len(s))), mask, tuple(sorted(s))))
    return tuple(sorted(out))


def subrepresentations(quiver: Quiver, rep: Rep) -> list:
    """All subrepresentations as ``(dimension vector, tuple of per-vertex subspace masks)``."""
    for d in rep.dims:
        if d > MAX_DIM:
            raise DomainError(f"oracle refuses dimension {d} > {MAX_DIM}")
    cols = [_columns(m, rep.dims[s]) for m, (s, _) in zip(rep.maps, quiver.arrows)]
    out = []
    for choice in product(*(subspaces(d) for d in rep.dims)):
        ok = True
        for c, (s, t) in zip(cols, quiver.arrows):
            target = choice[t][1]
            if any(not (target >> _apply(c, v)) & 1 for v in choice[s][2]):
                ok = False
                break
        if ok:
            out.append((tuple(x[0] for x in choice), tuple(x[1] for x in choice)))
    return out


def _contains(big: tuple, small: tuple) -> bool:
    return all(s & ~b == 0 for b, s in zip(big, small))


def _phase_greater(z1: tuple, z2: tuple) -> int:
    """Sign of ``phase(z1) - phase(z2)`` for integer points of the semiclosed upper half-plane."""
    c = z2[0] * z1[1] - z2[1] * z1[0]
    return (c > 0) - (c < 0)


def _phase(z: tuple) -> float:
    return math.atan2(z[1], z[0]) / math.pi


@dataclass(frozen=True)
class OracleHN:
    """Factor classes (dimension vectors) and phases, top phase first."""

    classes: tuple
    phases: tuple


def integer_charge(values) -> list:
    """Scale Q[i] values on the vertex basis to integer pairs (same phases)."""
    pairs = [(Fraction(v.re), Fraction(v.im)) for v in values]
    den = 1
    for a, b in pairs:
        den = den * a.denominator // math.gcd(den, a.denominator)
        den = den * b.denominator // math.gcd(den, b.denominator)
    return [(int(a * den), int(b * den)) for a, b in pairs]


def oracle_hn(quiver: Quiver, rep: Rep, charge, subreps=None) -> OracleHN:
    """HN filtration of ``rep`` by repeatedly extracting the maximal destabilizing subobject.

    ``charge`` is an exact central charge (or its values) on the vertex basis,
    taking every simple into the semiclosed upper half-plane.
    """
    values = charge.values if hasattr(charge, "values") else charge
    Z = integer_charge(values)
    for z in Z:
        if not (z[1] > 0 or (z[1] == 0 and z[0] < 0)):
            raise DomainError("charge takes a simple outside the semiclosed upper half-plane")
    subs = subreps if subreps is not None else subrepresentations(quiver, rep)
    if sum(rep.dims) == 0:
        raise DomainError("the zero representation has no HN filtration")

    def Zof(dv):
        return (sum(d * z[0] for d, z in zip(dv, Z)), sum(d * z[1] for d, z in zip(dv, Z)))

    current = (tuple(0 for _ in rep.dims), tuple(1 for _ in rep.dims))
    classes, phases = [], []
    while current[0] != rep.dims:
        best, tied = None, []
        for dv, masks in subs:
            if masks == current[1] or not _contains(masks, current[1]):
                continue
            cls = tuple(a - b for a, b in zip(dv, current[0]))
            z = Zof(cls)
            if best is not None:
                s = _phase_greater(z, best[0])
                if s < 0 or (s == 0 and sum(cls) < sum(best[1])):
                    continue
                if s == 0 and sum(cls) == sum(best[1]):
                    tied.append((dv, masks))
                    continue
            best, tied = (z, cls, (dv, masks)), []
        if tied:
            raise UniquenessViolationError(f"maximal destabilizing subobject is not unique: {best[2]} vs {tied}")
        z, cls, current = best
        if classes and _phase_greater(z, Zof(classes[-1])) >= 0:
            raise UniquenessViolationError("oracle factors do not have strictly decreasing phases")
        classes.append(cls)
        phases.append(_phase(z))
    return OracleHN(tuple(classes), tuple(phases))


def all_representations(quiver: Quiver, max_dims: tuple):
    """Every representation with dimension vector componentwise ``<= max_dims`` (zero excluded)."""
    for dims in product(*(range(m + 1) for m in max_dims)):
        if sum(dims) == 0:
            continue
        shapes = [(dims[t], dims[s]) for s, t in quiver.arrows]
        sizes = [r * c for r, c in shapes]
        for bits in product(*(range(1 << n) for n in sizes)):
            maps = []
            for (r, c), b in zip(shapes, bits):
                maps.append(tuple(tuple((b >> (i * c + j)) & 1 for j in range(c)) for i in range(r)))
            yield Rep(dims, tuple(maps))


def rank_f2(rows: list) -> int:
    """Rank of a list of bitmask rows over F2."""
    basis = {}
    r = 0
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top in basis:
                row ^= basis[top]
            else:
                basis[top] = row
                r += 1
                break
    return r


def matrix_rank_f2(matrix: tuple) -> int:
    return rank_f2([sum((x & 1) << j for j, x in enumerate(row)) for row in matrix])


def hom_dim(quiver: Quiver, M: Rep, N: Rep) -> int:
    """``dim Hom(M, N)``: nullity of ``f_t M_a - N_a f_s = 0`` over all arrows ``a: s -> t``."""
    offsets, n = [], 0
    for v in range(quiver.vertices):
        offsets.append(n)
        n += N.dims[v] * M.dims[v]

    def var(v, i, j):  # entry (i, j) of f_v : M_v -> N_v
        return offsets[v] + i * M.dims[v] + j

    rows = []
    for (s, t), Ma, Na in zip(quiver.arrows, M.maps, N.maps):
        for i in range(N.dims[t]):
            for j in range(M.dims[s]):
                row = 0
                for k in range(M.dims[t]):  # (f_t M_a)_{ij} = sum_k f_t[i,k] M_a[k,j]
                    if Ma[k][j] & 1:
                        row ^= 1 << var(t, i, k)
                for k in range(N.dims[s]):  # (N_a f_s)_{ij} = sum_k N_a[i,k] f_s[k,j]
                    if Na[i][k] & 1:
                        row ^= 1 << var(s, k, j)
                rows.append(row)
    return n - rank_f2(rows)


def euler_form(quiver: Quiver, d: tuple, e: tuple) -> int:
    return sum(a * b for a, b in zip(d, e)) - sum(d[s] * e[t] for s, t in quiver.arrows)


def ext_dim(quiver: Quiver, M: Rep, N: Rep) -> int:
    """``dim Ext^1(M, N)`` from the Euler form (path algebras are hereditary)."""
    return hom_dim(quiver, M, N) - euler_form(quiver, M.dims, N.dims)


def model_reps(model) -> tuple:
    q = Quiver.from_dict(model.quiver)
    reps = {u: Rep.from_dict(d) for u, d in model.quiver["reps"].items()}
    return q, reps


def rep_to_object(model, rep: Rep):
    """The model object isomorphic to ``rep`` (A1 and A2 fixtures)."""
    from .model import ObjectExpr, Ref, a2_rep_object

    if model.rank == 1:
        return ObjectExpr(tuple([Ref(model.base_ids[0])] * rep.dims[0]))
    if model.rank == 2 and set(model.base_ids) == {"S1", "S2", "X"}:
        return a2_rep_object(rep.dims[0], rep.dims[1], matrix_rank_f2(rep.maps[0]))
    raise DomainError("representation-to-object translation exists only for the A1 and A2 fixtures")


def cross_validate_model(model) -> Report:
    """Compare the hom table and the shift-0 triangles with Hom/Ext computed over F2."""
    rep = Report()
    try:
        q, reps = model_reps(model)
    except (KeyError, TypeError, ValueError) as e:
        rep.add("oracle-reps", False, str(e))
        return rep
    missing = [u for u in model.base_ids if u not in reps]
    bad_dims = [u for u in model.base_ids if u in reps and tuple(reps[u].dims) != tuple(model.indecomposables[u].cls)]
    rep.add("oracle-reps", not missing and not bad_dims, (missing + bad_dims) or None)
    if missing or bad_dims:
        return rep

    expected = set()
    for a in model.base_ids:
        for b in model.base_ids:
            if hom_dim(q, reps[a], reps[b]):
                expected.add((a, 0, b))
            if ext_dim(q, reps[a], reps[b]):
                expected.add((a, -1, b))
    table = set(model.hom)
    diff = sorted(f"{a}@{k}->{b}" for a, k, b in expected ^ table)
    rep.add("oracle-hom-table", expected == table, diff or None)

    # every non-split extension of indecomposables appears as a shift-0 triangle, and conversely
    ses = set()
    for t in model.triangles:
        for r in (t, t.rotated(), t.rotated().rotated()):
            if all(x.shift == 0 for x in r.refs()) and len(r.a.summands) == len(r.c.summands) == 1:
                ses.add((r.a.summands[0].base, r.c.summands[0].base))
    needed = {(a, c) for a in model.base_ids for c in model.base_ids if ext_dim(q, reps[c], reps[a])}
    diff = sorted(f"{c}->{a}" for a, c in needed ^ ses)
    rep.add("oracle-extensions", needed == ses, diff or None)
    return rep
