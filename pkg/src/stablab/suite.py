"""The acceptance checks, runnable from the command line and from the tests.

Every check is a function ``(seed) -> CheckResult`` and never raises: an
exception inside a check is reported as a failure with the error text.
"""

from __future__ import annotations

import math
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .gaussian import QI
from .model import ObjectExpr, Ref, a2_rep_object, fixture


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict
    seconds: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} ({self.seconds:.2f}s) {self.detail}"


def _a2():
    return fixture("a2")


def standard_sigma(model, flipped: bool = False):
    """``Z(S1) = i, Z(S2) = 1 + i`` on the standard heart (or the two values swapped)."""
    from .stability import stability

    vals = [QI(1, 1), QI(0, 1)] if flipped else [QI(0, 1), QI(1, 1)]
    return stability(model, "H0", vals)


# 1 ------------------------------------------------------------------------------


def hyperbolic_quotient(seed: int = 0) -> CheckResult:
    from .gtilde import GroupElement, quotient_distance_G

    rows, ok = [], True
    for a in (2, 4, 10):
        t = time.perf_counter()
        val, _ = quotient_distance_G(GroupElement.identity(), GroupElement.diagonal(a))
        dt = time.perf_counter() - t
        good = abs(val - 0.5 * math.log(a)) <= 1e-3 and dt < 10
        ok &= good
        rows.append({"a": a, "value": round(val, 8), "expected": round(0.5 * math.log(a), 8), "seconds": round(dt, 3)})
    return CheckResult("hyperbolic-quotient", ok, {"runs": rows})


# 2 ------------------------------------------------------------------------------


def orbit_formula(seed: int = 0, trials: int = 100) -> CheckResult:
    from .metric import c_act, distance, random_stability

    model = _a2()
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, []
    for i in range(trials):
        sigma = random_stability(model, rng, exact=bool(i % 2))
        lam = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        d = distance(sigma, c_act(sigma, lam)).value
        err = abs(d - max(abs(lam.real), math.pi * abs(lam.imag)))
        worst = max(worst, err)
        if err > 1e-9:
            fails.append({"trial": i, "lambda": [lam.real, lam.imag], "distance": d})
    return CheckResult("orbit-formula", not fails, {"trials": trials, "max_error": worst, "failures": fails[:5]})


# 3 ------------------------------------------------------------------------------


def oracle_equivalence(seed: int = 0, charges: int = 50, max_dims=(3, 3)) -> CheckResult:
    from .metric import random_charge_values
    from .oracle import all_representations, model_reps, oracle_hn, rep_to_object, subrepresentations
    from .stability import StabilityCondition, charge_from_simples, hn_filtration

    model = _a2()
    q, _ = model_reps(model)
    reps = [(r, subrepresentations(q, r), rep_to_object(model, r)) for r in all_representations(q, max_dims)]
    rng = np.random.default_rng(seed)
    H0 = model.heart("H0")
    mismatches = []
    for _ in range(charges):
        Z = charge_from_simples(model, H0, random_charge_values(rng, 2, exact=True))
        sigma = StabilityCondition(model, H0, Z)
        for r, subs, obj in reps:
            o = oracle_hn(q, r, Z, subs)
            f = hn_filtration(sigma, obj)
            classes = tuple(model.class_of(x.obj) for x in f.factors)
            if classes != o.classes or any(abs(a - b) > 1e-12 for a, b in zip(f.phases, o.phases)):
                mismatches.append({"rep": [list(r.dims), [list(map(list, m)) for m in r.maps]],
                                   "charge": [str(v) for v in Z.values], "ours": f.summary(),
                                   "oracle": [list(c) for c in o.classes]})
    return CheckResult("oracle-equivalence", not mismatches,
                       {"representations": len(reps), "charges": charges, "mismatches": len(mismatches),
                        "examples": mismatches[:3]})


# 4 ------------------------------------------------------------------------------


def completeness_lab(seed: int = 0, N: int = 1000) -> CheckResult:
    from .limits import a2_sequence, limit_stability
    from .metric import distance
    from .stability import check_stability_axioms
    from .tilting import limiting_torsion_pair, right_tilt, torsion_pair

    model = _a2()
    seq = a2_sequence(model, N)
    valid = seq.validate()
    limit = limit_stability(seq)
    axioms = check_stability_axioms(limit)
    A = model.heart("H0")
    expected = right_tilt(model, A, torsion_pair(model, A, "S1,X"))
    tp = limiting_torsion_pair(seq)
    predicted = right_tilt(model, A, tp)
    target = frozenset({Ref("S2", 1), Ref("S1", 0), Ref("X", 0)})
    over = [n for n, s in seq.samples if distance(s, limit).value > 2.0 / n]
    ok = valid.ok and axioms.ok and limit.heart.members == target and expected == limit.heart \
        and predicted == limit.heart and not over
    return CheckResult("completeness-lab", ok, {
        "samples": N,
        "schedule_consistent": valid.ok,
        "axioms": axioms.ok,
        "limit_heart": str(limit.heart),
        "limit_simples": [str(s) for s in limit.heart.simples],
        "limiting_torsion_pair": str(tp),
        "distance_violations": over[:5],
    })


# 5 ------------------------------------------------------------------------------


def tilt_decomposition(seed: int = 0, pairs: int = 100) -> CheckResult:
    from .gtilde import g_act, random_element
    from .metric import distance, random_stability
    from .tilting import tilt_decompose_pair

    model = _a2()
    rng = np.random.default_rng(seed)
    fails, done, tries = [], 0, 0
    hearts = set()
    while done < pairs and tries < 50 * pairs:
        tries += 1
        sigma = random_stability(model, rng, exact=False)
        g = random_element(rng, lift_range=0, log_scale=0.3)
        try:
            tau = g_act(sigma, g)
        except Exception:  # noqa: BLE001 - charge left every known heart; draw again
            continue
        d = distance(sigma, tau).value
        if not d < 0.5:
            continue
        done += 1
        hearts.add((sigma.heart, tau.heart))
        try:
            dec = tilt_decompose_pair(sigma, tau, d)
            if dec.replay(model, sigma.heart) != tau.heart:
                fails.append({"pair": done, "sigma": str(sigma.heart), "tau": str(tau.heart)})
        except Exception as e:  # noqa: BLE001
            fails.append({"pair": done, "error": str(e)})
    ok = done == pairs and not fails
    return CheckResult("tilt-decomposition", ok, {"pairs": done, "distinct_heart_pairs": len(hearts),
                                                  "failures": fails[:5]})


# 6 ------------------------------------------------------------------------------


def property_suites(seed: int = 0, n: int = 100) -> CheckResult:
    from .gtilde import GroupElement, dG, delta, g_compose, random_element
    from .metric import distance, random_stability
    from .stability import hn_filtration
    from .tilting import (
        dual_pair_after_left_tilt,
        dual_pair_after_right_tilt,
        enumerate_torsion_pairs,
        left_tilt,
        right_tilt,
    )

    model = _a2()
    rng = np.random.default_rng(seed)
    tol = 1e-9
    out = {}

    bad = []
    for _ in range(n):
        sigma = random_stability(model, rng, exact=True)
        for t in model.triangles:
            if t.a.is_zero() or t.c.is_zero():
                continue
            fa, fb, fc = (hn_filtration(sigma, x) for x in (t.a, t.b, t.c))
            if not (min(fa.phi_minus, fc.phi_minus) - tol <= fb.phi_minus <= fb.phi_plus
                    <= max(fa.phi_plus, fc.phi_plus) + tol):
                bad.append({"triangle": str(t), "sigma": repr(sigma)})
    out["phase-bounds"] = len(bad)

    bad = []
    count = 0
    for A in model.atlas.window():
        for tp in enumerate_torsion_pairs(model, A):
            count += 1
            if right_tilt(model, left_tilt(model, A, tp), dual_pair_after_left_tilt(tp)) != A:
                bad.append({"heart": str(A), "pair": str(tp), "direction": "left"})
            if left_tilt(model, right_tilt(model, A, tp), dual_pair_after_right_tilt(tp)) != A:
                bad.append({"heart": str(A), "pair": str(tp), "direction": "right"})
    out["tilt-inversion"] = len(bad)
    out["torsion-pairs-checked"] = count

    elems = [random_element(rng, lift_range=2) for _ in range(n)]
    zero_bad = int(delta(GroupElement.identity()) != 0) + sum(1 for g in elems if not delta(g) > 0)
    out["delta-zero-iff-identity"] = zero_bad

    inv_bad = 0
    for _ in range(n):
        a, b, c = (random_element(rng, lift_range=2) for _ in range(3))
        if abs(dG(g_compose(c, a), g_compose(c, b)) - dG(a, b)) > 1e-9:
            inv_bad += 1
    out["left-invariance"] = inv_bad

    met_bad = 0
    for _ in range(n):
        s1, s2, s3 = (random_stability(model, rng, exact=False) for _ in range(3))
        d12, d21 = distance(s1, s2).value, distance(s2, s1).value
        d13, d23 = distance(s1, s3).value, distance(s2, s3).value
        if abs(d12 - d21) > tol or d13 > d12 + d23 + tol:
            met_bad += 1
    out["metric-axioms"] = met_bad

    ok = all(v == 0 for k, v in out.items() if k != "torsion-pairs-checked")
    return CheckResult("property-suites", ok, out)


# 7 ------------------------------------------------------------------------------


def length_bounds(seed: int = 0) -> CheckResult:
    from .limits import length_bound
    from .stability import hn_filtration

    model = _a2()
    sigma = standard_sigma(model)
    worked = length_bound(sigma.charge, (0.25, 0.75), QI(1, 2))
    over, checked = [], 0
    for s in (standard_sigma(model), standard_sigma(model, flipped=True)):
        for d1 in range(4):
            for d2 in range(4):
                for r in range(min(d1, d2) + 1):
                    if d1 + d2 == 0:
                        continue
                    obj = a2_rep_object(d1, d2, r)
                    f = hn_filtration(s, obj)
                    L = length_bound(s.charge, (f.phi_minus, f.phi_plus), obj, model)
                    checked += 1
                    if len(f) > L:
                        over.append({"object": str(obj), "length": len(f), "bound": L})
    return CheckResult("length-bound", worked == 8 and not over,
                       {"worked_example": worked, "objects_checked": checked, "violations": over[:5]})


# 8 ------------------------------------------------------------------------------


def quotient_vs_hyperbolic(seed: int = 0, pairs: int = 50) -> CheckResult:
    from .gtilde import hyp_distance, mobius_project, quotient_distance_G, random_element

    rng = np.random.default_rng(seed)
    worst, fails = 0.0, []
    for i in range(pairs):
        g, h = random_element(rng), random_element(rng)
        q, _ = quotient_distance_G(g, h)
        hd = 0.5 * hyp_distance(mobius_project(g), mobius_project(h))
        worst = max(worst, abs(q - hd))
        if abs(q - hd) > 1e-2:
            fails.append({"pair": i, "quotient": q, "half_hyperbolic": hd})
    return CheckResult("quotient-vs-hyperbolic", not fails, {"pairs": pairs, "max_error": worst, "failures": fails[:5]})


CHECKS: dict = {
    "hyperbolic-quotient": hyperbolic_quotient,
    "orbit-formula": orbit_formula,
    "oracle-equivalence": oracle_equivalence,
    "completeness-lab": completeness_lab,
    "tilt-decomposition": tilt_decomposition,
    "property-suites": property_suites,
    "length-bound": length_bounds,
    "quotient-vs-hyperbolic": quotient_vs_hyperbolic,
}


def run_check(name: str, seed: int = 0) -> CheckResult:
    fn: Callable = CHECKS[name]
    t = time.perf_counter()
    try:
        res = fn(seed)
    except Exception as e:  # noqa: BLE001 - a crash is a failed check
        res = CheckResult(name, False, {"error": f"{type(e).__name__}: {e}", "trace": traceback.format_exc(limit=3)})
    res.seconds = time.perf_counter() - t
    return res


def run_suite(seed: int = 0, jobs: int = 1, only=None) -> list:
    names = list(only) if only else list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; choose from {list(CHECKS)}")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(run_check, names, [seed] * len(names)))
    return [run_check(n, seed) for n in names]
