"""``stab-lab`` command line: every command builds a report and exits 0 iff all of its checks pass."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import Check, Report, StabLabError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    """A malformed input file; the message carries the location."""


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add_report(self, rep: Report, prefix: str = "") -> None:
        for c in rep.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.witness))

    def check(self, name: str, passed: bool, witness=None) -> None:
        self.checks.append(Check(name, bool(passed), witness))

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "checks": [c.as_dict() for c in self.checks],
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return dumps(self.as_dict())


def _clean(x):
    """JSON-safe copy: infinities become strings, tuples lists, unknown objects their ``str``."""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_clean(v) for v in x]
        return sorted(items, key=str) if isinstance(x, (set, frozenset)) else items
    if hasattr(x, "item"):  # numpy scalars
        return _clean(x.item())
    if isinstance(x, complex):
        return [x.real, x.imag]
    return str(x)


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False)


def render_text(rep: RunReport) -> str:
    lines = [f"{rep.command}: {'ok' if rep.ok else 'FAILED'}"]
    for k in sorted(rep.results):
        v = rep.results[k]
        if isinstance(v, (dict, list)):
            lines.append(f"  {k}:")
            items = v.items() if isinstance(v, dict) else enumerate(v)
            for a, b in items:
                lines.append(f"    {a}: {json.dumps(_clean(b), sort_keys=True)}")
        else:
            lines.append(f"  {k}: {v}")
    for c in rep.checks:
        mark = "PASS" if c.passed else "FAIL"
        wit = "" if c.passed or c.witness is None else f"  witness: {json.dumps(_clean(c.witness), sort_keys=True)}"
        lines.append(f"  [{mark}] {c.name}{wit}")
    return "\n".join(lines)


# input handling -----------------------------------------------------------------


def _read_json(path: str, rep: RunReport):
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as e:
        raise InputError(f"{path}: cannot read ({e.strerror})") from None
    rep.inputs[str(path)] = hashlib.sha256(raw).hexdigest()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def _model(args, rep: RunReport):
    from .model import fixture, model_from_dict

    p = Path(args.model)
    if not p.exists():
        try:
            model = fixture(p.stem)
        except FileNotFoundError:
            raise InputError(f"{args.model}: no such model file or bundled fixture") from None
        rep.inputs[str(args.model)] = f"bundled:{p.stem}"
        return model
    data = _read_json(args.model, rep)
    try:
        return model_from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"{args.model}: malformed model ({type(e).__name__}: {e})") from None


def _stability(model, path: str, rep: RunReport):
    from .stability import stability_from_dict

    data = _read_json(path, rep)
    try:
        return stability_from_dict(model, data)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, StabLabError):
            raise
        raise InputError(f"{path}: malformed stability file ({type(e).__name__}: {e})") from None


def _group(path: str, rep: RunReport):
    from .gtilde import GroupElement

    data = _read_json(path, rep)
    try:
        return GroupElement.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, StabLabError):
            raise
        raise InputError(f"{path}: malformed group element ({type(e).__name__}: {e})") from None


# commands -------------------------------------------------------------------------


def cmd_validate(args, rep: RunReport) -> None:
    from .model import validate_model
    from .stability import validity_failures

    model = _model(args, rep)
    rep.results["model"] = {"name": model.name, "lattice_rank": model.rank,
                            "indecomposables": model.base_ids, "triangles": len(model.triangles)}
    rep.add_report(validate_model(model))
    if args.stability:
        sigma = _stability(model, args.stability, rep)
        bad = validity_failures(sigma)
        rep.check("stability-function", not bad, bad or None)


def cmd_hn(args, rep: RunReport) -> None:
    from .model import parse_object
    from .stability import _hn_invariant_failures, hn_filtration

    model = _model(args, rep)
    sigma = _stability(model, args.stability, rep)
    obj = parse_object(model, args.object)
    f = hn_filtration(sigma, obj)
    rep.results.update({
        "object": str(obj),
        "factors": f.summary(),
        "phi_minus": f.phi_minus,
        "phi_plus": f.phi_plus,
        "mass": f.mass,
        "semistable": len(f) == 1,
    })
    problems = _hn_invariant_failures(sigma, f)
    rep.check("hn-invariants", not problems, problems or None)


def cmd_dist(args, rep: RunReport) -> None:
    from .metric import distance, quotient_distance_stab

    model = _model(args, rep)
    a, b = _stability(model, args.a, rep), _stability(model, args.b, rep)
    d = distance(a, b)
    rep.results["distance"] = d.value
    rep.results["witness"] = d.witness
    if args.quotient:
        q, lam = quotient_distance_stab(a, b, tol=args.tol)
        rep.results["quotient_distance"] = q.value
        rep.results["lambda"] = [lam.real, lam.imag]
        rep.check("quotient-below-distance", q.value <= d.value + 1e-12, {"quotient": q.value, "distance": d.value})


def cmd_gdist(args, rep: RunReport) -> None:
    from .gtilde import check_element, dG, hyp_distance, mobius_project, quotient_distance_G

    g, h = _group(args.a, rep), _group(args.b, rep)
    rep.add_report(check_element(g), "a:")
    rep.add_report(check_element(h), "b:")
    rep.results["dG"] = dG(g, h)
    if args.quotient:
        q, lam = quotient_distance_G(g, h, tol=args.tol)
        rep.results["quotient_distance"] = q
        rep.results["lambda"] = [lam.real, lam.imag]
    if args.project:
        zg, zh = mobius_project(g), mobius_project(h)
        rep.results["projection_a"] = [zg.real, zg.imag]
        rep.results["projection_b"] = [zh.real, zh.imag]
        rep.results["half_hyperbolic_distance"] = 0.5 * hyp_distance(zg, zh)


def cmd_limit(args, rep: RunReport) -> None:
    from .limits import SPLIT, StabilitySequence, limit_hn, limit_stability, limiting_phase
    from .stability import check_stability_axioms, stability_to_dict

    data = _read_json(args.seq, rep)
    try:
        seq = StabilitySequence.from_dict(data, base=Path(args.seq).parent)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, StabLabError):
            raise
        raise InputError(f"{args.seq}: malformed sequence file ({type(e).__name__}: {e})") from None
    tol = args.tol if args.tol is not None else 1e-6
    rep.results["samples"] = len(seq.samples)
    rep.add_report(seq.validate())
    phases = {}
    for u in seq.model.base_ids:
        t = limiting_phase(seq, u, tol)
        phases[u] = "split" if t is SPLIT else t
    rep.results["limiting_phases"] = phases
    if args.object:
        lf = limit_hn(seq, args.object, tol)
        rep.results["limit_filtration"] = lf.summary()
    if args.heart:
        sigma = limit_stability(seq, tol)
        rep.results["limit"] = stability_to_dict(sigma)
        rep.results["limit_simples"] = [str(s) for s in sigma.heart.simples]
        rep.add_report(check_stability_axioms(sigma), "limit:")


def cmd_tilt(args, rep: RunReport) -> None:
    from .tilting import check_heart, left_tilt, right_tilt, torsion_pair

    model = _model(args, rep)
    A = model.heart(args.heart)
    tp = torsion_pair(model, A, args.torsion)
    new = (left_tilt if args.dir == "left" else right_tilt)(model, A, tp)
    rep.results.update({
        "heart": A.id,
        "torsion_pair": {"torsion": tp.names()[0], "free": tp.names()[1]},
        "direction": args.dir,
        "tilted": {"label": new.id, "members": sorted(str(r) for r in new.members),
                   "simples": [str(s) for s in new.simples]},
    })
    try:
        check_heart(model, new)
        rep.check("tilted-heart-valid", True)
    except StabLabError as e:
        rep.check("tilted-heart-valid", False, str(e))


def cmd_atlas(args, rep: RunReport) -> None:
    model = _model(args, rep)
    atlas = model.atlas
    rep.results.update(atlas.to_dict())
    rep.results["window"] = [str(h) + f" {h.id}" for h in atlas.window()]
    rep.check("standard-heart-first", atlas.hearts[0].members == model.standard_heart.members)


def cmd_check_axioms(args, rep: RunReport) -> None:
    from .stability import check_stability_axioms

    model = _model(args, rep)
    sigma = _stability(model, args.stability, rep)
    rep.results["heart"] = sigma.heart.id
    rep.add_report(check_stability_axioms(sigma))


def cmd_suite(args, rep: RunReport) -> None:
    from .suite import run_suite

    only = [s.strip() for s in args.only.split(",")] if args.only else None
    results = run_suite(seed=args.seed, jobs=args.jobs, only=only)
    for r in results:
        rep.check(r.name, r.passed, None if r.passed else r.detail)
    rep.results["criteria"] = {r.name: {"passed": r.passed, "detail": r.detail} for r in results}
    if args.timings:
        rep.results["seconds"] = {r.name: round(r.seconds, 3) for r in results}


COMMANDS = {
    "validate": cmd_validate,
    "hn": cmd_hn,
    "dist": cmd_dist,
    "gdist": cmd_gdist,
    "limit": cmd_limit,
    "tilt": cmd_tilt,
    "atlas": cmd_atlas,
    "check-axioms": cmd_check_axioms,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--tol", type=float, default=None)
    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", default="models/a2.json", help="model file (bare a1/a2 use the bundled fixtures)")

    p = argparse.ArgumentParser(prog="stab-lab", description="Stability conditions on finite triangulated models.")
    p.add_argument("--version", action="version", version=f"stab-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("validate", parents=[common, model], help="check model invariants")
    s.add_argument("--stability")
    s = sub.add_parser("hn", parents=[common, model], help="Harder-Narasimhan filtration of an object")
    s.add_argument("--stability", required=True)
    s.add_argument("--object", required=True, help='e.g. "S1[1]+X"')
    s = sub.add_parser("dist", parents=[common, model], help="distance between two stability conditions")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--quotient", action="store_true", help="also the distance modulo the C-action")
    s = sub.add_parser("gdist", parents=[common], help="distance between two group elements")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--quotient", action="store_true")
    s.add_argument("--project", action="store_true", help="also the upper half-plane projections")
    s = sub.add_parser("limit", parents=[common], help="limit of a sampled Cauchy sequence")
    s.add_argument("--seq", required=True)
    s.add_argument("--object")
    s.add_argument("--heart", action="store_true", help="construct the limit stability condition")
    s = sub.add_parser("tilt", parents=[common, model], help="left or right tilt at a torsion pair")
    s.add_argument("--heart", default="H0")
    s.add_argument("--torsion", required=True, help='torsion class, e.g. "S1,X"')
    s.add_argument("--dir", choices=["left", "right"], default="left")
    sub.add_parser("atlas", parents=[common, model], help="hearts and the tilt graph")
    s = sub.add_parser("check-axioms", parents=[common, model], help="verify the four stability axioms")
    s.add_argument("--stability", required=True)
    s = sub.add_parser("suite", parents=[common], help="run the acceptance checks")
    s.add_argument("--only", help="comma-separated check names")
    s.add_argument("--timings", action="store_true", help="include run times (makes output nondeterministic)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None and args.command in ("dist", "gdist"):
        args.tol = 1e-4
    rep = RunReport(args.command)
    try:
        COMMANDS[args.command](args, rep)
    except InputError as e:
        print(f"stab-lab: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (StabLabError, KeyError, ValueError) as e:
        rep.check("completed", False, f"{type(e).__name__}: {e}")
    print(rep.to_json() if args.json else render_text(rep))
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
