"""``tsspic`` command line.

Every invocation prints one JSON document on stdout.  Exit status: 0 on
success (decision commands report their verdict as data), 1 for domain
errors such as an invalid surface, an uncataloged leaf or a failed
verification, 2 for usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import groupoids as gd
from .graphs import GraphSizeError, automorphism_group, canonical_key, isomorphic_tss, morita_equivalent
from .mcg import SurfaceType, UncatalogedSurfaceError, symplectic_surface_picard_report
from .model import (
    TssError,
    TssParseError,
    TssValidationError,
    build_graph,
    euler_characteristic,
    format_rational,
    parse_tss,
    validate,
)
from .picard import (
    DescriptionMismatch,
    compose,
    element_from_json,
    element_to_json,
    elements_equal,
    invert,
    is_static,
    picard_group,
    static_picard,
)
from .surfaces import shipped_names


class UsageError(Exception):
    pass


class DomainError(Exception):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload or {}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ------------------------------------------------------------------ input

def _read_json_arg(arg: str) -> str:
    """Inline JSON, a path, or the name of a bundled example."""
    if arg.lstrip().startswith("{"):
        return arg
    path = Path(arg)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    stem = path.name[:-5] if path.name.endswith(".json") else path.name
    if stem in shipped_names():
        from importlib import resources

        print(f"note: using bundled example {stem}.json", file=sys.stderr)
        return resources.files("tsspic").joinpath("data", f"{stem}.json").read_text(encoding="utf-8")
    raise UsageError(f"no such file: {arg}")


def _surface(arg: str):
    return parse_tss(_read_json_arg(arg))


def _element(d, arg: str):
    try:
        obj = json.loads(_read_json_arg(arg))
    except json.JSONDecodeError as exc:
        raise TssParseError(f"element JSON syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return element_from_json(d, obj)
    except KeyError as exc:
        raise DomainError(f"element refers to unknown ids: {exc.args[0]}") from None
    except DescriptionMismatch:
        raise
    except (TypeError, ValueError) as exc:
        raise TssParseError(f"malformed element: {exc}") from None


# --------------------------------------------------------------- commands

def cmd_validate(args):
    s = _surface(args.doc)
    problems = validate(s)
    out = {"valid": not problems, "violations": problems}
    if problems:
        raise DomainError("surface is invalid", out)
    return out


def cmd_invariants(args):
    s = _surface(args.doc)
    g = build_graph(s)
    aut = automorphism_group(g, args.max_vertices)
    return {
        "graph": {
            "vertices": [{"id": v.id, "genus": v.genus, "sign": v.sign, "ends": v.ends} for v in g.vertices],
            "edges": [{"id": e.id, "from": e.tail, "to": e.head, "period": format_rational(e.period)}
                      for e in g.edges],
        },
        "canonical_key": canonical_key(g, args.max_vertices),
        "euler_characteristic": euler_characteristic(s),
        "total_volume": format_rational(s.total_volume()),
        "automorphisms": {"order": aut.order, "name": aut.name()},
    }


def cmd_morita(args):
    ok, witness = morita_equivalent(_surface(args.a), _surface(args.b), args.max_vertices)
    return {"result": ok, "witness": witness.to_json() if witness else None}


def cmd_isomorphic(args):
    ok, witness = isomorphic_tss(_surface(args.a), _surface(args.b), args.strict, args.max_vertices)
    return {"result": ok, "strict": args.strict, "witness": witness.to_json() if witness else None}


def cmd_picard(args):
    return picard_group(_surface(args.doc), args.max_vertices).to_json()


def cmd_statpic(args):
    return static_picard(_surface(args.doc)).to_json()


def cmd_compose(args):
    d = picard_group(_surface(args.doc), args.max_vertices)
    c = compose(d, _element(d, args.a), _element(d, args.b))
    return {"element": element_to_json(d, c), "static": is_static(d, c)}


def cmd_invert(args):
    d = picard_group(_surface(args.doc), args.max_vertices)
    a = invert(d, _element(d, args.a))
    return {"element": element_to_json(d, a), "static": is_static(d, a)}


def cmd_equal(args):
    d = picard_group(_surface(args.doc), args.max_vertices)
    v = elements_equal(d, _element(d, args.a), _element(d, args.b))
    return {"result": v.to_json(), "verdict": v.kind, "reason": v.reason}


def cmd_verify_groupoid(args):
    try:
        model = gd.get_model(args.model)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    kw = {"n_samples": args.samples, "seed": args.seed}
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if args.control in ("drop_q", "wrong_q"):
        model = gd.perturbed(model, args.control)
    reports = [
        gd.verify_groupoid_axioms(model, tol=args.tol, **kw),
        gd.verify_symplectic_compatibility(model, tol=args.tol, fd_tol=args.fd_tol, **kw),
    ]
    if model is gd.AFFINE_PLANE or args.control == "h_q":
        reports.append(gd.verify_modular_lift(model, tol=args.tol, use_q=args.control == "h_q", **kw))
    if model is gd.CYLINDER_ONE:
        reports.append(gd.verify_isotropy(model, tol=args.tol, **kw))
    if model is gd.CYLINDER_TWO:
        reports.append(gd.verify_alpha_group_law(args.samples, tol=args.tol, seed=args.seed))
    checks, constants = [], {}
    for r in reports:
        checks.extend(c.to_json() for c in r.checks)
        constants.update(r.constants)
    out = {"model": model.name, "checks": checks, "pass": all(c["pass"] for c in checks),
           "constants": constants, "seed": args.seed}
    if not out["pass"]:
        raise DomainError("verification failed", out)
    return out


def cmd_report_symplectic(args):
    return symplectic_surface_picard_report(SurfaceType(args.genus, 0, args.boundary))


# ------------------------------------------------------------------ parser

def _summary(cmd: str, out: dict) -> str | None:
    if cmd == "picard" or cmd == "statpic":
        return out.get("pretty")
    if cmd == "report-symplectic":
        return out["pic"].get("pretty")
    if "result" in out:
        return f"{cmd}: {out['result']}"
    if "pass" in out:
        return f"{out['model']}: {'all checks pass' if out['pass'] else 'FAILED'}"
    return None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON and add a human-readable 'text' field")
    common.add_argument("--max-vertices", type=int, default=12, help="size guard for graph searches")

    p = _Parser(prog="tsspic", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, helptext, *docs):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        for d in docs:
            sp.add_argument(d, help="file path, inline JSON, or bundled example name")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "check structural invariants", "doc")
    add("invariants", cmd_invariants, "labeled graph and its invariants", "doc")
    add("morita", cmd_morita, "decide Morita equivalence", "a", "b")
    add("isomorphic", cmd_isomorphic, "decide isomorphism", "a", "b").add_argument(
        "--strict", action="store_true", help="match volumes leaf by leaf, not just in total")
    add("picard", cmd_picard, "Picard group description", "doc")
    add("statpic", cmd_statpic, "static Picard group", "doc")
    add("compose", cmd_compose, "product of two Picard elements", "doc", "a", "b")
    add("invert", cmd_invert, "inverse of a Picard element", "doc", "a")
    add("equal", cmd_equal, "compare two Picard elements", "doc", "a", "b")

    vg = sub.add_parser("verify-groupoid", parents=[common], help="numerical checks of an explicit groupoid model")
    vg.add_argument("model", help="affine | cyl1 | cyl2")
    vg.add_argument("--samples", type=int, default=gd.DEFAULT_SAMPLES)
    vg.add_argument("--tol", type=float, default=gd.DEFAULT_TOL)
    vg.add_argument("--fd-tol", type=float, default=1e-6, help="tolerance of the finite-difference dOmega check")
    vg.add_argument("--seed", type=int, default=0)
    vg.add_argument("--control", choices=["drop_q", "wrong_q", "h_q"],
                    help="run a deliberately broken variant (expected to fail)")
    vg.set_defaults(fn=cmd_verify_groupoid)

    rs = sub.add_parser("report-symplectic", parents=[common], help="Picard group of a symplectic surface")
    rs.add_argument("--genus", type=int, required=True)
    rs.add_argument("--boundary", type=int, default=0, help="number of ends")
    rs.set_defaults(fn=cmd_report_symplectic)
    return p


def _emit(obj, pretty: bool) -> None:
    print(json.dumps(obj, indent=2 if pretty else None, ensure_ascii=False))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    pretty = "--pretty" in argv
    try:
        args = build_parser().parse_args(argv)
        out = args.fn(args)
        code = 0
    except UsageError as exc:
        out, code = {"error": str(exc), "kind": "usage"}, 2
    except TssParseError as exc:
        out, code = {"error": str(exc), "kind": "parse"}, 2
    except TssValidationError as exc:
        out, code = {"error": "surface is invalid", "kind": "validation", "violations": exc.violations}, 1
    except DomainError as exc:
        out, code = {"error": str(exc), "kind": "domain", **exc.payload}, 1
    except (UncatalogedSurfaceError, DescriptionMismatch, GraphSizeError, gd.ChartError, TssError) as exc:
        out, code = {"error": str(exc), "kind": type(exc).__name__}, 1
    except ValueError as exc:
        out, code = {"error": str(exc), "kind": "usage"}, 2
    if code:
        print(out["error"], file=sys.stderr)
    elif pretty:
        text = _summary(args.command, out)
        if text is not None:
            out = {**out, "text": text}
    _emit(out, pretty)
    return code


if __name__ == "__main__":
    sys.exit(main())
