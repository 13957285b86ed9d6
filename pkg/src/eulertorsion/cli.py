"""Command line front end.

Exit codes: 0 success / PASS, 1 verification FAIL, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys


from . import builtins, document
from .detline import torsion_acyclic
from .errors import InputError, TorsionError
from .holomorphy import annulus_grid, evaluate_on_grid, parse_grid, ratio_function
from .metrics import kt_integral_chain, milnor_norm
from .report import canonical_dumps, digest, summarize
from .suites import SUITES, run_suite
from .turaev import farber_turaev
from .twisted import Representation, twisted_data


def _load(args) -> document.TwistedComplexDocument:
    if args.input and args.example:
        raise InputError("use either --input or --example", None)
    if args.input:
        return document.load(args.input)
    name = args.example or "S1"
    try:
        return builtins.builtin(name)
    except KeyError:
        raise InputError(f"unknown built-in {name!r}", None) from None


def _inline_generator(item):
    if isinstance(item, (int, float)):
        return [[complex(item)]]
    if isinstance(item, list) and len(item) == 2 and all(isinstance(x, (int, float)) for x in item):
        return [[complex(*item)]]
    return document.parse_matrix(item)


def parse_rep(spec: str | None, doc: document.TwistedComplexDocument) -> Representation:
    """A named representation, ``trivial``, or inline JSON with one entry per generator."""
    P = doc.presentation
    if spec is None or spec == "trivial":
        return Representation.trivial(P.ngens)
    if spec in doc.representations:
        return doc.representations[spec]
    try:
        items = json.loads(spec)
    except json.JSONDecodeError:
        raise InputError(f"--rep {spec!r} is neither a known name nor inline JSON", None) from None
    if not isinstance(items, list):
        items = [items]
    try:
        alpha = Representation([_inline_generator(x) for x in items])
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad inline representation: {exc}", None) from exc
    alpha.validate(P)
    return alpha


def _header(command: str, doc, extra: dict) -> dict:
    return {"command": command, "input": doc.name,
            "inputs_digest": digest({"document": doc.to_json(), **extra}), **extra}


def cmd_torsion(args) -> tuple[dict, int]:
    doc = _load(args)
    P = doc.presentation
    alpha = parse_rep(args.rep, doc)
    eps = doc.spider(args.spider)
    H = doc.metric(args.metric, alpha.rank)
    data = twisted_data(P, alpha)
    rho = farber_turaev(P, alpha, eps, H, data=data)
    out = _header("torsion", doc, {"rep": args.rep or "trivial", "spider": args.spider or "straight",
                                   "metric": args.metric or "flat"})
    out.update({
        "rank": alpha.rank,
        "euler_characteristic": P.euler_characteristic,
        "cohomology_ranks": list(data.basis.ranks),
        "acyclic": data.basis.is_acyclic,
        "frame": data.sigma.basis_tag,
        "sigma": data.sigma.coordinate,
        "farber_turaev": rho.coordinate,
        "milnor_norm": milnor_norm(rho, P, alpha, H, data),
        "kt_chain_integral": kt_integral_chain(eps, alpha, H),
    })
    if data.basis.is_acyclic:
        out["torsion"] = torsion_acyclic(data.complex)
    return out, 0


def cmd_verify(args) -> tuple[dict, int]:
    doc = _load(args)
    kw = {}
    if args.suite == "holomorphy":
        kw = {"family": args.family, "step": args.step, "spider": args.spider, "control": args.control,
              "grid": parse_grid(args.grid) if args.grid else None}
    checks = run_suite(args.suite, doc, args.samples, args.seed, args.rank, args.tol, **kw)
    flags = {"suite": args.suite, "seed": args.seed, "samples": args.samples, "rank": args.rank,
             "tol": args.tol, **{k: v for k, v in kw.items() if k != "grid"}, "grid": args.grid}
    out = _header("verify", doc, flags)
    out["checks"] = [c.to_json() for c in checks]
    out["summary"] = summarize(checks)
    return out, 0 if out["summary"]["verdict"] == "PASS" else 1


def cmd_sweep(args) -> tuple[dict, int]:
    doc = _load(args)
    fam = doc.family(args.family or next(iter(doc.families), ""))
    grid = parse_grid(args.grid) if args.grid else annulus_grid(0.5, 2.0, 21)
    f = ratio_function(doc.presentation, fam, doc.spider(args.spider), args.kind)
    values = evaluate_on_grid(f, grid) if fam.variables == 1 else None
    if values is None:
        raise InputError("sweep supports one-variable families", "/families")
    out = _header("sweep", doc, {"family": fam.name, "grid": grid.description, "kind": args.kind,
                                 "spider": args.spider or "straight"})
    out["values"] = [{"z": complex(grid.points[ix][0]), "value": complex(values[ix])}
                     for ix in grid.included()]
    return out, 0


def cmd_examples(args) -> tuple[dict, int]:
    if args.export:
        try:
            return builtins.builtin(args.export).to_json(), 0
        except KeyError:
            raise InputError(f"unknown built-in {args.export!r}", None) from None
    return {"command": "examples", "filter": args.filter, "examples": builtins.listing(args.filter)}, 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eulertorsion", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, reps=True):
        p.add_argument("--input", help="TwistedComplex JSON document")
        p.add_argument("--example", help="built-in presentation name (default S1)")
        p.add_argument("--spider", help="named spider (default: straight)")
        if reps:
            p.add_argument("--rep", help="named representation, 'trivial', or inline JSON per generator")
            p.add_argument("--metric", help="named metric (default: flat)")
        out = p.add_mutually_exclusive_group()
        out.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
        out.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
        p.set_defaults(pretty=False)

    p = sub.add_parser("torsion", help="sigma and Farber-Turaev coordinates, ranks, torsion")
    common(p)
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("verify", help="run a verification suite")
    common(p, reps=False)
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--tol", type=float)
    p.add_argument("--family")
    p.add_argument("--grid", help="annulus:RMIN:RMAX:N[:EXCL] or box:X0:X1:Y0:Y1:N")
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--control", choices=("none", "conj"), default="none",
                   help="conj: replace the ratio by its conjugate (must FAIL)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="evaluate a ratio function on a chart grid")
    common(p, reps=False)
    p.add_argument("--family")
    p.add_argument("--grid")
    p.add_argument("--kind", choices=("ratio", "torsion", "sigma"), default="ratio")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("examples", help="list built-in presentations")
    p.add_argument("--filter", default="")
    p.add_argument("--export", metavar="NAME", help="print the built-in as a JSON document")
    out = p.add_mutually_exclusive_group()
    out.add_argument("--json", dest="pretty", action="store_false")
    out.add_argument("--pretty", dest="pretty", action="store_true")
    p.set_defaults(func=cmd_examples, pretty=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except InputError as exc:
        print(canonical_dumps({"error": str(exc), "pointer": exc.pointer}), file=sys.stderr)
        return 2
    except TorsionError as exc:
        print(canonical_dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 2
    print(canonical_dumps(report, args.pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
