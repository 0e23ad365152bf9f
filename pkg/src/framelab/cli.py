"""Batch command-line interface; every command emits a versioned JSON report."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .calculus.parser import parse_term
from .calculus.signatures import get_signature
from .calculus.terms import alpha_equal, pretty
from .errors import BudgetExceeded, FramelabError, SynthesisError
from .frames import Family, build_layer, default_budget, parse_family
from .simpletypes import BOOL, parse_type, types_up_to

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

# relation used for each frame arrow when --sig is not given
DEFAULT_SIGS = {("C", "S"): "lambdaS", ("E", "S"): "lambdaS", ("L", "C"): "lambdaC"}


class UsageError(Exception):
    pass


def surface(term, signature) -> str:
    """Pretty-print a term after checking it parses back to itself."""
    text = pretty(term)
    again = parse_term(text, signature)
    if not alpha_equal(again, term):
        raise FramelabError(f"printed term does not round-trip: {text}")
    return text


def _types(args):
    if getattr(args, "type", None):
        return [parse_type(t) for t in args.type]
    return types_up_to(args.max_order, args.max_arrows)


def _one_type(args):
    if not args.type:
        raise UsageError("--type is required")
    if len(args.type) > 1:
        raise UsageError("exactly one --type is expected")
    return parse_type(args.type[0])


def _family(args, name="family"):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name} is required")
    return parse_family(value)


# commands ------------------------------------------------------------------------


def cmd_frame(args):
    fam, ty = _family(args), _one_type(args)
    layer = build_layer(fam, ty, args.budget)
    report = {"kind": "frame", "family": fam.value, "type": str(ty), "size": layer.size}
    if args.action == "enumerate":
        report["elements"] = [layer.literal(i) for i in range(layer.size)]
        report["text"] = [layer.text(i) for i in range(layer.size)]
    return report, EXIT_OK


def _guess_signature(text, sig):
    if sig:
        return get_signature(sig)
    for name in ("lambdaS", "lambdaC"):
        try:
            parse_term(text, name)
            return get_signature(name)
        except FramelabError:
            continue
    return get_signature("lambdaC")


def cmd_interp(args):
    from .semantics import interpret

    if not args.term:
        raise UsageError("--term is required")
    fam = _family(args)
    sig = _guess_signature(args.term, args.sig)
    term = parse_term(args.term, sig)
    el = interpret(term, fam, signature=sig, budget=args.budget)
    layer = build_layer(fam, term.type, args.budget)
    return {
        "kind": "interpretation",
        "family": fam.value,
        "signature": sig.name,
        "term": surface(term, sig),
        "type": str(term.type),
        "index": el.index,
        "element": el.literal(),
        "text": layer.text(el.index),
    }, EXIT_OK


def cmd_synth(args):
    from .definability import saturate_definables, synthesize_S

    fam, ty = _family(args), _one_type(args)
    if args.element is None:
        raise UsageError("--element is required")
    layer = build_layer(fam, ty, args.budget)
    el = layer.element(layer.parse_literal(args.element))
    report = {"kind": "synthesis", "family": fam.value, "type": str(ty), "element": el.literal(), "text": layer.text(el.index)}
    if fam is Family.S and args.sig in (None, "lambdaS"):
        res = synthesize_S(el, args.budget)
        report.update({"signature": "lambdaS", "term": surface(res.term, "lambdaS"), "verified": res.verified, "definable": True})
        return report, EXIT_OK
    sig = get_signature(args.sig or ("lambdaS" if fam is Family.S else "lambdaC"))
    found = saturate_definables(sig, fam, ty, depth=args.depth, budget=args.budget)[ty]
    report["signature"] = sig.name
    report["search"] = {"exact": found.exact, "definable": len(found.elements), "layer_size": found.layer_size}
    if el.index in found.witnesses:
        report.update({"term": surface(found.witnesses[el.index], sig), "verified": True, "definable": True})
        return report, EXIT_OK
    report["definable"] = False if found.exact else None
    return report, EXIT_FAILED


def cmd_totality(args):
    from .definability import totality_class, totality_classes

    ty = _one_type(args)
    if args.element is not None:
        layer = build_layer(Family.S, ty, args.budget)
        cls = totality_class(layer.element(layer.parse_literal(args.element)), args.budget)
        report = {"kind": "totality-class", "type": str(ty)}
        report.update(cls.to_dict())
        ok = cls.lattice is None or cls.lattice.is_lattice
        return report, EXIT_OK if ok else EXIT_FAILED
    rep = totality_classes(ty, args.budget)
    report = {"kind": "totality"}
    report.update(rep.to_dict())
    ok = all(c["is_lattice"] for c in report["classes"])
    return report, EXIT_OK if ok else EXIT_FAILED


def cmd_theory(args):
    from .theory import compare_theories

    if not args.sig:
        raise UsageError("--sig is required")
    types = [parse_type(t) for t in args.type] if args.type else [parse_type("bool -> bool")]
    rep = compare_theories(args.sig, _family(args, "source"), _family(args, "target"), args.depth, types)
    for w in rep.violations + rep.witnesses:
        surface(w.left, args.sig), surface(w.right, args.sig)
    return rep.to_dict(), EXIT_OK if rep.inclusion_holds else EXIT_FAILED


def cmd_delta(args):
    from .calculus.reduction import critical_pairs
    from .semantics import sound_interpretations, validate_delta_soundness

    if not args.sig:
        raise UsageError("--sig is required")
    sig, fam = get_signature(args.sig), _family(args)
    rep = validate_delta_soundness(sig, fam, budget=args.budget)
    report = {"kind": "delta-soundness"}
    report.update(rep.to_dict())
    heads = sorted({r.head for r in sig.rules})
    report["sound_interpretations"] = {}
    for name in heads:
        found = sound_interpretations(name, sig, fam, budget=args.budget, limit=0)
        report["sound_interpretations"][name] = {"count": found.count, "canonical_sound": found.canonical_sound}
    report["critical_pairs"] = [
        {"rules": list(c.rules), "overlap": pretty(c.overlap), "left": pretty(c.left), "right": pretty(c.right),
         "joinable": c.joinable}
        for c in critical_pairs(sig)
    ]
    return report, EXIT_OK if rep.passed else EXIT_FAILED


def _relation(source, target, sig, types, args):
    from .relations import frame_relation, term_induced_relation

    if sig is None or DEFAULT_SIGS.get((source.value, target.value)) == get_signature(sig).name:
        return frame_relation(source, target, types, args.budget)
    rel = None
    for ty in types:
        rel = term_induced_relation(sig, source, target, ty, "auto", args.budget, relation=rel)
    return rel


def cmd_collapse(args):
    from .relations import certify_collapse, compose_chain

    types = _types(args)
    if args.action == "certify":
        source, target = _family(args, "source"), _family(args, "target")
        rel = _relation(source, target, args.sig, types, args)
    else:
        if not args.chain:
            raise UsageError("--chain is required, e.g. L,C,S")
        fams = [parse_family(x) for x in args.chain.split(",")]
        if len(fams) < 2:
            raise UsageError("--chain needs at least two frames")
        links = [_relation(a, b, None, types, args) for a, b in zip(fams, fams[1:])]
        rel = compose_chain(links)
        source, target = fams[0], fams[-1]
    cert = certify_collapse(source, target, rel, types)
    report = cert.to_dict()
    if args.action == "compose":
        report["chain"] = [f.value for f in fams]
    return report, EXIT_OK if cert.certified else EXIT_FAILED


def cmd_iso(args):
    from .relations import E_BOOL, certify_iso

    cert = certify_iso(E_BOOL, Family.C, Family.E, _types(args), args.budget)
    return cert.to_dict(), EXIT_OK if cert.certified else EXIT_FAILED


# plumbing --------------------------------------------------------------------------


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family")
    common.add_argument("--type", action="append", help="type expression; repeatable where several are accepted")
    common.add_argument("--sig", help="signature: lambda, lambdaS or lambdaC")
    common.add_argument("--term")
    common.add_argument("--element", help="element literal: name, #index or JSON table")
    common.add_argument("--source")
    common.add_argument("--target")
    common.add_argument("--max-order", type=_positive, default=2)
    common.add_argument("--max-arrows", type=_positive, default=2)
    common.add_argument("--depth", type=_positive, default=5)
    common.add_argument("--budget", type=_positive, help="layer size bound (default: FRAMELAB_BUDGET or 10^6)")
    common.add_argument("--threads", type=_positive, default=1, help="worker cap (all work is single-threaded)")
    common.add_argument("--out", help="write the report here instead of standard output")
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="framelab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frame", parents=[common], help="list or count a frame layer")
    p.add_argument("action", choices=("enumerate", "count"))
    p.set_defaults(func=cmd_frame)
    p = sub.add_parser("interp", parents=[common], help="denotation of a closed term")
    p.set_defaults(func=cmd_interp)
    p = sub.add_parser("synth", parents=[common], help="find a term denoting an element")
    p.set_defaults(func=cmd_synth)
    p = sub.add_parser("totality", parents=[common], help="totality classes of C over S")
    p.set_defaults(func=cmd_totality)
    p = sub.add_parser("theory", parents=[common], help="compare equational theories")
    p.add_argument("action", choices=("compare",))
    p.set_defaults(func=cmd_theory)
    p = sub.add_parser("delta", parents=[common], help="soundness of constants for the rewrite rules")
    p.add_argument("action", choices=("check",))
    p.set_defaults(func=cmd_delta)
    p = sub.add_parser("collapse", parents=[common], help="extensional collapse certificates")
    p.add_argument("action", choices=("certify", "compose"))
    p.add_argument("--chain", help="comma-separated frames, e.g. L,C,S")
    p.set_defaults(func=cmd_collapse)
    p = sub.add_parser("iso", parents=[common], help="C/E isomorphism certificate")
    p.add_argument("action", choices=("certify",))
    p.set_defaults(func=cmd_iso)
    return parser


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _text(obj, indent=0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, default=_jsonable)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict):
                lines.append(f"{pad}-")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}- {json.dumps(v, default=_jsonable) if not isinstance(v, str) else v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def render(report: dict, fmt: str) -> str:
    if fmt == "text":
        return "\n".join(_text(report)) + "\n"
    return json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.budget is None:
            args.budget = default_budget()
        report, code = args.func(args)
    except BudgetExceeded as exc:
        print(f"framelab: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SynthesisError as exc:
        print(f"framelab: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, FramelabError, ValueError) as exc:
        print(f"framelab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report.setdefault("schema", 1)
    report["config"] = {"command": args.command, "budget": args.budget, "threads": args.threads}
    out = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
