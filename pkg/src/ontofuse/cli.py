"""Command-line interface.

Exit codes: 0 success (and affirmative logical answers), 1 negative
logical answer (not entailed, condition violated, diagram invalid),
2 parse error, 3 semantic error, 4 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .errors import OntofuseError, ParseError, ResourceLimitError, SemanticError
from .fca import (
    classification_of,
    concept_lattice,
    lattice_dot,
    read_context,
)
from .files import (
    format_model,
    format_sentence,
    format_theory,
    load_diagram,
    load_document,
    parse_sentence,
)
from .fusion import fuse, validate_diagram
from .institution import Bounds
from .theories import closure_in_universe, counterexample

CONFIG_KEYS = ("max-atoms", "max-carrier", "universe-depth")


def build_bounds(args) -> Bounds:
    values = {}
    if args.config:
        with open(args.config, "rb") as handle:
            data = tomllib.load(handle)
        for key in data:
            if key not in CONFIG_KEYS:
                raise SemanticError(f"unknown config key {key!r}")
        values.update(data)
    if args.max_atoms is not None:
        values["max-atoms"] = args.max_atoms
    if args.max_carrier is not None:
        values["max-carrier"] = args.max_carrier
    if args.universe_depth is not None:
        values["universe-depth"] = args.universe_depth
    fields = {"max-atoms": "max_prop_atoms", "max-carrier": "max_carrier", "universe-depth": "universe_depth"}
    return replace(
        Bounds(), **{fields[k]: int(v) for k, v in values.items()}
    )


def _sole(mapping: dict, what: str, path: str):
    if len(mapping) != 1:
        raise SemanticError(f"{path!r} must define exactly one {what}")
    return next(iter(mapping.items()))


def cmd_check(args) -> int:
    bounds = build_bounds(args)
    diagram, _ = load_diagram(args.diagram)
    report = validate_diagram(diagram, bounds)
    if report.ok:
        print(f"ok: {len(diagram.shape.nodes)} nodes, {len(diagram.shape.edges)} edges")
        return 0
    for issue in report.issues:
        print(str(issue))
    return 1


def cmd_entails(args) -> int:
    bounds = build_bounds(args)
    doc = load_document(args.theory)
    name, theory = _sole(doc.theories, "theory", args.theory)
    sentence = parse_sentence(
        doc.institution,
        args.sentence,
        theory.sig,
        doc.theory_vars[name],
        "<sentence>",
    )
    witness = counterexample(theory, sentence, bounds)
    if witness is None:
        print("entailed")
        return 0
    print("not entailed")
    print("countermodel: " + format_model(witness))
    return 1


def cmd_close(args) -> int:
    bounds = build_bounds(args)
    doc = load_document(args.theory)
    name, theory = _sole(doc.theories, "theory", args.theory)
    ins = theory.sig.institution
    extra = tuple(sorted(theory.axioms, key=repr))
    universe = ins.universe(theory.sig, bounds.universe_depth, extra=extra, bounds=bounds)
    closure = closure_in_universe(theory, universe, bounds)
    for text in sorted(format_sentence(ins, s) for s in closure):
        print(text)
    return 0


def cmd_satcond(args) -> int:
    bounds = build_bounds(args)
    doc = load_document(args.morphism)
    name, morphism = _sole(doc.morphisms, "signature morphism", args.morphism)
    ins = morphism.source.institution
    report = ins.check_satisfaction_condition(morphism, bounds=bounds)
    if report.ok:
        print(f"satisfaction condition holds: 0 violations ({report.checked} checks)")
        return 0
    print(f"satisfaction condition fails: {len(report.violations)} violations")
    for model, sentence in report.violations[:10]:
        print(f"  model {format_model(model)} sentence {format_sentence(ins, sentence)}")
    return 1


def cmd_merge(args) -> int:
    bounds = build_bounds(args)
    diagram, source = load_diagram(args.diagram)
    report = validate_diagram(diagram, bounds)
    if not report.ok:
        raise SemanticError(
            "invalid alignment diagram: " + "; ".join(str(i) for i in report.issues)
        )
    result = fuse(diagram, bounds, apex_name=source.name)
    ins = result.theory.sig.institution
    os.makedirs(args.outdir, exist_ok=True)
    name = source.name

    with open(os.path.join(args.outdir, f"{name}.thy"), "w", encoding="utf-8") as out:
        out.write(format_theory(result.theory, name))

    lines = []
    for node in sorted(result.signature_cocone.legs):
        leg = result.signature_cocone.legs[node]
        for sym, image in leg.mapping:
            lines.append(f"{node}: {sym} -> {image}")
    with open(os.path.join(args.outdir, f"{name}.cocone"), "w", encoding="utf-8") as out:
        out.write("\n".join(lines) + "\n")

    lines = []
    for fused_axiom, origins in result.provenance:
        for node, axiom in origins:
            lines.append(
                f"{format_sentence(ins, fused_axiom)} <- {node}: {format_sentence(ins, axiom)}"
            )
    with open(os.path.join(args.outdir, f"{name}.provenance"), "w", encoding="utf-8") as out:
        out.write("\n".join(lines) + "\n")

    print(
        f"fused {len(diagram.shape.nodes)} theories into {name!r}: "
        f"{len(result.theory.sig.symbol_names())} symbols, "
        f"{len(result.theory.axioms)} axioms"
    )
    return 0


def cmd_lattice(args) -> int:
    bounds = build_bounds(args)
    doc = load_document(args.theory)
    name, theory = _sole(doc.theories, "theory", args.theory)
    ins = theory.sig.institution
    universe = ins.universe(theory.sig, bounds.universe_depth, bounds=bounds)
    classification = classification_of(theory.sig, universe, bounds)
    lattice = concept_lattice(classification, bounds)
    if args.dot:
        print(lattice_dot(lattice, lambda s: format_sentence(ins, s)), end="")
        return 0
    print(f"models: {len(classification.instances)}")
    print(f"sentences: {len(classification.types)}")
    print(f"concepts: {len(lattice.concepts)}")
    return 0


def cmd_fca(args) -> int:
    bounds = build_bounds(args)
    with open(args.context, encoding="utf-8") as handle:
        classification = read_context(handle.read())
    lattice = concept_lattice(classification, bounds)
    if args.dot:
        print(lattice_dot(lattice), end="")
        return 0
    print(f"concepts: {len(lattice.concepts)}")
    for concept in lattice.concepts:
        extent = " ".join(sorted(concept.extent)) or "-"
        intent = " ".join(sorted(concept.intent)) or "-"
        print(f"extent {{{extent}}} intent {{{intent}}}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontofuse",
        description="Merge aligned ontologies by signature colimits and "
        "verify the logic by exhaustive model enumeration.",
    )
    parser.add_argument("--config", help="TOML file with bound settings")
    parser.add_argument("--max-atoms", type=int, help="propositional atom limit")
    parser.add_argument("--max-carrier", type=int, help="largest algebra carrier")
    parser.add_argument("--universe-depth", type=int, help="sentence universe depth")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate an alignment diagram")
    p.add_argument("diagram")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("entails", help="does a theory entail a sentence")
    p.add_argument("theory")
    p.add_argument("sentence")
    p.set_defaults(func=cmd_entails)

    p = sub.add_parser("close", help="closure of a theory in its default universe")
    p.add_argument("theory")
    p.set_defaults(func=cmd_close)

    p = sub.add_parser("satcond", help="check truth-invariance of a morphism")
    p.add_argument("morphism")
    p.set_defaults(func=cmd_satcond)

    p = sub.add_parser("merge", help="fuse an alignment diagram")
    p.add_argument("diagram")
    p.add_argument("-o", "--outdir", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("lattice", help="concept lattice of a theory's models")
    p.add_argument("theory")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("fca", help="concept lattice of a CSV cross-table")
    p.add_argument("context")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_fca)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 4
    except SemanticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OntofuseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
