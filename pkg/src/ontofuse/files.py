"""Line-oriented text format for signatures, theories, morphisms and
alignment diagrams, plus canonical printers.

A document is a sequence of blocks.  Block headers:

    institution prop|eq
    signature NAME
    theory NAME over SIGNAME
    morphism NAME : SRC -> TGT
    diagram NAME

Body lines (belonging to the preceding header):

    symbols a b c          (prop signature)
    op name : arity        (eq signature)
    var x y                (eq theory)
    axiom (<s-expression>) (theory)
    map a -> b             (morphism)
    node id = path         (diagram; path relative to the document)
    edge id : n1 -> n2 = path

Full-line comments start with '#'.  Diagram node files must define
exactly one theory and edge files exactly one signature morphism; node
and edge files may share signatures by repeating equal definitions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .eq import EqSignature, Equation, FiniteAlgebra, validate_equation
from .errors import ParseError, SemanticError
from .fusion import ShapeGraph, TheoryDiagram
from .institution import Institution, Signature, SignatureMorphism, by_name
from .prop import Assignment, PropSignature, validate_formula
from .sexpr import SAtom, SList, Span, parse as parse_sexpr
from .theories import Theory, TheoryMorphism


@dataclass(frozen=True)
class DiagramSource:
    """A diagram block plus the file paths its parts were loaded from."""

    name: str
    nodes: tuple[tuple[str, str], ...]  # (node id, path)
    edges: tuple[tuple[str, str, str, str], ...]  # (edge id, src, tgt, path)


@dataclass
class Document:
    path: str
    institution: Institution | None = None
    signatures: dict[str, Signature] = field(default_factory=dict)
    theories: dict[str, Theory] = field(default_factory=dict)
    theory_vars: dict[str, tuple[str, ...]] = field(default_factory=dict)
    morphisms: dict[str, SignatureMorphism] = field(default_factory=dict)
    diagrams: dict[str, DiagramSource] = field(default_factory=dict)


def _line_span(file: str, lineno: int, line: str) -> Span:
    return Span(file, lineno, 1, lineno, len(line) + 1)


# ----------------------------------------------------------------------
# sentence and term readers


def sexpr_to_formula(node):
    """Propositional formula from a parsed s-expression."""
    if isinstance(node, SAtom):
        return node.value
    if not node.items or not isinstance(node.items[0], SAtom):
        raise ParseError("formula list must start with a connective", node.span)
    op = node.items[0].value
    args = tuple(sexpr_to_formula(sub) for sub in node.items[1:])
    if op == "not" and len(args) != 1:
        raise ParseError("'not' takes exactly one argument", node.span)
    if op in ("and", "or", "implies", "iff") and len(args) != 2:
        raise ParseError(f"'{op}' takes exactly two arguments", node.span)
    if op not in ("not", "and", "or", "implies", "iff"):
        raise ParseError(f"unknown connective {op!r}", node.span)
    return (op,) + args


def sexpr_to_term(node, sig: EqSignature):
    """Term from a parsed s-expression: bare operation names are
    constants, other bare names are variables."""
    if isinstance(node, SAtom):
        name = node.value
        if name in sig.arity:
            if sig.arity[name] != 0:
                raise ParseError(
                    f"operation {name!r} has arity {sig.arity[name]}, "
                    "bare use needs arity 0",
                    node.span,
                )
            return (name,)
        return name
    if not node.items or not isinstance(node.items[0], SAtom):
        raise ParseError("term list must start with an operation name", node.span)
    return (node.items[0].value,) + tuple(
        sexpr_to_term(sub, sig) for sub in node.items[1:]
    )


def sexpr_to_equation(node, sig: EqSignature, variables) -> Equation:
    if (
        not isinstance(node, SList)
        or len(node.items) != 3
        or not isinstance(node.items[0], SAtom)
        or node.items[0].value != "="
    ):
        raise ParseError("equation must have the shape (= lhs rhs)", getattr(node, "span", None))
    return Equation(
        tuple(variables),
        sexpr_to_term(node.items[1], sig),
        sexpr_to_term(node.items[2], sig),
    )


def parse_sentence(institution: Institution, text: str, sig, variables=(), file="<string>"):
    """One sentence from source text, validated against the signature."""
    node = parse_sexpr(text, file)
    if institution.name == "prop":
        formula = sexpr_to_formula(node)
        try:
            validate_formula(sig, formula)
        except SemanticError as exc:
            raise SemanticError(str(exc), getattr(node, "span", None)) from None
        return formula
    if institution.name == "eq":
        eq = sexpr_to_equation(node, sig, variables)
        try:
            validate_equation(sig, eq)
        except SemanticError as exc:
            raise SemanticError(str(exc), getattr(node, "span", None)) from None
        return eq
    raise SemanticError(f"no sentence reader for institution {institution.name!r}")


# ----------------------------------------------------------------------
# document parser


class _Parser:
    def __init__(self, text: str, file: str):
        self.doc = Document(path=file)
        self.file = file
        self.block: dict | None = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            self.line = line
            self.span = _line_span(file, lineno, raw)
            self.dispatch(line)
        self.finish_block()

    def error(self, message: str):
        raise ParseError(message, self.span)

    def need_institution(self) -> Institution:
        if self.doc.institution is None:
            self.error("an 'institution' line must come first")
        return self.doc.institution

    def dispatch(self, line: str):
        words = line.split()
        kw = words[0]
        handler = getattr(self, f"kw_{kw}", None)
        if handler is None:
            self.error(f"unknown keyword {kw!r}")
        handler(words, line)

    # ---- headers

    def kw_institution(self, words, line):
        if len(words) != 2:
            self.error("usage: institution NAME")
        if self.doc.institution is not None:
            self.error("duplicate 'institution' line")
        try:
            self.doc.institution = by_name(words[1])
        except SemanticError as exc:
            raise SemanticError(str(exc), self.span) from None

    def new_block(self, block: dict):
        self.finish_block()
        self.block = block

    def kw_signature(self, words, line):
        if len(words) != 2:
            self.error("usage: signature NAME")
        self.need_institution()
        self.new_block({"kind": "signature", "name": words[1], "symbols": [], "span": self.span})

    def kw_theory(self, words, line):
        if len(words) != 4 or words[2] != "over":
            self.error("usage: theory NAME over SIGNATURE")
        self.need_institution()
        self.finish_block()
        if words[3] not in self.doc.signatures:
            raise SemanticError(f"unknown signature {words[3]!r}", self.span)
        self.new_block(
            {
                "kind": "theory",
                "name": words[1],
                "sig": self.doc.signatures[words[3]],
                "vars": [],
                "axioms": [],
                "span": self.span,
            }
        )

    def kw_morphism(self, words, line):
        if len(words) != 6 or words[2] != ":" or words[4] != "->":
            self.error("usage: morphism NAME : SRC -> TGT")
        self.need_institution()
        self.finish_block()
        for sig_name in (words[3], words[5]):
            if sig_name not in self.doc.signatures:
                raise SemanticError(f"unknown signature {sig_name!r}", self.span)
        self.new_block(
            {
                "kind": "morphism",
                "name": words[1],
                "source": self.doc.signatures[words[3]],
                "target": self.doc.signatures[words[5]],
                "mapping": {},
                "span": self.span,
            }
        )

    def kw_diagram(self, words, line):
        if len(words) != 2:
            self.error("usage: diagram NAME")
        self.new_block({"kind": "diagram", "name": words[1], "nodes": [], "edges": [], "span": self.span})

    # ---- body lines

    def body(self, kind: str) -> dict:
        if self.block is None or self.block["kind"] != kind:
            self.error(f"this line belongs inside a {kind!r} block")
        return self.block

    def kw_symbols(self, words, line):
        block = self.body("signature")
        if self.doc.institution.name != "prop":
            self.error("'symbols' lines are for prop signatures; use 'op'")
        block["symbols"].extend(words[1:])

    def kw_op(self, words, line):
        block = self.body("signature")
        if self.doc.institution.name != "eq":
            self.error("'op' lines are for eq signatures; use 'symbols'")
        if len(words) != 4 or words[2] != ":":
            self.error("usage: op NAME : ARITY")
        try:
            arity = int(words[3])
        except ValueError:
            self.error(f"arity must be an integer, got {words[3]!r}")
        block["symbols"].append((words[1], arity))

    def kw_var(self, words, line):
        block = self.body("theory")
        if self.doc.institution.name != "eq":
            self.error("'var' lines are for eq theories")
        if block["axioms"]:
            self.error("'var' lines must come before axioms")
        block["vars"].extend(words[1:])

    def kw_axiom(self, words, line):
        block = self.body("theory")
        rest = line[len("axiom") :].strip()
        if not rest:
            self.error("usage: axiom (<s-expression>)")
        sentence = parse_sentence(
            self.doc.institution,
            rest,
            block["sig"],
            tuple(block["vars"]),
            f"{self.file}:{self.span.line}",
        )
        block["axioms"].append(sentence)

    def kw_map(self, words, line):
        block = self.body("morphism")
        if len(words) != 4 or words[2] != "->":
            self.error("usage: map SYMBOL -> SYMBOL")
        if words[1] in block["mapping"]:
            self.error(f"duplicate map for symbol {words[1]!r}")
        block["mapping"][words[1]] = words[3]

    def kw_node(self, words, line):
        block = self.body("diagram")
        if len(words) != 4 or words[2] != "=":
            self.error("usage: node ID = PATH")
        block["nodes"].append((words[1], words[3]))

    def kw_edge(self, words, line):
        block = self.body("diagram")
        if len(words) != 8 or words[2] != ":" or words[4] != "->" or words[6] != "=":
            self.error("usage: edge ID : NODE -> NODE = PATH")
        block["edges"].append((words[1], words[3], words[5], words[7]))

    # ---- block finalization

    def finish_block(self):
        block, self.block = self.block, None
        if block is None:
            return
        name = block["name"]
        span = block["span"]
        ins = self.doc.institution
        try:
            if block["kind"] == "signature":
                if name in self.doc.signatures:
                    raise SemanticError(f"duplicate signature {name!r}", span)
                self.doc.signatures[name] = ins.make_signature(name, block["symbols"])
            elif block["kind"] == "theory":
                if name in self.doc.theories:
                    raise SemanticError(f"duplicate theory {name!r}", span)
                self.doc.theories[name] = Theory(block["sig"], frozenset(block["axioms"]))
                self.doc.theory_vars[name] = tuple(block["vars"])
            elif block["kind"] == "morphism":
                if name in self.doc.morphisms:
                    raise SemanticError(f"duplicate morphism {name!r}", span)
                self.doc.morphisms[name] = ins.morphism(
                    block["source"], block["target"], block["mapping"]
                )
            elif block["kind"] == "diagram":
                if name in self.doc.diagrams:
                    raise SemanticError(f"duplicate diagram {name!r}", span)
                self.doc.diagrams[name] = DiagramSource(
                    name, tuple(block["nodes"]), tuple(block["edges"])
                )
        except SemanticError as exc:
            if exc.span is None:
                raise SemanticError(str(exc), span) from None
            raise


def parse_document(text: str, file: str = "<string>") -> Document:
    return _Parser(text, file).doc


def load_document(path: str) -> Document:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path!r}: {exc.strerror}") from None
    return parse_document(text, path)


def _only(mapping: dict, what: str, path: str):
    if len(mapping) != 1:
        raise SemanticError(
            f"{path!r} must define exactly one {what}, found {len(mapping)}"
        )
    return next(iter(mapping.values()))


def load_theory(path: str) -> Theory:
    return _only(load_document(path).theories, "theory", path)


def load_morphism(path: str) -> SignatureMorphism:
    return _only(load_document(path).morphisms, "signature morphism", path)


def load_diagram(path: str) -> tuple[TheoryDiagram, DiagramSource]:
    """Load a diagram document, resolving node and edge files relative to
    the document's directory."""
    doc = load_document(path)
    source = _only(doc.diagrams, "diagram", path)
    base = os.path.dirname(os.path.abspath(path))
    node_theories = {}
    for node_id, rel in source.nodes:
        node_theories[node_id] = load_theory(os.path.join(base, rel))
    known = set(node_theories)
    edge_morphisms = {}
    edge_triples = []
    for edge_id, src, tgt, rel in source.edges:
        if src not in known or tgt not in known:
            raise SemanticError(f"edge {edge_id!r} references an unknown node")
        morphism = load_morphism(os.path.join(base, rel))
        src_t, tgt_t = node_theories[src], node_theories[tgt]
        if morphism.source != src_t.sig:
            raise SemanticError(
                f"edge {edge_id!r}: morphism source signature does not match node {src!r}"
            )
        if morphism.target != tgt_t.sig:
            raise SemanticError(
                f"edge {edge_id!r}: morphism target signature does not match node {tgt!r}"
            )
        edge_morphisms[edge_id] = TheoryMorphism(morphism, src_t, tgt_t)
        edge_triples.append((edge_id, src, tgt))
    shape = ShapeGraph(tuple(n for n, _ in source.nodes), tuple(edge_triples))
    return TheoryDiagram(shape, node_theories, edge_morphisms), source


# ----------------------------------------------------------------------
# canonical printers


def format_formula(formula) -> str:
    if isinstance(formula, str):
        return formula
    return "(" + " ".join([formula[0]] + [format_formula(f) for f in formula[1:]]) + ")"


def format_term(term) -> str:
    if isinstance(term, str):
        return term
    if len(term) == 1:
        return term[0]
    return "(" + " ".join([term[0]] + [format_term(t) for t in term[1:]]) + ")"


def format_sentence(institution: Institution, sentence) -> str:
    if institution.name == "prop":
        return format_formula(sentence)
    if institution.name == "eq":
        return f"(= {format_term(sentence.lhs)} {format_term(sentence.rhs)})"
    raise SemanticError(f"no sentence printer for institution {institution.name!r}")


def format_signature(sig: Signature) -> str:
    if isinstance(sig, PropSignature):
        lines = [f"signature {sig.name}"]
        if sig.atoms:
            lines.append("  symbols " + " ".join(sig.atoms))
    elif isinstance(sig, EqSignature):
        lines = [f"signature {sig.name}"]
        lines.extend(f"  op {n} : {a}" for n, a in sig.ops)
    else:
        raise SemanticError(f"no signature printer for {type(sig).__name__}")
    return "\n".join(lines) + "\n"


def _theory_vars(theory: Theory) -> tuple[str, ...]:
    declared = {a.vars for a in theory.axioms}
    if len(declared) > 1:
        raise SemanticError(
            "cannot print a theory whose axioms declare different variables"
        )
    return declared.pop() if declared else ()


def format_theory(theory: Theory, name: str = "T") -> str:
    """Self-contained document text: institution, signature, theory."""
    ins = theory.sig.institution
    lines = [f"institution {ins.name}", "", format_signature(theory.sig).rstrip("\n"), ""]
    lines.append(f"theory {name} over {theory.sig.name}")
    if ins.name == "eq":
        variables = _theory_vars(theory)
        if variables:
            lines.append("  var " + " ".join(variables))
    for axiom in sorted(theory.axioms, key=lambda a: format_sentence(ins, a)):
        lines.append("  axiom " + format_sentence(ins, axiom))
    return "\n".join(lines) + "\n"


def format_morphism(morphism: SignatureMorphism, name: str = "f") -> str:
    ins = morphism.source.institution
    lines = [
        f"institution {ins.name}",
        "",
        format_signature(morphism.source).rstrip("\n"),
        "",
        format_signature(morphism.target).rstrip("\n"),
        "",
        f"morphism {name} : {morphism.source.name} -> {morphism.target.name}",
    ]
    lines.extend(f"  map {a} -> {b}" for a, b in morphism.mapping)
    return "\n".join(lines) + "\n"


def format_model(model) -> str:
    if isinstance(model, Assignment):
        return " ".join(f"{a}={v}" for a, v in model.values)
    if isinstance(model, FiniteAlgebra):
        parts = [f"carrier={model.carrier}"]
        parts.extend(
            f"{n}=[{','.join(map(str, table))}]" for n, table in model.tables
        )
        return " ".join(parts)
    raise SemanticError(f"no model printer for {type(model).__name__}")
