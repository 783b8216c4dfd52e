"""Signature colimits and the two-step fusion of aligned theories.

Step 1 (alignment) is a diagram of theories over a shape graph; its base
diagram of signatures has a colimit computed concretely as disjoint union
quotiented by the equivalence generated by the edge maps (union-find).
Step 2 (unification) translates every node theory into the apex signature
and takes the union of the translated axiom sets, which is the meet of
the diagram in entailment order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import (
    ArityConflictError,
    NoMediatorError,
    SemanticError,
    TheoryMorphismError,
)
from .institution import (
    DEFAULT_BOUNDS,
    Bounds,
    Institution,
    Sentence,
    Signature,
    SignatureMorphism,
    compose_morphisms,
)
from .theories import (
    Theory,
    TheoryMorphism,
    existential_image,
    is_theory_morphism,
)


class _UnionFind:
    """Deterministic union-find over a fixed element list."""

    def __init__(self, elements):
        self.elements = list(elements)
        self.parent = {e: e for e in self.elements}
        self.size = {e: 1 for e in self.elements}

    def find(self, e):
        root = e
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[e] != root:
            self.parent[e], e = root, self.parent[e]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def classes(self) -> list[list]:
        """Equivalence classes, each sorted, in order of least member."""
        grouped: dict = {}
        for e in self.elements:
            grouped.setdefault(self.find(e), []).append(e)
        return sorted((sorted(cls) for cls in grouped.values()), key=lambda c: c[0])


@dataclass(frozen=True)
class ShapeGraph:
    """Indexing graph: node ids plus (edge id, source, target) triples.
    Parallel edges and cycles are permitted."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise SemanticError("duplicate node ids in shape graph")
        ids = [e[0] for e in self.edges]
        if len(set(ids)) != len(ids):
            raise SemanticError("duplicate edge ids in shape graph")
        known = set(self.nodes)
        for eid, src, tgt in self.edges:
            if src not in known or tgt not in known:
                raise SemanticError(f"edge {eid!r} has an unknown endpoint")


@dataclass
class SignatureDiagram:
    shape: ShapeGraph
    node_sigs: dict[str, Signature]
    edge_morphisms: dict[str, SignatureMorphism]

    def __post_init__(self):
        if set(self.node_sigs) != set(self.shape.nodes):
            raise SemanticError("node signatures do not match the shape graph")
        if set(self.edge_morphisms) != {e[0] for e in self.shape.edges}:
            raise SemanticError("edge morphisms do not match the shape graph")


@dataclass
class TheoryDiagram:
    shape: ShapeGraph
    node_theories: dict[str, Theory]
    edge_morphisms: dict[str, TheoryMorphism]

    def __post_init__(self):
        if set(self.node_theories) != set(self.shape.nodes):
            raise SemanticError("node theories do not match the shape graph")
        if set(self.edge_morphisms) != {e[0] for e in self.shape.edges}:
            raise SemanticError("edge morphisms do not match the shape graph")


@dataclass
class Cocone:
    """Legs from every diagram node into one apex."""

    apex: Any
    legs: dict[str, Any]


@dataclass(frozen=True)
class FusionResult:
    theory: Theory
    theory_cocone: Cocone = field(compare=False)
    signature_cocone: Cocone = field(compare=False)
    provenance: tuple[tuple[Sentence, tuple[tuple[str, Sentence], ...]], ...] = ()


@dataclass(frozen=True)
class DiagramIssue:
    kind: str
    where: str
    message: str

    def __str__(self):
        return f"{self.kind} at {self.where}: {self.message}"


@dataclass(frozen=True)
class DiagramReport:
    issues: tuple[DiagramIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues


def base_diagram(diagram: TheoryDiagram) -> SignatureDiagram:
    """Node-wise and edge-wise projection to signatures, same shape."""
    return SignatureDiagram(
        diagram.shape,
        {n: t.sig for n, t in diagram.node_theories.items()},
        {e: tm.morphism for e, tm in diagram.edge_morphisms.items()},
    )


def _diagram_institution(sigs, institution) -> Institution:
    found = {s.institution for s in sigs}
    if len(found) > 1:
        raise SemanticError("diagram mixes signatures of different institutions")
    if found:
        return found.pop()
    if institution is None:
        raise SemanticError("empty diagram needs an explicit institution")
    return institution


def colimit_signature(
    diagram: SignatureDiagram,
    apex_name: str = "colimit",
    institution: Institution | None = None,
) -> tuple[Signature, Cocone]:
    """Colimit by summing and quotienting: disjoint union of all node
    symbols modulo the equivalence generated by the edge maps.

    Apex symbols are named by the lexicographically least member of each
    class; on a name collision between classes, each colliding class is
    qualified as ``node.symbol`` using its least (node, symbol) pair.
    """
    ins = _diagram_institution(diagram.node_sigs.values(), institution)
    elements = [
        (node, sym)
        for node in diagram.shape.nodes
        for sym in diagram.node_sigs[node].symbol_names()
    ]
    uf = _UnionFind(elements)
    for eid, m, n in diagram.shape.edges:
        edge = diagram.edge_morphisms[eid]
        for sym in diagram.node_sigs[m].symbol_names():
            uf.union((m, sym), (n, edge.map[sym]))

    classes = uf.classes()
    primary = [min(sym for _, sym in cls) for cls in classes]
    counts: dict[str, int] = {}
    for name in primary:
        counts[name] = counts.get(name, 0) + 1
    names = [
        name if counts[name] == 1 else f"{cls[0][0]}.{cls[0][1]}"
        for name, cls in zip(primary, classes)
    ]

    descriptors = []
    for cls, name in zip(classes, names):
        renamed = {
            ins.rename_symbol(_descriptor(diagram.node_sigs[node], sym), name)
            for node, sym in cls
        }
        if len(renamed) > 1:
            raise ArityConflictError(
                f"quotient class {name!r} merges incompatible symbols: {sorted(map(str, renamed))}"
            )
        descriptors.append(renamed.pop())
    apex = ins.make_signature(apex_name, descriptors)

    class_name = {e: name for cls, name in zip(classes, names) for e in cls}
    legs = {
        node: ins.morphism(
            diagram.node_sigs[node],
            apex,
            {sym: class_name[(node, sym)] for sym in diagram.node_sigs[node].symbol_names()},
        )
        for node in diagram.shape.nodes
    }
    cocone = Cocone(apex, legs)
    for eid, m, n in diagram.shape.edges:
        composite = compose_morphisms(diagram.edge_morphisms[eid], legs[n])
        assert composite == legs[m], f"cocone does not commute over edge {eid!r}"
    return apex, cocone


def _descriptor(sig: Signature, symbol: str):
    for desc, name in zip(sig.symbols(), sig.symbol_names()):
        if name == symbol:
            return desc
    raise SemanticError(f"symbol {symbol!r} not found in signature {sig.name!r}")


def validate_diagram(
    diagram: TheoryDiagram, bounds: Bounds = DEFAULT_BOUNDS
) -> DiagramReport:
    """Re-check endpoint matching and the theory-morphism condition of
    every edge; failures name the offending axioms."""
    issues: list[DiagramIssue] = []
    for eid, m, n in diagram.shape.edges:
        tm = diagram.edge_morphisms[eid]
        src_t = diagram.node_theories[m]
        tgt_t = diagram.node_theories[n]
        if tm.source != src_t or tm.morphism.source != src_t.sig:
            issues.append(
                DiagramIssue("endpoint-mismatch", eid, f"source does not match node {m!r}")
            )
            continue
        if tm.target != tgt_t or tm.morphism.target != tgt_t.sig:
            issues.append(
                DiagramIssue("endpoint-mismatch", eid, f"target does not match node {n!r}")
            )
            continue
        if not is_theory_morphism(tm.morphism, src_t, tgt_t, bounds):
            bad = sorted(
                (
                    repr(a)
                    for a in src_t.axioms
                    if not is_theory_morphism(
                        tm.morphism, Theory(src_t.sig, frozenset((a,))), tgt_t, bounds
                    )
                ),
            )
            issues.append(
                DiagramIssue(
                    "not-a-theory-morphism",
                    eid,
                    "translated axioms not entailed by target: " + ", ".join(bad),
                )
            )
    return DiagramReport(tuple(issues))


def fuse(
    diagram: TheoryDiagram,
    bounds: Bounds = DEFAULT_BOUNDS,
    apex_name: str = "fusion",
    institution: Institution | None = None,
) -> FusionResult:
    """Two-step fusion: colimit signature of the base diagram, then union
    of the translated node axiom sets, with per-axiom provenance."""
    apex, sig_cocone = colimit_signature(base_diagram(diagram), apex_name, institution)
    ins = _diagram_institution(
        (t.sig for t in diagram.node_theories.values()), institution
    ) if diagram.shape.nodes else (institution or apex.institution)

    provenance: dict[Sentence, list[tuple[str, Sentence]]] = {}
    for node in diagram.shape.nodes:
        theory = diagram.node_theories[node]
        leg = sig_cocone.legs[node]
        for axiom in sorted(theory.axioms, key=repr):
            fused_axiom = ins.translate(leg, axiom)
            provenance.setdefault(fused_axiom, []).append((node, axiom))

    fused = Theory(apex, frozenset(provenance))
    theory_legs = {}
    for node in diagram.shape.nodes:
        leg = sig_cocone.legs[node]
        src = diagram.node_theories[node]
        if not is_theory_morphism(leg, src, fused, bounds):
            raise TheoryMorphismError(
                f"fusion leg for node {node!r} is not a theory morphism"
            )
        theory_legs[node] = TheoryMorphism(leg, src, fused)
    return FusionResult(
        theory=fused,
        theory_cocone=Cocone(fused, theory_legs),
        signature_cocone=sig_cocone,
        provenance=tuple(
            sorted(((s, tuple(ps)) for s, ps in provenance.items()), key=repr)
        ),
    )


def mediating_morphism(
    fusion: FusionResult,
    competitor: Cocone,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> SignatureMorphism:
    """The unique signature morphism from the fusion apex through which a
    commuting competitor cocone of theory morphisms factors.

    Raises NoMediatorError when the competitor legs disagree on a merged
    symbol class, which signals a non-commuting competitor.
    """
    legs = competitor.legs
    if not legs:
        raise NoMediatorError("competitor cocone has no legs")
    targets = {tm.target for tm in legs.values()}
    if len(targets) > 1:
        raise NoMediatorError("competitor legs land in different theories")
    target_theory = targets.pop()
    ins = fusion.theory.sig.institution

    mapping: dict[str, str] = {}
    for node in sorted(fusion.signature_cocone.legs):
        if node not in legs:
            raise NoMediatorError(f"competitor cocone is missing a leg for node {node!r}")
        fusion_leg = fusion.signature_cocone.legs[node]
        competitor_leg = legs[node].morphism
        for sym, cls in fusion_leg.mapping:
            image = competitor_leg.map[sym]
            if mapping.setdefault(cls, image) != image:
                raise NoMediatorError(
                    f"competitor legs disagree on merged symbol class {cls!r}"
                )
    mediator = ins.morphism(fusion.theory.sig, target_theory.sig, mapping)
    for node, fusion_leg in fusion.signature_cocone.legs.items():
        if compose_morphisms(fusion_leg, mediator) != legs[node].morphism:
            raise NoMediatorError(f"factorization fails at node {node!r}")
    if not is_theory_morphism(mediator, fusion.theory, target_theory, bounds):
        raise TheoryMorphismError("mediator is not a theory morphism")
    return mediator
