"""Truth construction at desk scale: satisfaction classifications,
infomorphisms, concept lattices, the classification <-> lattice round
trip, and the closure quotient from theories to formal concepts.

The lattice enumeration closes the set of attribute extents under
intersection; the brute-force oracle (filter all extent subsets by double
derivation) lives in the test suite as an independent codepath.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ResourceLimitError, SemanticError
from .institution import (
    DEFAULT_BOUNDS,
    Bounds,
    SentenceUniverse,
    Signature,
    SignatureMorphism,
)
from .theories import (
    Theory,
    extent,
    left_closed,
    left_entailment,
    models_of,
    right_closed,
    right_entailment,
)

MAX_CONTEXT_CELLS = 1 << 22


@dataclass(frozen=True)
class Classification:
    """Instances, types and a total incidence relation between them."""

    instances: tuple
    types: tuple
    matrix: tuple[tuple[bool, ...], ...]  # rows indexed by instance

    def __post_init__(self):
        if len(self.matrix) != len(self.instances) or any(
            len(row) != len(self.types) for row in self.matrix
        ):
            raise SemanticError("incidence matrix shape does not match labels")

    @cached_property
    def instance_index(self) -> dict:
        return {m: i for i, m in enumerate(self.instances)}

    @cached_property
    def type_index(self) -> dict:
        return {t: j for j, t in enumerate(self.types)}

    def incident(self, instance, type_) -> bool:
        return self.matrix[self.instance_index[instance]][self.type_index[type_]]


@dataclass
class Infomorphism:
    """Contravariant pair of maps between classifications: instances flow
    backward, types flow forward."""

    instance_map: dict
    type_map: dict


@dataclass(frozen=True)
class InfomorphismReport:
    checked: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class FormalConcept:
    extent: frozenset
    intent: frozenset


@dataclass
class ConceptLattice:
    """All formal concepts of a classification, ordered by extent
    inclusion, with the two generator maps."""

    classification: Classification
    concepts: tuple[FormalConcept, ...]
    object_concept: dict
    attribute_concept: dict

    def leq(self, a: FormalConcept, b: FormalConcept) -> bool:
        return a.extent <= b.extent

    @property
    def top(self) -> FormalConcept:
        return max(self.concepts, key=lambda c: len(c.extent))

    @property
    def bottom(self) -> FormalConcept:
        return min(self.concepts, key=lambda c: len(c.extent))

    @cached_property
    def _by_extent(self) -> dict:
        return {c.extent: c for c in self.concepts}

    def concept_of_extent(self, ext: frozenset) -> FormalConcept:
        return self._by_extent[frozenset(ext)]

    def meet(self, concepts) -> FormalConcept:
        ext = frozenset(self.classification.instances)
        for c in concepts:
            ext &= c.extent
        return self._by_extent[ext]

    def join(self, concepts) -> FormalConcept:
        intent = frozenset(self.classification.types)
        for c in concepts:
            intent &= c.intent
        ext = _extent_of_intent(self.classification, intent)
        return self._by_extent[ext]

    def covers(self) -> tuple[tuple[FormalConcept, FormalConcept], ...]:
        """Hasse cover pairs (lower, upper)."""
        out = []
        for a in self.concepts:
            for b in self.concepts:
                if a.extent < b.extent and not any(
                    a.extent < c.extent < b.extent for c in self.concepts
                ):
                    out.append((a, b))
        return tuple(out)


def _intent_of_extent(c: Classification, ext) -> frozenset:
    rows = [c.matrix[c.instance_index[m]] for m in ext]
    return frozenset(
        t for j, t in enumerate(c.types) if all(row[j] for row in rows)
    )


def _extent_of_intent(c: Classification, intent) -> frozenset:
    cols = [c.type_index[t] for t in intent]
    return frozenset(
        m for i, m in enumerate(c.instances) if all(c.matrix[i][j] for j in cols)
    )


def classification_of(
    sig: Signature, universe: SentenceUniverse, bounds: Bounds = DEFAULT_BOUNDS
) -> Classification:
    """The satisfaction classification: enumerated models against universe
    sentences."""
    if universe.sig != sig:
        raise SemanticError("universe signature does not match")
    ins = sig.institution
    models, table = ins.universe_table(universe, bounds)
    matrix = tuple(tuple(col.tolist()) for col in table.T)
    return Classification(tuple(models), universe.sentences, matrix)


def institution_infomorphism(
    morphism: SignatureMorphism,
    src_universe: SentenceUniverse,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> tuple[Infomorphism, Classification, Classification]:
    """The infomorphism induced by a signature morphism: model reduct
    backward on instances, sentence translation forward on types."""
    ins = morphism.source.institution
    src = classification_of(morphism.source, src_universe, bounds)
    translated = tuple(ins.translate(morphism, s) for s in src_universe.sentences)
    tgt_universe = SentenceUniverse(
        morphism.target, _dedup(translated), f"image-of-{src_universe.spec}"
    )
    tgt = classification_of(morphism.target, tgt_universe, bounds)
    info = Infomorphism(
        instance_map={m: ins.reduct(morphism, m) for m in tgt.instances},
        type_map=dict(zip(src_universe.sentences, translated)),
    )
    return info, src, tgt


def _dedup(items) -> tuple:
    seen: set = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


def check_infomorphism(
    info: Infomorphism, src: Classification, tgt: Classification
) -> InfomorphismReport:
    """Exhaustively verify the fundamental condition:
    instance_map(m2) |=src s1  iff  m2 |=tgt type_map(s1)."""
    violations = []
    for m2 in tgt.instances:
        m1 = info.instance_map[m2]
        for s1 in src.types:
            if src.incident(m1, s1) != tgt.incident(m2, info.type_map[s1]):
                violations.append((m2, s1))
    return InfomorphismReport(
        checked=len(tgt.instances) * len(src.types), violations=tuple(violations)
    )


def concept_lattice(
    c: Classification, bounds: Bounds = DEFAULT_BOUNDS
) -> ConceptLattice:
    """All formal concepts via intersection-closure of attribute extents,
    in a deterministic order (extent bitstrings, descending)."""
    n, k = len(c.instances), len(c.types)
    if n * k > MAX_CONTEXT_CELLS:
        raise ResourceLimitError(
            f"context with {n * k} cells exceeds the bound of {MAX_CONTEXT_CELLS}"
        )
    full = (1 << n) - 1
    attr_bits = []
    for j in range(k):
        bits = 0
        for i in range(n):
            if c.matrix[i][j]:
                bits |= 1 << i
        attr_bits.append(bits)
    distinct_attrs = sorted(set(attr_bits))

    extents = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for ext in frontier:
            for bits in distinct_attrs:
                meet_bits = ext & bits
                if meet_bits not in extents:
                    extents.add(meet_bits)
                    nxt.append(meet_bits)
        frontier = nxt

    ordered = sorted(extents, reverse=True)
    concepts = []
    by_bits = {}
    for bits in ordered:
        ext = frozenset(c.instances[i] for i in range(n) if bits >> i & 1)
        intent = frozenset(
            t for j, t in enumerate(c.types) if attr_bits[j] & bits == bits
        )
        concept = FormalConcept(ext, intent)
        concepts.append(concept)
        by_bits[bits] = concept

    object_concept = {}
    for i, m in enumerate(c.instances):
        # extent of the instance's intent
        obits = full
        for j in range(k):
            if c.matrix[i][j]:
                obits &= attr_bits[j]
        object_concept[m] = by_bits[obits]
    attribute_concept = {
        t: by_bits[attr_bits[j]] for j, t in enumerate(c.types)
    }
    return ConceptLattice(c, tuple(concepts), object_concept, attribute_concept)


@dataclass(frozen=True)
class RoundTripReport:
    checked: int
    mismatches: tuple

    @property
    def ok(self) -> bool:
        return not self.mismatches


def round_trip_check(c: Classification, bounds: Bounds = DEFAULT_BOUNDS) -> RoundTripReport:
    """Rebuild the incidence from the lattice generator maps (m |= s iff
    object-concept(m) <= attribute-concept(s)) and compare exactly."""
    lattice = concept_lattice(c, bounds)
    mismatches = []
    for m in c.instances:
        om = lattice.object_concept[m]
        for t in c.types:
            rebuilt = lattice.leq(om, lattice.attribute_concept[t])
            if rebuilt != c.incident(m, t):
                mismatches.append((m, t))
    return RoundTripReport(
        checked=len(c.instances) * len(c.types), mismatches=tuple(mismatches)
    )


def closure_quotient(
    sig: Signature,
    universe: SentenceUniverse,
    theories,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> dict[Theory, FormalConcept]:
    """Send each theory to the formal concept whose extent is the theory's
    extent.  Entailment-equivalent theories land on the same concept.
    Theory axioms must lie inside the universe so extents are closed."""
    c = classification_of(sig, universe, bounds)
    lattice = concept_lattice(c, bounds)
    out = {}
    for theory in theories:
        missing = sorted(repr(a) for a in theory.axioms if a not in universe.index)
        if missing:
            raise SemanticError(
                "theory axioms outside the universe: " + ", ".join(missing)
            )
        out[theory] = lattice.concept_of_extent(models_of(sig, theory.axioms, bounds))
    return out


@dataclass(frozen=True)
class NaturalityReport:
    checked: int
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures


def naturality_check(
    morphism: SignatureMorphism,
    src_universe: SentenceUniverse,
    source_theories,
    target_theories,
    bounds: Bounds = DEFAULT_BOUNDS,
    left_entailment_op=left_entailment,
    right_entailment_op=right_entailment,
) -> NaturalityReport:
    """Verify, at extent level, that the entailment-level operators
    commute with closure: the left operator against the inclusion square
    and the right operator against the closure square."""
    failures = []
    checked = 0
    for t2 in target_theories:
        checked += 1
        via_entailment = extent(left_entailment_op(morphism, t2, src_universe, bounds), bounds)
        via_closed = left_closed(morphism, extent(t2, bounds), src_universe, bounds)
        if via_entailment.extent != via_closed.extent:
            failures.append(("left", t2))
    for t1 in source_theories:
        checked += 1
        via_entailment = extent(right_entailment_op(morphism, t1), bounds)
        via_closed = right_closed(morphism, extent(t1, bounds), bounds)
        if via_entailment.extent != via_closed.extent:
            failures.append(("right", t1))
    return NaturalityReport(checked=checked, failures=tuple(failures))


# ----------------------------------------------------------------------
# external formats


def read_context(text: str) -> Classification:
    """Cross-table CSV: first row type labels, first column instance
    labels, cells 0/1."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or len(rows[0]) < 1:
        raise SemanticError("empty context")
    types = tuple(label.strip() for label in rows[0][1:])
    instances = []
    matrix = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(types) + 1:
            raise SemanticError(f"context row {lineno} has {len(row) - 1} cells, expected {len(types)}")
        instances.append(row[0].strip())
        cells = []
        for cell in row[1:]:
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise SemanticError(f"context row {lineno}: cell must be 0 or 1, got {cell!r}")
            cells.append(cell == "1")
        matrix.append(tuple(cells))
    return Classification(tuple(instances), types, tuple(matrix))


def extent_bits(lattice: ConceptLattice, concept: FormalConcept) -> str:
    """Stable node name: membership bitstring in instance order."""
    return "".join(
        "1" if m in concept.extent else "0" for m in lattice.classification.instances
    )


def lattice_dot(lattice: ConceptLattice, type_label=str) -> str:
    """DOT rendering: nodes named by extent bitstrings, labeled with a
    minimal generating intent, ranked by extent size."""
    lines = ["digraph lattice {", "  rankdir=BT;", '  node [shape=box];']
    own_attrs: dict[FormalConcept, list[str]] = {c: [] for c in lattice.concepts}
    for t, concept in lattice.attribute_concept.items():
        own_attrs[concept].append(type_label(t))
    by_level: dict[int, list] = {}
    for c in lattice.concepts:
        by_level.setdefault(len(c.extent), []).append(c)
    for level in sorted(by_level):
        lines.append("  { rank = same;")
        for c in sorted(by_level[level], key=lambda c: extent_bits(lattice, c)):
            bits = extent_bits(lattice, c)
            gen = min(own_attrs[c], key=lambda s: (len(s), s), default="-")
            lines.append(f'    "{bits}" [label="{bits}\\n{gen}"];')
        lines.append("  }")
    for lower, upper in sorted(
        lattice.covers(),
        key=lambda p: (extent_bits(lattice, p[0]), extent_bits(lattice, p[1])),
    ):
        lines.append(
            f'  "{extent_bits(lattice, lower)}" -> "{extent_bits(lattice, upper)}";'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
