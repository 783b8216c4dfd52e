"""Theories over any logic instance: entailment, closure, the closed
lattice, substitution / existential image, the Galois connections along a
signature morphism, model/sentence embeddings, and theory morphisms.

Closed theories are represented extent-only, as the set of models
satisfying the theory; intents are recomputed on demand within a declared
sentence universe.  Entailment is semantic: exhaustive model enumeration
within bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SemanticError, TheoryMorphismError
from .institution import (
    DEFAULT_BOUNDS,
    Bounds,
    Model,
    Sentence,
    SentenceUniverse,
    Signature,
    SignatureMorphism,
    compose_morphisms,
    identity_morphism,
)


@dataclass(frozen=True)
class Theory:
    sig: Signature
    axioms: frozenset

    def __post_init__(self):
        if not isinstance(self.axioms, frozenset):
            object.__setattr__(self, "axioms", frozenset(self.axioms))


@dataclass(frozen=True)
class ClosedTheory:
    """Extent-only representative of an entailment-equivalence class."""

    sig: Signature
    extent: frozenset

    def __post_init__(self):
        if not isinstance(self.extent, frozenset):
            object.__setattr__(self, "extent", frozenset(self.extent))


# ----------------------------------------------------------------------
# entailment and closure


@lru_cache(maxsize=65536)
def _models_of(sig: Signature, sentences: frozenset, bounds: Bounds) -> frozenset:
    ins = sig.institution
    models = ins.enumerate_models(sig, bounds)
    if not sentences:
        return frozenset(models)
    table = ins.truth_table(sig, tuple(sentences), models)
    mask = table.all(axis=0)
    return frozenset(m for m, ok in zip(models, mask.tolist()) if ok)


def models_of(sig: Signature, sentences, bounds: Bounds = DEFAULT_BOUNDS) -> frozenset:
    """All enumerated models satisfying every given sentence."""
    return _models_of(sig, frozenset(sentences), bounds)


def extent(theory: Theory, bounds: Bounds = DEFAULT_BOUNDS) -> ClosedTheory:
    """The closed theory (extent-only) represented by a theory."""
    return ClosedTheory(theory.sig, models_of(theory.sig, theory.axioms, bounds))


def entails(theory: Theory, sentence: Sentence, bounds: Bounds = DEFAULT_BOUNDS) -> bool:
    """True iff every model of the theory satisfies the sentence."""
    ext = models_of(theory.sig, theory.axioms, bounds)
    return ext <= models_of(theory.sig, (sentence,), bounds)


def counterexample(
    theory: Theory, sentence: Sentence, bounds: Bounds = DEFAULT_BOUNDS
) -> Model | None:
    """A model of the theory falsifying the sentence (enumeration order),
    or None when the sentence is entailed."""
    ins = theory.sig.institution
    ext = models_of(theory.sig, theory.axioms, bounds)
    for m in ins.enumerate_models(theory.sig, bounds):
        if m in ext and not ins.satisfies(theory.sig, m, sentence):
            return m
    return None


def entails_theory(t1: Theory, t2: Theory, bounds: Bounds = DEFAULT_BOUNDS) -> bool:
    """T1 entails T2 iff every model of T1 is a model of T2."""
    if t1.sig != t2.sig:
        raise SemanticError("entailment requires theories over one signature")
    return models_of(t1.sig, t1.axioms, bounds) <= models_of(t2.sig, t2.axioms, bounds)


def equivalent(t1: Theory, t2: Theory, bounds: Bounds = DEFAULT_BOUNDS) -> bool:
    if t1.sig != t2.sig:
        raise SemanticError("equivalence requires theories over one signature")
    return models_of(t1.sig, t1.axioms, bounds) == models_of(t2.sig, t2.axioms, bounds)


def _extent_mask(
    theory: Theory, universe: SentenceUniverse, bounds: Bounds
) -> np.ndarray:
    """Boolean mask of the theory's extent over the enumerated models,
    reusing the cached universe truth table where possible."""
    ins = theory.sig.institution
    models, table = ins.universe_table(universe, bounds)
    rows = [universe.index.get(a) for a in theory.axioms]
    known = [r for r in rows if r is not None]
    fresh = [a for a, r in zip(theory.axioms, rows) if r is None]
    mask = np.ones(len(models), dtype=bool)
    if known:
        mask &= table[np.asarray(known, dtype=np.intp)].all(axis=0)
    if fresh:
        mask &= ins.truth_table(theory.sig, fresh, models).all(axis=0)
    return mask


def closure_in_universe(
    theory: Theory, universe: SentenceUniverse, bounds: Bounds = DEFAULT_BOUNDS
) -> frozenset:
    """All universe sentences entailed by the theory (monotone, increasing
    and idempotent relative to the universe)."""
    if theory.sig != universe.sig:
        raise SemanticError("universe signature does not match theory signature")
    ins = theory.sig.institution
    models, table = ins.universe_table(universe, bounds)
    mask = _extent_mask(theory, universe, bounds)
    held = table[:, mask].all(axis=1)
    return frozenset(
        s for s, ok in zip(universe.sentences, held.tolist()) if ok
    )


def meet(t1: Theory, t2: Theory) -> Theory:
    """Meet in entailment order: union of axiom sets."""
    if t1.sig != t2.sig:
        raise SemanticError("meet requires theories over one signature")
    return Theory(t1.sig, t1.axioms | t2.axioms)


def close_extent(
    sig: Signature,
    models,
    universe: SentenceUniverse,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> frozenset:
    """Galois extent-closure of a model set relative to the universe:
    all models satisfying every universe sentence true on the set."""
    ins = sig.institution
    all_models, table = ins.universe_table(universe, bounds)
    model_index = {m: i for i, m in enumerate(all_models)}
    idx = np.fromiter((model_index[m] for m in models), dtype=np.intp, count=len(models))
    true_on_all = table[:, idx].all(axis=1) if idx.size else np.ones(len(table), bool)
    closed = table[true_on_all].all(axis=0)
    return frozenset(m for m, ok in zip(all_models, closed.tolist()) if ok)


def join_closed(
    c1: ClosedTheory,
    c2: ClosedTheory,
    universe: SentenceUniverse,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> ClosedTheory:
    """Join of closed theories: extent union followed by extent-closure."""
    if c1.sig != c2.sig:
        raise SemanticError("join requires closed theories over one signature")
    return ClosedTheory(
        c1.sig, close_extent(c1.sig, c1.extent | c2.extent, universe, bounds)
    )


# ----------------------------------------------------------------------
# translation-induced operators


def existential_image(morphism: SignatureMorphism, theory: Theory) -> Theory:
    """Direct image of the axiom set under sentence translation."""
    if theory.sig != morphism.source:
        raise SemanticError("theory is not over the morphism source")
    ins = morphism.source.institution
    return Theory(
        morphism.target,
        frozenset(ins.translate(morphism, a) for a in theory.axioms),
    )


def inverse_image(
    morphism: SignatureMorphism, target_theory: Theory, universe: SentenceUniverse
) -> frozenset:
    """Preimage of the target axiom set under translation, within the
    finite source universe."""
    if target_theory.sig != morphism.target:
        raise SemanticError("theory is not over the morphism target")
    if universe.sig != morphism.source:
        raise SemanticError("universe is not over the morphism source")
    ins = morphism.source.institution
    return frozenset(
        s
        for s in universe.sentences
        if ins.translate(morphism, s) in target_theory.axioms
    )


def right_closed(
    morphism: SignatureMorphism, c1: ClosedTheory, bounds: Bounds = DEFAULT_BOUNDS
) -> ClosedTheory:
    """Target closed theory whose extent is the reduct preimage of c1."""
    if c1.sig != morphism.source:
        raise SemanticError("closed theory is not over the morphism source")
    ins = morphism.source.institution
    target_models = ins.enumerate_models(morphism.target, bounds)
    ext = frozenset(
        m for m in target_models if ins.reduct(morphism, m) in c1.extent
    )
    return ClosedTheory(morphism.target, ext)


def left_closed(
    morphism: SignatureMorphism,
    c2: ClosedTheory,
    universe: SentenceUniverse,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> ClosedTheory:
    """Source closed theory: extent-closure of the reducts of c2's extent,
    relative to the source universe."""
    if c2.sig != morphism.target:
        raise SemanticError("closed theory is not over the morphism target")
    if universe.sig != morphism.source:
        raise SemanticError("universe is not over the morphism source")
    ins = morphism.source.institution
    reducts = frozenset(ins.reduct(morphism, m) for m in c2.extent)
    return ClosedTheory(
        morphism.source, close_extent(morphism.source, reducts, universe, bounds)
    )


def right_entailment(morphism: SignatureMorphism, t1: Theory) -> Theory:
    """Existential quantification along the morphism (definitionally the
    existential image)."""
    return existential_image(morphism, t1)


def left_entailment(
    morphism: SignatureMorphism,
    t2: Theory,
    universe: SentenceUniverse,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> Theory:
    """Substitution applied to the closed target theory: all source
    universe sentences whose translation is a theorem of t2."""
    if t2.sig != morphism.target:
        raise SemanticError("theory is not over the morphism target")
    if universe.sig != morphism.source:
        raise SemanticError("universe is not over the morphism source")
    ins = morphism.source.institution
    target_models = ins.enumerate_models(morphism.target, bounds)
    ext2 = models_of(t2.sig, t2.axioms, bounds)
    ext2_models = tuple(m for m in target_models if m in ext2)
    translated = [ins.translate(morphism, s) for s in universe.sentences]
    if ext2_models:
        held = ins.truth_table(morphism.target, translated, ext2_models).all(axis=1)
    else:
        held = np.ones(len(translated), dtype=bool)
    return Theory(
        morphism.source,
        frozenset(s for s, ok in zip(universe.sentences, held.tolist()) if ok),
    )


# ----------------------------------------------------------------------
# model / sentence embeddings


def model_theory(
    model: Model, universe: SentenceUniverse, bounds: Bounds = DEFAULT_BOUNDS
) -> ClosedTheory:
    """Closed theory of a single model: extent-closure of {model}."""
    return ClosedTheory(
        universe.sig, close_extent(universe.sig, (model,), universe, bounds)
    )


def sentence_theory(
    sentence: Sentence, sig: Signature, bounds: Bounds = DEFAULT_BOUNDS
) -> ClosedTheory:
    """Closed theory of a single sentence: its model class."""
    return ClosedTheory(sig, models_of(sig, (sentence,), bounds))


# ----------------------------------------------------------------------
# theory morphisms (the flattened category of (signature, theory) pairs)


@dataclass(frozen=True)
class TheoryMorphism:
    morphism: SignatureMorphism
    source: Theory
    target: Theory


def is_theory_morphism(
    morphism: SignatureMorphism,
    source: Theory,
    target: Theory,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> bool:
    """True iff the morphism maps source axioms to target theorems: the
    target entails every translated source axiom."""
    if source.sig != morphism.source or target.sig != morphism.target:
        return False
    return entails_theory(target, existential_image(morphism, source), bounds)


def theory_morphism(
    morphism: SignatureMorphism,
    source: Theory,
    target: Theory,
    bounds: Bounds = DEFAULT_BOUNDS,
) -> TheoryMorphism:
    if source.sig != morphism.source:
        raise SemanticError("source theory signature does not match the morphism")
    if target.sig != morphism.target:
        raise SemanticError("target theory signature does not match the morphism")
    if not is_theory_morphism(morphism, source, target, bounds):
        raise TheoryMorphismError(
            "not a theory morphism: some translated axiom is not a target theorem"
        )
    return TheoryMorphism(morphism, source, target)


def identity_theory_morphism(theory: Theory) -> TheoryMorphism:
    return TheoryMorphism(identity_morphism(theory.sig), theory, theory)


def compose_theory_morphisms(
    f: TheoryMorphism, g: TheoryMorphism, bounds: Bounds = DEFAULT_BOUNDS
) -> TheoryMorphism:
    """Composite defined on the base signature morphisms; validity is
    re-verified semantically."""
    if f.target != g.source:
        raise SemanticError("theory morphisms not composable")
    return theory_morphism(
        compose_morphisms(f.morphism, g.morphism), f.source, g.target, bounds
    )
