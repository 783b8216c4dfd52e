"""Abstract logical-system interface.

A logic instance supplies signatures, signature morphisms, sentences,
models, a satisfaction relation, sentence translation and model reduct.
Everything downstream (entailment, closures, Galois connections, colimit
fusion, concept lattices) is written against this interface and works for
any instance whose model class is exhaustively enumerable within bounds.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable

import numpy as np

from .errors import SemanticError

Sentence = Hashable
Model = Hashable


@dataclass(frozen=True)
class Bounds:
    """Explicit resource limits for model and sentence enumeration."""

    max_prop_atoms: int = 20
    max_carrier: int = 3
    universe_depth: int = 2
    max_models: int = 1 << 20
    max_envs: int = 1 << 12


DEFAULT_BOUNDS = Bounds()


class Signature(ABC):
    """Finite symbol inventory.  Concrete instances add their payload."""

    name: str

    @property
    @abstractmethod
    def institution(self) -> "Institution":
        ...

    @abstractmethod
    def symbol_names(self) -> tuple[str, ...]:
        ...

    @abstractmethod
    def symbols(self) -> tuple:
        """Symbol descriptors (instance-specific payload, e.g. name or
        (name, arity) pairs), in a deterministic order."""


@dataclass(frozen=True)
class SignatureMorphism:
    """Total symbol mapping between two signatures of one instance.

    ``mapping`` is kept as a sorted tuple of (source, target) pairs so
    morphisms are hashable and comparable.  Build validated morphisms via
    ``Institution.morphism``.
    """

    source: Signature
    target: Signature
    mapping: tuple[tuple[str, str], ...]

    @cached_property
    def map(self) -> dict[str, str]:
        return dict(self.mapping)

    def __call__(self, symbol: str) -> str:
        try:
            return self.map[symbol]
        except KeyError:
            raise SemanticError(
                f"symbol {symbol!r} is not in source signature {self.source.name!r}"
            ) from None


def identity_morphism(sig: Signature) -> SignatureMorphism:
    return SignatureMorphism(sig, sig, tuple((s, s) for s in sig.symbol_names()))


def compose_morphisms(f: SignatureMorphism, g: SignatureMorphism) -> SignatureMorphism:
    """Composite f;g of f : A -> B and g : B -> C."""
    if f.target != g.source:
        raise SemanticError(
            f"morphisms not composable: target {f.target.name!r} != source {g.source.name!r}"
        )
    return SignatureMorphism(
        f.source, g.target, tuple(sorted((x, g.map[y]) for x, y in f.mapping))
    )


@dataclass(frozen=True)
class SatisfactionReport:
    """Outcome of exhaustively checking truth-invariance of a morphism."""

    morphism: SignatureMorphism
    checked: int
    violations: tuple[tuple[Model, Sentence], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


_universe_counter = itertools.count()


@dataclass(frozen=True)
class SentenceUniverse:
    """A declared finite fragment of the sentences over a signature.

    Closures and intents are always computed relative to such a universe.
    ``uid`` identifies the universe for caching and takes no part in
    equality.
    """

    sig: Signature
    sentences: tuple[Sentence, ...]
    spec: str
    uid: int = field(
        default_factory=lambda: next(_universe_counter), compare=False, repr=False
    )

    def __len__(self) -> int:
        return len(self.sentences)

    @cached_property
    def index(self) -> dict[Sentence, int]:
        return {s: i for i, s in enumerate(self.sentences)}


class Institution(ABC):
    """One logic: signatures, sentences, models, satisfaction, and the
    covariant/contravariant actions of signature morphisms on them."""

    name: str

    def __init__(self):
        self._table_cache: dict = {}

    # ------------------------------------------------------------------
    # instance responsibilities

    @abstractmethod
    def morphism(
        self, source: Signature, target: Signature, mapping: dict[str, str]
    ) -> SignatureMorphism:
        """Build a validated signature morphism (totality, symbol
        existence, instance-specific compatibility such as arities)."""

    @abstractmethod
    def make_signature(self, name: str, symbols) -> Signature:
        """Build a signature from symbol descriptors (see Signature.symbols)."""

    @abstractmethod
    def rename_symbol(self, descriptor, new_name: str):
        """Return the descriptor with its name replaced."""

    @abstractmethod
    def translate(self, morphism: SignatureMorphism, sentence: Sentence) -> Sentence:
        """Covariant sentence translation along a morphism."""

    @abstractmethod
    def reduct(self, morphism: SignatureMorphism, model: Model) -> Model:
        """Contravariant model reduct along a morphism."""

    @abstractmethod
    def satisfies(self, sig: Signature, model: Model, sentence: Sentence) -> bool:
        ...

    @abstractmethod
    def enumerate_models(
        self, sig: Signature, bounds: Bounds = DEFAULT_BOUNDS
    ) -> tuple[Model, ...]:
        """Exhaustive, duplicate-free, deterministically ordered model class."""

    @abstractmethod
    def universe(
        self,
        sig: Signature,
        depth: int | None = None,
        extra: tuple[Sentence, ...] = (),
        bounds: Bounds = DEFAULT_BOUNDS,
    ) -> SentenceUniverse:
        """Default finite sentence universe at the given depth, augmented
        with the ``extra`` sentences."""

    # ------------------------------------------------------------------
    # bulk evaluation (instances override with vectorized versions)

    def truth_table(
        self, sig: Signature, sentences, models
    ) -> np.ndarray:
        """Boolean matrix of shape (len(sentences), len(models))."""
        out = np.empty((len(sentences), len(models)), dtype=bool)
        for i, s in enumerate(sentences):
            for j, m in enumerate(models):
                out[i, j] = self.satisfies(sig, m, s)
        return out

    def universe_table(
        self, universe: SentenceUniverse, bounds: Bounds = DEFAULT_BOUNDS
    ) -> tuple[tuple[Model, ...], np.ndarray]:
        """Enumerated models of the universe's signature together with the
        cached truth table of all universe sentences over them."""
        key = (universe.uid, bounds)
        hit = self._table_cache.get(key)
        if hit is not None:
            return hit
        models = self.enumerate_models(universe.sig, bounds)
        table = self.truth_table(universe.sig, universe.sentences, models)
        if len(self._table_cache) >= 64:
            self._table_cache.pop(next(iter(self._table_cache)))
        self._table_cache[key] = (models, table)
        return models, table

    # ------------------------------------------------------------------
    # the satisfaction condition, checked exhaustively

    def check_satisfaction_condition(
        self,
        morphism: SignatureMorphism,
        universe: SentenceUniverse | None = None,
        bounds: Bounds = DEFAULT_BOUNDS,
    ) -> SatisfactionReport:
        """Check reduct(m2) |= s1  iff  m2 |= translate(s1) for every
        enumerated target model m2 and every source-universe sentence s1."""
        src, tgt = morphism.source, morphism.target
        if universe is None:
            universe = self.universe(src, bounds.universe_depth, bounds=bounds)
        elif universe.sig != src:
            raise SemanticError("universe signature does not match morphism source")
        tmodels = self.enumerate_models(tgt, bounds)
        checked = len(tmodels) * len(universe.sentences)
        if not tmodels or not universe.sentences:
            return SatisfactionReport(morphism, checked, ())
        smodels, src_table = self.universe_table(universe, bounds)
        sindex = {m: i for i, m in enumerate(smodels)}
        reduct_idx = np.fromiter(
            (sindex[self.reduct(morphism, m)] for m in tmodels),
            dtype=np.intp,
            count=len(tmodels),
        )
        translated = [self.translate(morphism, s) for s in universe.sentences]
        tgt_table = self.truth_table(tgt, translated, tmodels)
        pulled_back = src_table[:, reduct_idx]
        bad_s, bad_m = np.nonzero(pulled_back != tgt_table)
        violations = tuple(
            (tmodels[j], universe.sentences[i])
            for i, j in zip(bad_s.tolist(), bad_m.tolist())
        )
        return SatisfactionReport(morphism, checked, violations)


INSTITUTIONS: dict[str, Institution] = {}


def register(institution: Institution) -> Institution:
    INSTITUTIONS[institution.name] = institution
    return institution


def by_name(name: str) -> Institution:
    try:
        return INSTITUTIONS[name]
    except KeyError:
        raise SemanticError(f"unknown institution {name!r}") from None
