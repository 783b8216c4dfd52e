"""Unsorted equational logic instance with bounded finite-algebra models.

Terms are variables (plain strings) or applications
``(opname, arg1, ..., argk)``; constants are 1-tuples ``("e",)``.
Sentences are equations between two terms under a declared variable list.
Models are algebras over the carrier {0, ..., c-1} with one total
operation table per operation symbol.

Entailment for this instance is relative to the bounded model class
(carrier size up to ``Bounds.max_carrier``); the semantics is exhaustive
within that bound, never proof-theoretic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ArityMismatchError, ResourceLimitError, SemanticError
from .institution import (
    DEFAULT_BOUNDS,
    Bounds,
    Institution,
    SentenceUniverse,
    Signature,
    SignatureMorphism,
    register,
)

Term = "str | tuple"


@dataclass(frozen=True)
class EqSignature(Signature):
    name: str
    ops: tuple[tuple[str, int], ...]

    def __post_init__(self):
        ops = tuple(sorted(self.ops))
        names = [n for n, _ in ops]
        if len(set(names)) != len(names):
            raise SemanticError(f"duplicate operation names in signature {self.name!r}")
        for n, arity in ops:
            if n == "=":
                raise SemanticError("operation name '=' is reserved")
            if arity < 0:
                raise SemanticError(f"operation {n!r} has negative arity")
        object.__setattr__(self, "ops", ops)

    @property
    def institution(self) -> "EqInstitution":
        return EQ

    def symbol_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.ops)

    def symbols(self) -> tuple[tuple[str, int], ...]:
        return self.ops

    @cached_property
    def arity(self) -> dict[str, int]:
        return dict(self.ops)


@dataclass(frozen=True)
class Equation:
    """lhs = rhs, universally quantified over the declared variables."""

    vars: tuple[str, ...]
    lhs: object
    rhs: object


@dataclass(frozen=True)
class FiniteAlgebra:
    """Carrier {0..carrier-1} plus one flat table per operation.

    Table entries are indexed row-major: the value at arguments
    (a1, ..., ak) sits at position a1*c^(k-1) + ... + ak.
    """

    carrier: int
    tables: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(sorted(self.tables)))

    @cached_property
    def _tables(self) -> dict[str, tuple[int, ...]]:
        return dict(self.tables)

    def op_table(self, name: str) -> tuple[int, ...]:
        return self._tables[name]

    def apply(self, name: str, args) -> int:
        idx = 0
        for a in args:
            idx = idx * self.carrier + a
        return self._tables[name][idx]


def term_vars(term) -> frozenset[str]:
    if isinstance(term, str):
        return frozenset((term,))
    out: set[str] = set()
    for sub in term[1:]:
        out |= term_vars(sub)
    return frozenset(out)


def validate_term(sig: EqSignature, variables, term) -> None:
    if isinstance(term, str):
        if term not in variables:
            raise SemanticError(f"variable {term!r} is not declared")
        return
    name = term[0]
    arity = sig.arity.get(name)
    if arity is None:
        raise SemanticError(f"operation {name!r} is not in signature {sig.name!r}")
    if len(term) - 1 != arity:
        raise SemanticError(
            f"operation {name!r} has arity {arity}, got {len(term) - 1} arguments"
        )
    for sub in term[1:]:
        validate_term(sig, variables, sub)


def validate_equation(sig: EqSignature, eq: Equation) -> None:
    if len(set(eq.vars)) != len(eq.vars):
        raise SemanticError("duplicate variable declaration")
    for v in eq.vars:
        if v in sig.arity:
            raise SemanticError(f"variable {v!r} clashes with an operation name")
    validate_term(sig, eq.vars, eq.lhs)
    validate_term(sig, eq.vars, eq.rhs)


def eval_term(algebra: FiniteAlgebra, env, term) -> int:
    """Bottom-up evaluation of a term under a variable environment."""
    if isinstance(term, str):
        return env[term]
    return algebra.apply(term[0], [eval_term(algebra, env, sub) for sub in term[1:]])


def satisfies_equation(
    algebra: FiniteAlgebra, eq: Equation, bounds: Bounds = DEFAULT_BOUNDS
) -> bool:
    """True iff lhs and rhs evaluate equal under every environment."""
    c = algebra.carrier
    n_env = c ** len(eq.vars)
    if n_env > bounds.max_envs:
        raise ResourceLimitError(
            f"{n_env} environments exceed the bound of {bounds.max_envs}"
        )
    for values in itertools.product(range(c), repeat=len(eq.vars)):
        env = dict(zip(eq.vars, values))
        if eval_term(algebra, env, eq.lhs) != eval_term(algebra, env, eq.rhs):
            return False
    return True


class EqInstitution(Institution):
    name = "eq"

    def __init__(self):
        super().__init__()
        self._model_cache: dict = {}
        self._universe_cache: dict = {}

    # ------------------------------------------------------------------

    def morphism(self, source, target, mapping) -> SignatureMorphism:
        if not isinstance(source, EqSignature) or not isinstance(target, EqSignature):
            raise SemanticError("eq morphism requires eq signatures")
        for op in mapping:
            if op not in source.arity:
                raise SemanticError(
                    f"mapped symbol {op!r} is not in signature {source.name!r}"
                )
        for op, arity in source.ops:
            if op not in mapping:
                raise SemanticError(
                    f"morphism is not total: operation {op!r} of {source.name!r} unmapped"
                )
            image = mapping[op]
            if image not in target.arity:
                raise SemanticError(
                    f"morphism target {image!r} is not in signature {target.name!r}"
                )
            if target.arity[image] != arity:
                raise ArityMismatchError(
                    f"operation {op!r} (arity {arity}) mapped to {image!r} "
                    f"(arity {target.arity[image]})"
                )
        return SignatureMorphism(source, target, tuple(sorted(mapping.items())))

    def make_signature(self, name, symbols) -> EqSignature:
        return EqSignature(name, tuple(symbols))

    def rename_symbol(self, descriptor, new_name):
        return (new_name, descriptor[1])

    def _translate_term(self, morphism, term):
        if isinstance(term, str):
            return term
        return (morphism(term[0]),) + tuple(
            self._translate_term(morphism, sub) for sub in term[1:]
        )

    def translate(self, morphism, sentence: Equation) -> Equation:
        return Equation(
            sentence.vars,
            self._translate_term(morphism, sentence.lhs),
            self._translate_term(morphism, sentence.rhs),
        )

    def reduct(self, morphism, model: FiniteAlgebra) -> FiniteAlgebra:
        return FiniteAlgebra(
            model.carrier,
            tuple((op, model.op_table(image)) for op, image in morphism.mapping),
        )

    def satisfies(self, sig, model, sentence) -> bool:
        return satisfies_equation(model, sentence)

    def model_count(self, sig: EqSignature, max_carrier: int) -> int:
        total = 0
        for c in range(1, max_carrier + 1):
            count = 1
            for _, arity in sig.ops:
                count *= c ** (c ** arity)
            total += count
        return total

    def enumerate_models(self, sig, bounds=DEFAULT_BOUNDS) -> tuple[FiniteAlgebra, ...]:
        key = (sig, bounds.max_carrier, bounds.max_models)
        hit = self._model_cache.get(key)
        if hit is not None:
            return hit
        total = self.model_count(sig, bounds.max_carrier)
        if total > bounds.max_models:
            raise ResourceLimitError(
                f"{total} algebras exceed the enumeration bound of {bounds.max_models}"
            )
        names = sig.symbol_names()
        models = []
        for c in range(1, bounds.max_carrier + 1):
            per_op = [
                itertools.product(range(c), repeat=c ** sig.arity[n]) for n in names
            ]
            for combo in itertools.product(*per_op):
                models.append(
                    FiniteAlgebra(c, tuple(zip(names, combo)))
                )
        models = tuple(models)
        self._model_cache[key] = models
        return models

    def universe(
        self, sig, depth=None, extra=(), bounds=DEFAULT_BOUNDS, variables=("x", "y")
    ) -> SentenceUniverse:
        d = bounds.universe_depth if depth is None else depth
        variables = tuple(variables)
        key = (sig, d, tuple(extra), variables)
        hit = self._universe_cache.get(key)
        if hit is not None:
            return hit
        terms: list = list(variables) + [(n,) for n, a in sig.ops if a == 0]
        seen = set(terms)
        for _ in range(d):
            layer = list(terms)
            for name, arity in sig.ops:
                if arity == 0:
                    continue
                for args in itertools.product(layer, repeat=arity):
                    t = (name,) + args
                    if t not in seen:
                        seen.add(t)
                        terms.append(t)
        sentences: list = []
        for i, lhs in enumerate(terms):
            for rhs in terms[i:]:
                sentences.append(Equation(variables, lhs, rhs))
        sentence_set = set(sentences)
        for s in extra:
            validate_equation(sig, s)
            if s not in sentence_set:
                sentence_set.add(s)
                sentences.append(s)
        universe = SentenceUniverse(
            sig, tuple(sentences), f"eq-depth-{d}-vars-{len(variables)}"
        )
        if len(self._universe_cache) >= 32:
            self._universe_cache.pop(next(iter(self._universe_cache)))
        self._universe_cache[key] = universe
        return universe

    # ------------------------------------------------------------------
    # vectorized bulk evaluation, grouped by carrier size

    def truth_table(self, sig, sentences, models):
        ns, nm = len(sentences), len(models)
        out = np.empty((ns, nm), dtype=bool)
        if ns == 0 or nm == 0:
            return out
        all_vars = sorted({v for eq in sentences for v in eq.vars})
        var_pos = {v: i for i, v in enumerate(all_vars)}

        # shared term DAG over all left/right-hand sides
        index: dict = {}
        nodes: list = []  # (opname or None, child index tuple, var position)

        def intern(term) -> int:
            got = index.get(term)
            if got is not None:
                return got
            stack = [term]
            while stack:
                t = stack[-1]
                if t in index:
                    stack.pop()
                    continue
                if isinstance(t, str):
                    index[t] = len(nodes)
                    nodes.append((None, (), var_pos[t]))
                    stack.pop()
                    continue
                pending = [sub for sub in t[1:] if sub not in index]
                if pending:
                    stack.extend(pending)
                    continue
                index[t] = len(nodes)
                nodes.append((t[0], tuple(index[sub] for sub in t[1:]), -1))
                stack.pop()
            return index[term]

        lhs_idx = np.fromiter((intern(eq.lhs) for eq in sentences), dtype=np.intp, count=ns)
        rhs_idx = np.fromiter((intern(eq.rhs) for eq in sentences), dtype=np.intp, count=ns)

        for c in sorted({m.carrier for m in models}):
            cols = [j for j, m in enumerate(models) if m.carrier == c]
            envs = list(itertools.product(range(c), repeat=len(all_vars)))
            ne = len(envs)
            env_arr = np.asarray(envs, dtype=np.int64).reshape(ne, len(all_vars))
            values = np.empty((len(nodes), len(cols), ne), dtype=np.int64)
            for i, (opname, children, vpos) in enumerate(nodes):
                if opname is None:
                    values[i] = env_arr[:, vpos][None, :]
                    continue
                table = np.asarray(
                    [models[j].op_table(opname) for j in cols], dtype=np.int64
                )
                if not children:
                    values[i] = table[:, 0][:, None]
                    continue
                idx = values[children[0]].copy()
                for child in children[1:]:
                    idx *= c
                    idx += values[child]
                values[i] = np.take_along_axis(table, idx, axis=1)
            equal = values[lhs_idx] == values[rhs_idx]
            out[:, cols] = equal.all(axis=2)
        return out


EQ = register(EqInstitution())
