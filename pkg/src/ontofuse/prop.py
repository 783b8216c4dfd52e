"""Propositional logic instance.

Sentences are plain nested tuples over atom names:
``"p"``, ``"true"``, ``"false"``, ``("not", f)``, ``("and", f, g)``,
``("or", f, g)``, ``("implies", f, g)``, ``("iff", f, g)``.
Models are total 0/1 assignments of the signature's atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ResourceLimitError, SemanticError
from .institution import (
    DEFAULT_BOUNDS,
    Bounds,
    Institution,
    Sentence,
    SentenceUniverse,
    Signature,
    SignatureMorphism,
    register,
)

CONNECTIVES = ("not", "and", "or", "implies", "iff")
RESERVED = frozenset(CONNECTIVES) | {"true", "false", "="}


@dataclass(frozen=True)
class PropSignature(Signature):
    name: str
    atoms: tuple[str, ...]

    def __post_init__(self):
        atoms = tuple(sorted(self.atoms))
        if len(set(atoms)) != len(atoms):
            raise SemanticError(f"duplicate atoms in signature {self.name!r}")
        for a in atoms:
            if a in RESERVED:
                raise SemanticError(f"atom name {a!r} is reserved")
        object.__setattr__(self, "atoms", atoms)

    @property
    def institution(self) -> "PropInstitution":
        return PROP

    def symbol_names(self) -> tuple[str, ...]:
        return self.atoms

    def symbols(self) -> tuple[str, ...]:
        return self.atoms


@dataclass(frozen=True)
class Assignment:
    """Total truth assignment, canonically sorted by atom name."""

    values: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if list(self.values) != sorted(self.values):
            object.__setattr__(self, "values", tuple(sorted(self.values)))

    @classmethod
    def from_dict(cls, values: dict[str, int]) -> "Assignment":
        return cls(tuple(sorted((a, int(bool(v))) for a, v in values.items())))

    @cached_property
    def _dict(self) -> dict[str, int]:
        return dict(self.values)

    def value(self, atom: str) -> int:
        return self._dict[atom]

    def bits(self) -> str:
        return "".join(str(v) for _, v in self.values)


def formula_atoms(formula: Sentence) -> frozenset[str]:
    if isinstance(formula, str):
        return frozenset() if formula in ("true", "false") else frozenset((formula,))
    out: set[str] = set()
    for sub in formula[1:]:
        out |= formula_atoms(sub)
    return frozenset(out)


def validate_formula(sig: PropSignature, formula: Sentence) -> None:
    if isinstance(formula, str):
        if formula in ("true", "false"):
            return
        if formula not in sig.atoms:
            raise SemanticError(
                f"atom {formula!r} is not in signature {sig.name!r}"
            )
        return
    op = formula[0]
    if op == "not":
        if len(formula) != 2:
            raise SemanticError("'not' takes exactly one argument")
    elif op in ("and", "or", "implies", "iff"):
        if len(formula) != 3:
            raise SemanticError(f"{op!r} takes exactly two arguments")
    else:
        raise SemanticError(f"unknown connective {op!r}")
    for sub in formula[1:]:
        validate_formula(sig, sub)


def eval_prop(model, formula: Sentence) -> bool:
    """Classical truth-table evaluation.  ``model`` is an Assignment or a
    plain mapping from atoms to truth values."""
    get = model.value if isinstance(model, Assignment) else model.__getitem__
    return _eval(get, formula)


def _eval(get, f) -> bool:
    if isinstance(f, str):
        if f == "true":
            return True
        if f == "false":
            return False
        return bool(get(f))
    op = f[0]
    if op == "not":
        return not _eval(get, f[1])
    a = _eval(get, f[1])
    b = _eval(get, f[2])
    if op == "and":
        return a and b
    if op == "or":
        return a or b
    if op == "implies":
        return (not a) or b
    if op == "iff":
        return a == b
    raise SemanticError(f"unknown connective {op!r}")


class PropInstitution(Institution):
    name = "prop"

    def __init__(self):
        super().__init__()
        self._model_cache: dict = {}
        self._universe_cache: dict = {}

    # ------------------------------------------------------------------

    def morphism(self, source, target, mapping) -> SignatureMorphism:
        if not isinstance(source, PropSignature) or not isinstance(target, PropSignature):
            raise SemanticError("prop morphism requires prop signatures")
        for atom in mapping:
            if atom not in source.atoms:
                raise SemanticError(
                    f"mapped symbol {atom!r} is not in signature {source.name!r}"
                )
        for atom in source.atoms:
            if atom not in mapping:
                raise SemanticError(
                    f"morphism is not total: atom {atom!r} of {source.name!r} unmapped"
                )
            if mapping[atom] not in target.atoms:
                raise SemanticError(
                    f"morphism target {mapping[atom]!r} is not in signature {target.name!r}"
                )
        return SignatureMorphism(source, target, tuple(sorted(mapping.items())))

    def make_signature(self, name, symbols) -> PropSignature:
        return PropSignature(name, tuple(symbols))

    def rename_symbol(self, descriptor, new_name):
        return new_name

    def translate(self, morphism, sentence):
        if isinstance(sentence, str):
            if sentence in ("true", "false"):
                return sentence
            return morphism(sentence)
        op = sentence[0]
        if op == "not":
            return ("not", self.translate(morphism, sentence[1]))
        return (op, self.translate(morphism, sentence[1]), self.translate(morphism, sentence[2]))

    def reduct(self, morphism, model: Assignment) -> Assignment:
        return Assignment(tuple((a, model.value(y)) for a, y in morphism.mapping))

    def satisfies(self, sig, model, sentence) -> bool:
        return eval_prop(model, sentence)

    def enumerate_models(self, sig, bounds=DEFAULT_BOUNDS) -> tuple[Assignment, ...]:
        key = (sig, bounds.max_prop_atoms, bounds.max_models)
        hit = self._model_cache.get(key)
        if hit is not None:
            return hit
        n = len(sig.atoms)
        if n > bounds.max_prop_atoms or (1 << n) > bounds.max_models:
            raise ResourceLimitError(
                f"{n} atoms exceed the enumeration bounds ({bounds.max_prop_atoms} atoms)"
            )
        atoms = sig.atoms
        models = tuple(
            Assignment(tuple((a, (i >> (n - 1 - k)) & 1) for k, a in enumerate(atoms)))
            for i in range(1 << n)
        )
        self._model_cache[key] = models
        return models

    def universe(self, sig, depth=None, extra=(), bounds=DEFAULT_BOUNDS) -> SentenceUniverse:
        d = bounds.universe_depth if depth is None else depth
        key = (sig, d, tuple(extra))
        hit = self._universe_cache.get(key)
        if hit is not None:
            return hit
        seen: set = set()
        out: list = []

        def add(f):
            if f not in seen:
                seen.add(f)
                out.append(f)

        for a in sig.atoms:
            add(a)
        add("true")
        add("false")
        for _ in range(d):
            layer = list(out)
            for f in layer:
                add(("not", f))
            for op in ("and", "or", "implies", "iff"):
                for f in layer:
                    for g in layer:
                        add((op, f, g))
        for s in extra:
            validate_formula(sig, s)
            add(s)
        universe = SentenceUniverse(sig, tuple(out), f"prop-depth-{d}")
        if len(self._universe_cache) >= 32:
            self._universe_cache.pop(next(iter(self._universe_cache)))
        self._universe_cache[key] = universe
        return universe

    # ------------------------------------------------------------------
    # vectorized bulk evaluation over the shared subformula DAG

    _NOT, _AND, _OR, _IMPLIES, _IFF, _LEAF = range(6)
    _OPCODE = {"not": _NOT, "and": _AND, "or": _OR, "implies": _IMPLIES, "iff": _IFF}

    def truth_table(self, sig, sentences, models):
        nm = len(models)
        ns = len(sentences)
        if ns == 0 or nm == 0:
            return np.empty((ns, nm), dtype=bool)
        atom_rows = {
            a: np.fromiter((m.value(a) for m in models), dtype=bool, count=nm)
            for a in sig.atoms
        }
        index: dict = {}
        kinds: list[int] = []
        lefts: list[int] = []
        rights: list[int] = []
        levels: list[int] = []
        leaf_rows: list = []
        opcode = self._OPCODE

        for top in sentences:
            if top in index:
                continue
            stack = [top]
            while stack:
                f = stack[-1]
                if f in index:
                    stack.pop()
                    continue
                if isinstance(f, str):
                    if f == "true":
                        row = np.ones(nm, dtype=bool)
                    elif f == "false":
                        row = np.zeros(nm, dtype=bool)
                    else:
                        try:
                            row = atom_rows[f]
                        except KeyError:
                            raise SemanticError(
                                f"atom {f!r} is not in signature {sig.name!r}"
                            ) from None
                    index[f] = len(kinds)
                    kinds.append(self._LEAF)
                    lefts.append(len(leaf_rows))
                    rights.append(0)
                    levels.append(0)
                    leaf_rows.append(row)
                    stack.pop()
                    continue
                ready = True
                for sub in f[:0:-1]:
                    if sub not in index:
                        stack.append(sub)
                        ready = False
                if not ready:
                    continue
                li = index[f[1]]
                ri = index[f[-1]]
                index[f] = len(kinds)
                kinds.append(opcode[f[0]])
                lefts.append(li)
                rights.append(ri)
                levels.append(1 + max(levels[li], levels[ri]))
                stack.pop()

        n_nodes = len(kinds)
        kind_arr = np.asarray(kinds, dtype=np.int8)
        left_arr = np.asarray(lefts, dtype=np.intp)
        right_arr = np.asarray(rights, dtype=np.intp)
        level_arr = np.asarray(levels, dtype=np.int32)
        table = np.empty((n_nodes, nm), dtype=bool)
        leaf_ids = np.nonzero(kind_arr == self._LEAF)[0]
        table[leaf_ids] = np.asarray(leaf_rows, dtype=bool)[left_arr[leaf_ids]]
        for level in range(1, int(level_arr.max(initial=0)) + 1):
            at_level = level_arr == level
            for code in (self._NOT, self._AND, self._OR, self._IMPLIES, self._IFF):
                ids = np.nonzero(at_level & (kind_arr == code))[0]
                if ids.size == 0:
                    continue
                lhs = table[left_arr[ids]]
                if code == self._NOT:
                    table[ids] = ~lhs
                    continue
                rhs = table[right_arr[ids]]
                if code == self._AND:
                    table[ids] = lhs & rhs
                elif code == self._OR:
                    table[ids] = lhs | rhs
                elif code == self._IMPLIES:
                    table[ids] = ~lhs | rhs
                else:
                    table[ids] = lhs == rhs
        roots = np.fromiter((index[s] for s in sentences), dtype=np.intp, count=ns)
        return table[roots]


PROP = register(PropInstitution())
