import itertools
import os
import random

import pytest

from ontofuse.eq import EqSignature, Equation
from ontofuse.prop import PropSignature

CORPUS = os.path.join(os.path.dirname(__file__), os.pardir, "corpus")
GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def corpus_path(*parts) -> str:
    return os.path.abspath(os.path.join(CORPUS, *parts))


def golden_path(*parts) -> str:
    return os.path.abspath(os.path.join(GOLDEN, *parts))


def random_formula(rng: random.Random, atoms, depth: int):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(list(atoms) + ["true", "false"])
    op = rng.choice(("not", "and", "or", "implies", "iff"))
    if op == "not":
        return ("not", random_formula(rng, atoms, depth - 1))
    return (
        op,
        random_formula(rng, atoms, depth - 1),
        random_formula(rng, atoms, depth - 1),
    )


def random_term(rng: random.Random, sig: EqSignature, variables, depth: int):
    consts = [(n,) for n, a in sig.ops if a == 0]
    if depth == 0 or rng.random() < 0.4:
        return rng.choice(list(variables) + consts) if consts else rng.choice(list(variables))
    name, arity = rng.choice(sig.ops)
    if arity == 0:
        return (name,)
    return (name,) + tuple(
        random_term(rng, sig, variables, depth - 1) for _ in range(arity)
    )


def random_equation(rng: random.Random, sig: EqSignature, variables=("x", "y"), depth=2):
    return Equation(
        tuple(variables),
        random_term(rng, sig, variables, depth),
        random_term(rng, sig, variables, depth),
    )


def random_prop_signature(rng: random.Random, name: str, max_atoms: int, pool):
    n = rng.randint(1, max_atoms)
    return PropSignature(name, tuple(pool[:n]))


def brute_force_concepts(instances, types, incident):
    """Independent FCA oracle: filter all extent subsets by double
    derivation."""
    concepts = set()
    for r in range(len(instances) + 1):
        for subset in itertools.combinations(instances, r):
            ext = frozenset(subset)
            intent = frozenset(
                t for t in types if all(incident(m, t) for m in ext)
            )
            closed = frozenset(
                m for m in instances if all(incident(m, t) for t in intent)
            )
            if closed == ext:
                concepts.add((ext, intent))
    return concepts


@pytest.fixture
def rng():
    return random.Random(20260823)
