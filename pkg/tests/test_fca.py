import random

import pytest

from conftest import brute_force_concepts, corpus_path
from ontofuse.errors import SemanticError
from ontofuse.fca import (
    Classification,
    FormalConcept,
    Infomorphism,
    check_infomorphism,
    classification_of,
    closure_quotient,
    concept_lattice,
    extent_bits,
    institution_infomorphism,
    lattice_dot,
    naturality_check,
    read_context,
    round_trip_check,
)
from ontofuse.institution import SentenceUniverse, identity_morphism
from ontofuse.prop import PROP, PropSignature
from ontofuse.theories import Theory

PQ = PropSignature("PQ", ("p", "q"))
SMALL_U = SentenceUniverse(PQ, ("p", "q", ("and", "p", "q")), "small")


def lattice_concepts(lat):
    return {(c.extent, c.intent) for c in lat.concepts}


def test_classification_of_diagonal():
    sig = PropSignature("P1", ("p",))
    u = SentenceUniverse(sig, ("p", ("not", "p")), "pair")
    c = classification_of(sig, u)
    assert len(c.instances) == 2
    col_p = [c.incident(m, "p") for m in c.instances]
    col_np = [c.incident(m, ("not", "p")) for m in c.instances]
    assert col_np == [not v for v in col_p]


def test_classification_of_empty_signature():
    sig = PropSignature("E", ())
    u = SentenceUniverse(sig, ("true",), "t")
    c = classification_of(sig, u)
    assert len(c.instances) == 1


def test_classification_shape_mismatch():
    with pytest.raises(SemanticError):
        Classification(("m",), ("s", "t"), ((True,),))


def test_institution_infomorphism_passes_fundamental_condition():
    s2 = PropSignature("S2", ("a", "b", "c"))
    sigma = PROP.morphism(PQ, s2, {"p": "a", "q": "c"})
    u = PROP.universe(PQ, 1)
    info, src, tgt = institution_infomorphism(sigma, u)
    report = check_infomorphism(info, src, tgt)
    assert report.ok
    assert report.checked == len(tgt.instances) * len(src.types)


def test_mutated_type_map_is_caught():
    s2 = PropSignature("S2", ("a", "b", "c"))
    sigma = PROP.morphism(PQ, s2, {"p": "a", "q": "c"})
    u = PROP.universe(PQ, 1)
    info, src, tgt = institution_infomorphism(sigma, u)
    broken = dict(info.type_map)
    broken["p"] = ("not", "a")
    tgt2_sentences = tuple(dict.fromkeys(list(tgt.types) + [("not", "a")]))
    tgt2 = classification_of(s2, SentenceUniverse(s2, tgt2_sentences, "mut"))
    report = check_infomorphism(Infomorphism(info.instance_map, broken), src, tgt2)
    assert not report.ok
    assert any(s1 == "p" for _, s1 in report.violations)


def test_concept_lattice_matches_brute_force_small():
    c = classification_of(PQ, SMALL_U)
    lat = concept_lattice(c)
    oracle = brute_force_concepts(c.instances, c.types, c.incident)
    assert lattice_concepts(lat) == oracle


def test_concept_lattice_random_contexts_match_oracle():
    rng = random.Random(99)
    for _ in range(30):
        n, k = rng.randint(1, 5), rng.randint(1, 5)
        instances = tuple(f"m{i}" for i in range(n))
        types = tuple(f"s{j}" for j in range(k))
        matrix = tuple(
            tuple(rng.random() < 0.5 for _ in range(k)) for _ in range(n)
        )
        c = Classification(instances, types, matrix)
        lat = concept_lattice(c)
        oracle = brute_force_concepts(instances, types, c.incident)
        assert lattice_concepts(lat) == oracle
        assert round_trip_check(c).ok


def test_full_incidence_single_concept():
    c = Classification(("m",), ("s",), ((True,),))
    lat = concept_lattice(c)
    assert len(lat.concepts) == 1


def test_partial_one_by_one_two_concepts():
    c = Classification(("m",), ("s",), ((False,),))
    lat = concept_lattice(c)
    assert len(lat.concepts) == 2


def test_tautology_never_changes_concept_count():
    c = classification_of(PQ, SMALL_U)
    with_taut = classification_of(
        PQ, SentenceUniverse(PQ, SMALL_U.sentences + ("true",), "taut")
    )
    assert len(concept_lattice(c).concepts) == len(concept_lattice(with_taut).concepts)


def test_lattice_order_meet_join_top_bottom():
    c = classification_of(PQ, SMALL_U)
    lat = concept_lattice(c)
    assert lat.top.extent == frozenset(c.instances)
    assert all(lat.leq(lat.bottom, x) and lat.leq(x, lat.top) for x in lat.concepts)
    for a in lat.concepts:
        for b in lat.concepts:
            m = lat.meet((a, b))
            assert m.extent == a.extent & b.extent
            j = lat.join((a, b))
            assert lat.leq(a, j) and lat.leq(b, j)
            for other in lat.concepts:
                if lat.leq(a, other) and lat.leq(b, other):
                    assert lat.leq(j, other)


def test_round_trip_on_institution_classification():
    c = classification_of(PQ, PROP.universe(PQ, 1))
    assert round_trip_check(c).ok


def test_round_trip_empty_types():
    c = Classification(("m1", "m2"), (), ((), ()))
    assert round_trip_check(c).ok


def test_closure_quotient_identifies_equivalents():
    u = SentenceUniverse(PQ, ("p", "q", ("and", "p", "q"), ("or", "p", "q")), "u")
    t1 = Theory(PQ, {"p", "q"})
    t2 = Theory(PQ, {("and", "p", "q")})
    t3 = Theory(PQ, {("or", "p", "q")})
    out = closure_quotient(PQ, u, [t1, t2, t3])
    assert out[t1] == out[t2]
    assert out[t1] != out[t3]
    assert isinstance(out[t1], FormalConcept)


def test_closure_quotient_rejects_foreign_axiom():
    u = SentenceUniverse(PQ, ("p",), "u")
    with pytest.raises(SemanticError):
        closure_quotient(PQ, u, [Theory(PQ, {("not", "p")})])


def test_naturality_identity_and_inclusion(rng):
    p = PropSignature("P", ("p",))
    inc = PROP.morphism(p, PQ, {"p": "p"})
    u1 = PROP.universe(p, 1)
    src_theories = [Theory(p, frozenset({s})) for s in u1.sentences[:10]]
    tgt_theories = [Theory(PQ, frozenset({s})) for s in PROP.universe(PQ, 1).sentences[:10]]
    report = naturality_check(inc, u1, src_theories, tgt_theories)
    assert report.ok
    ident = identity_morphism(PQ)
    u2 = PROP.universe(PQ, 1)
    report = naturality_check(ident, u2, tgt_theories, tgt_theories)
    assert report.ok


def test_naturality_catches_mutated_right_operator():
    from ontofuse.theories import Theory as Th

    p = PropSignature("P", ("p",))
    inc = PROP.morphism(p, PQ, {"p": "p"})
    u1 = PROP.universe(p, 1)

    def broken_right(morphism, t1):
        return Th(morphism.target, frozenset())

    report = naturality_check(
        inc,
        u1,
        [Theory(p, {"p"})],
        [],
        right_entailment_op=broken_right,
    )
    assert not report.ok
    assert report.failures[0][0] == "right"


def test_read_context_and_errors():
    c = read_context("x,a,b\nm1,1,0\nm2,0,1\n")
    assert c.instances == ("m1", "m2")
    assert c.types == ("a", "b")
    assert c.incident("m1", "a") and not c.incident("m1", "b")
    with pytest.raises(SemanticError):
        read_context("x,a\nm1,2\n")
    with pytest.raises(SemanticError):
        read_context("x,a\nm1,1,0\n")


def test_shipped_context_lattice():
    with open(corpus_path("contexts", "small.csv"), encoding="utf-8") as handle:
        c = read_context(handle.read())
    lat = concept_lattice(c)
    oracle = brute_force_concepts(c.instances, c.types, c.incident)
    assert lattice_concepts(lat) == oracle
    assert round_trip_check(c).ok
    assert len(lat.concepts) == 10


def test_dot_output_is_stable_and_well_formed():
    with open(corpus_path("contexts", "small.csv"), encoding="utf-8") as handle:
        c = read_context(handle.read())
    lat = concept_lattice(c)
    dot1 = lattice_dot(lat)
    dot2 = lattice_dot(concept_lattice(c))
    assert dot1 == dot2
    assert dot1.startswith("digraph lattice {")
    assert dot1.rstrip().endswith("}")
    top_bits = extent_bits(lat, lat.top)
    assert f'"{top_bits}"' in dot1


def test_cover_edges_are_hasse():
    c = classification_of(PQ, SMALL_U)
    lat = concept_lattice(c)
    for lower, upper in lat.covers():
        assert lower.extent < upper.extent
        for mid in lat.concepts:
            assert not (lower.extent < mid.extent < upper.extent)
