"""Acceptance suite: eight exact, oracle-backed criteria, each with a
pinned runtime budget and one printed PASS line."""

import itertools
import random
import time

from conftest import (
    brute_force_concepts,
    corpus_path,
    golden_path,
    random_formula,
)
from ontofuse.cli import main
from ontofuse.eq import EQ, EqSignature
from ontofuse.fca import Classification, concept_lattice, round_trip_check
from ontofuse.files import (
    format_morphism,
    format_theory,
    load_diagram,
    load_morphism,
    load_theory,
    parse_document,
)
from ontofuse.fusion import Cocone, fuse, mediating_morphism
from ontofuse.errors import NoMediatorError
from ontofuse.institution import Bounds
from ontofuse.prop import PROP, PropSignature, eval_prop
from ontofuse.theories import (
    ClosedTheory,
    Theory,
    TheoryMorphism,
    close_extent,
    closure_in_universe,
    entails_theory,
    extent,
    is_theory_morphism,
    left_closed,
    left_entailment,
    model_theory,
    models_of,
    right_closed,
    right_entailment,
    sentence_theory,
)

SRC_POOL = ("a", "b", "c", "d")
TGT_POOL = ("u", "v", "w", "z")


def budget(name: str, start: float, limit: float):
    elapsed = time.perf_counter() - start
    assert elapsed < limit, f"{name} took {elapsed:.1f}s, budget {limit}s"
    print(f"PASS: {name} ({elapsed:.1f}s < {limit}s)")


def shipped_diagrams():
    out = []
    for rel, bounds in (
        (("span", "align.dgm"), Bounds()),
        (("coeq", "align.dgm"), Bounds()),
        (("eqmerge", "align.dgm"), Bounds(max_carrier=2)),
    ):
        diagram, source = load_diagram(corpus_path(*rel))
        out.append((source.name, diagram, bounds))
    return out


def test_criterion_1_satisfaction_condition_suite():
    start = time.perf_counter()
    rng = random.Random(101)
    for i in range(200):
        ns, nt = rng.randint(1, 4), rng.randint(1, 4)
        src = PropSignature(f"src-{ns}", SRC_POOL[:ns])
        tgt = PropSignature(f"tgt-{nt}", TGT_POOL[:nt])
        mapping = {a: rng.choice(tgt.atoms) for a in src.atoms}
        report = PROP.check_satisfaction_condition(PROP.morphism(src, tgt, mapping))
        assert report.ok, f"prop morphism {i}: {len(report.violations)} violations"

    bounds = Bounds(max_carrier=2)
    eq_src_shapes = ((("f", 2),), (("g", 1),), (("f", 2), ("g", 1)))
    eq_tgt = EqSignature("tgt", (("h", 2), ("k", 1), ("m", 2)))
    by_arity = {2: ("h", "m"), 1: ("k",)}
    for i in range(50):
        ops = rng.choice(eq_src_shapes)
        src = EqSignature(f"src-{len(ops)}-{ops[0][0]}", ops)
        mapping = {n: rng.choice(by_arity[a]) for n, a in ops}
        sigma = EQ.morphism(src, eq_tgt, mapping)
        report = EQ.check_satisfaction_condition(sigma, bounds=bounds)
        assert report.ok, f"eq morphism {i}: {len(report.violations)} violations"
    budget("criterion 1 satisfaction-condition suite (200 prop + 50 eq)", start, 30.0)


def test_criterion_2_closure_laws_and_entailment_triangle():
    start = time.perf_counter()
    rng = random.Random(202)
    sig = PropSignature("abc", ("a", "b", "c"))
    universe = PROP.universe(sig, 1)
    for _ in range(500):
        ax1 = frozenset(random_formula(rng, sig.atoms, 2) for _ in range(rng.randint(0, 3)))
        t1 = Theory(sig, ax1)
        cl1 = closure_in_universe(t1, universe)
        assert ax1 <= cl1 or not (ax1 <= set(universe.sentences)), "increasing"
        assert all(a in cl1 for a in ax1 if a in universe.index), "increasing"
        t_bigger = Theory(sig, ax1 | {random_formula(rng, sig.atoms, 2)})
        assert cl1 <= closure_in_universe(t_bigger, universe), "monotone"
        assert closure_in_universe(Theory(sig, cl1), universe) == cl1, "idempotent"
    for _ in range(500):
        # axioms drawn inside the universe so the closure comparison is faithful
        t1 = Theory(sig, frozenset(random_formula(rng, sig.atoms, 1) for _ in range(2)))
        t2 = Theory(sig, frozenset(random_formula(rng, sig.atoms, 1) for _ in range(2)))
        ent = entails_theory(t1, t2)
        closure_superset = closure_in_universe(t1, universe) >= closure_in_universe(t2, universe)
        extent_inclusion = extent(t1).extent <= extent(t2).extent
        assert ent == closure_superset == extent_inclusion
    budget("criterion 2 closure laws and entailment triangle (500 + 500)", start, 10.0)


def test_criterion_3_sixteen_closed_theories():
    start = time.perf_counter()
    sig = PropSignature("pq16", ("p", "q"))
    universe = PROP.universe(sig, 2)
    models = PROP.enumerate_models(sig)
    closed = set()
    for r in range(5):
        for subset in itertools.combinations(models, r):
            ext = frozenset(subset)
            if close_extent(sig, ext, universe) == ext:
                closed.add(ext)
    assert len(closed) == 16
    assert closed == {
        frozenset(s) for r in range(5) for s in itertools.combinations(models, r)
    }
    budget("criterion 3 closed-theory count (16 over 2 atoms)", start, 1.0)


def _all_closed(sig, universe):
    models = PROP.enumerate_models(sig)
    out = []
    for r in range(len(models) + 1):
        for subset in itertools.combinations(models, r):
            ext = frozenset(subset)
            if close_extent(sig, ext, universe) == ext:
                out.append(ClosedTheory(sig, ext))
    return out


def test_criterion_4_galois_suites():
    start = time.perf_counter()
    shipped = [
        load_morphism(corpus_path("span", "f1.mor")),
        load_morphism(corpus_path("span", "f2.mor")),
        load_morphism(corpus_path("coeq", "ga.mor")),
        load_morphism(corpus_path("coeq", "gb.mor")),
    ]
    rng = random.Random(404)
    for sigma in shipped:
        assert len(sigma.source.atoms) <= 2 and len(sigma.target.atoms) <= 2
        u1 = PROP.universe(sigma.source, 2)
        u2 = PROP.universe(sigma.target, 2)
        closed1 = _all_closed(sigma.source, u1)
        closed2 = _all_closed(sigma.target, u2)
        for c1 in closed1:
            for c2 in closed2:
                lhs = left_closed(sigma, c2, u1).extent <= c1.extent
                rhs = c2.extent <= right_closed(sigma, c1).extent
                assert lhs == rhs, "adjointness"
        for m2 in PROP.enumerate_models(sigma.target):
            assert (
                model_theory(PROP.reduct(sigma, m2), u1).extent
                == left_closed(sigma, model_theory(m2, u2), u1).extent
            ), "model embedding square"
        for s1 in u1.sentences[:200]:
            assert (
                sentence_theory(PROP.translate(sigma, s1), sigma.target).extent
                == right_closed(sigma, sentence_theory(s1, sigma.source)).extent
            ), "sentence embedding square"
        for _ in range(25):
            t1 = Theory(sigma.source, frozenset({random_formula(rng, sigma.source.atoms, 2)}))
            t2 = Theory(sigma.target, frozenset({random_formula(rng, sigma.target.atoms, 2)}))
            assert (
                extent(left_entailment(sigma, t2, u1)).extent
                == left_closed(sigma, extent(t2), u1).extent
            ), "left commuting square"
            assert (
                extent(right_entailment(sigma, t1)).extent
                == right_closed(sigma, extent(t1)).extent
            ), "right commuting square"
    budget("criterion 4 Galois suites (adjointness, embeddings, squares)", start, 30.0)


def test_criterion_5_fusion_correctness():
    start = time.perf_counter()
    span, _ = load_diagram(corpus_path("span", "align.dgm"))
    result = fuse(span, apex_name="span")
    # brute force oracle over all 8 fused models
    apex = result.theory.sig
    bridge = ("implies", "p", "t")
    for m in PROP.enumerate_models(apex):
        if all(eval_prop(m, a) for a in result.theory.axioms):
            assert eval_prop(m, bridge)
    for name, diagram, bounds in shipped_diagrams():
        result = fuse(diagram, bounds, apex_name=name)
        ins = result.theory.sig.institution
        all_models = ins.enumerate_models(result.theory.sig, bounds)
        expected = set(all_models)
        for node, theory in diagram.node_theories.items():
            leg = result.signature_cocone.legs[node]
            component = models_of(theory.sig, theory.axioms, bounds)
            expected &= {m for m in all_models if ins.reduct(leg, m) in component}
        assert extent(result.theory, bounds).extent == frozenset(expected), name
        for leg in result.theory_cocone.legs.values():
            assert is_theory_morphism(leg.morphism, leg.source, leg.target, bounds)
    budget("criterion 5 fusion correctness (span bridge + extent law)", start, 5.0)


def _random_competitor(rng, diagram, result, bounds):
    """Either a commuting competitor (factor through the fusion by a random
    morphism out of the apex) or a perturbed, likely non-commuting one."""
    ins = result.theory.sig.institution
    apex = result.theory.sig
    names = apex.symbol_names()
    if ins is PROP:
        extra = PropSignature("comp", tuple(f"x{i}" for i in range(len(names) + 1)))
        post_map = {s: rng.choice(extra.atoms) for s in names}
    else:
        descs = [("p2", 2), ("q2", 2), ("p1", 1), ("q1", 1), ("p0", 0)]
        extra = EqSignature("comp", tuple(descs))
        by_arity = {0: ("p0",), 1: ("p1", "q1"), 2: ("p2", "q2")}
        post_map = {n: rng.choice(by_arity[a]) for n, a in apex.symbols()}
    post = ins.morphism(apex, extra, post_map)
    legs = {}
    from ontofuse.institution import compose_morphisms

    for node, leg in result.signature_cocone.legs.items():
        legs[node] = compose_morphisms(leg, post)
    commutes = True
    perturbed = False
    if rng.random() < 0.5 and len(legs) > 0:
        # perturb one leg symbol image
        node = rng.choice(sorted(legs))
        mapping = dict(legs[node].mapping)
        if mapping:
            sym = rng.choice(sorted(mapping))
            if ins is PROP:
                choices = [a for a in extra.atoms if a != mapping[sym]]
            else:
                arity = dict(legs[node].source.symbols())[sym]
                choices = [o for o in by_arity[arity] if o != mapping[sym]]
            if choices:
                mapping[sym] = rng.choice(choices)
                legs[node] = ins.morphism(legs[node].source, extra, mapping)
                perturbed = True
                commutes = all(
                    compose_morphisms(diagram.edge_morphisms[eid].morphism, legs[n])
                    == legs[m]
                    for eid, m, n in diagram.shape.edges
                )
    # target axioms follow the actual legs, so every leg is a valid
    # theory morphism by construction
    axioms = set()
    for node, mor in legs.items():
        for a in diagram.node_theories[node].axioms:
            axioms.add(ins.translate(mor, a))
    target = Theory(extra, frozenset(axioms))
    theory_legs = {
        node: TheoryMorphism(mor, diagram.node_theories[node], target)
        for node, mor in legs.items()
    }
    return Cocone(target, theory_legs), commutes, (None if perturbed else post)


def test_criterion_6_universality():
    start = time.perf_counter()
    rng = random.Random(606)
    for name, diagram, bounds in shipped_diagrams():
        result = fuse(diagram, bounds, apex_name=name)
        from ontofuse.institution import compose_morphisms

        for i in range(100):
            competitor, commutes, post = _random_competitor(rng, diagram, result, bounds)
            if commutes:
                mediator = mediating_morphism(result, competitor, bounds)
                if post is not None:
                    assert mediator == post
                for node, leg in result.signature_cocone.legs.items():
                    assert (
                        compose_morphisms(leg, mediator)
                        == competitor.legs[node].morphism
                    )
            else:
                try:
                    mediating_morphism(result, competitor, bounds)
                except NoMediatorError:
                    pass
                else:
                    raise AssertionError(
                        f"{name} competitor {i}: non-commuting cocone got a mediator"
                    )
    budget("criterion 6 universality (3 diagrams x 100 competitors)", start, 10.0)


def test_criterion_7_fca_oracle_equivalence():
    start = time.perf_counter()
    rng = random.Random(707)
    for _ in range(100):
        n, k = rng.randint(1, 5), rng.randint(1, 5)
        instances = tuple(f"m{i}" for i in range(n))
        types = tuple(f"s{j}" for j in range(k))
        matrix = tuple(tuple(rng.random() < 0.5 for _ in range(k)) for _ in range(n))
        c = Classification(instances, types, matrix)
        lat = concept_lattice(c)
        oracle = brute_force_concepts(instances, types, c.incident)
        assert {(x.extent, x.intent) for x in lat.concepts} == oracle
        assert round_trip_check(c).ok
    budget("criterion 7 FCA oracle equivalence (100 random contexts)", start, 20.0)


def test_criterion_8_cli_golden_suite(capsys, tmp_path):
    start = time.perf_counter()

    def run(*argv):
        code = main(list(argv))
        return code, capsys.readouterr().out

    def read(path):
        with open(path, encoding="utf-8") as handle:
            return handle.read()

    invocations = [
        (("check", corpus_path("span", "align.dgm")), 0, "check_span.out"),
        (("satcond", corpus_path("prop", "rename.mor")), 0, "satcond_rename.out"),
        (("entails", corpus_path("prop", "imp.thy"), "(implies p q)"), 0, "entails_pos.out"),
        (("entails", corpus_path("prop", "imp.thy"), "(iff p q)"), 1, "entails_neg.out"),
        (("--universe-depth", "1", "close", corpus_path("prop", "imp.thy")), 0, "close_imp_depth1.out"),
        (("--universe-depth", "1", "lattice", corpus_path("prop", "imp.thy")), 0, "lattice_imp_depth1.out"),
        (("--universe-depth", "1", "lattice", corpus_path("prop", "imp.thy"), "--dot"), 0, "lattice_imp_depth1.dot"),
        (("fca", corpus_path("contexts", "small.csv")), 0, "fca_small.out"),
        (("fca", corpus_path("contexts", "small.csv"), "--dot"), 0, "fca_small.dot"),
    ]
    for argv, want_code, golden in invocations:
        code, out = run(*argv)
        assert code == want_code, argv
        assert out == read(golden_path(golden)), argv

    merges = [
        ((), "span", ("span.thy", "span.cocone", "span.provenance"), "span_merge.out", "span_out"),
        (("--max-carrier", "2"), "eqmerge", ("eqmerge.thy", "eqmerge.cocone", "eqmerge.provenance"), "eqmerge_merge.out", "eqmerge_out"),
        ((), "coeq", ("coeq.thy", "coeq.cocone", "coeq.provenance"), "coeq_merge.out", "coeq_out"),
    ]
    for flags, name, files, stdout_golden, outdir_golden in merges:
        outdir = tmp_path / name
        code, out = run(*flags, "merge", corpus_path(name, "align.dgm"), "-o", str(outdir))
        assert code == 0
        assert out == read(golden_path(stdout_golden))
        for filename in files:
            assert read(str(outdir / filename)) == read(golden_path(outdir_golden, filename)), filename

    # parse -> print -> parse identity across the shipped corpus
    theory_files = [
        ("span", "t0.thy"), ("span", "t1.thy"), ("span", "t2.thy"),
        ("coeq", "tx.thy"), ("coeq", "tab.thy"),
        ("eqmerge", "med.thy"), ("eqmerge", "comm.thy"), ("eqmerge", "idem.thy"),
        ("prop", "imp.thy"),
    ]
    for rel in theory_files:
        theory = load_theory(corpus_path(*rel))
        printed = format_theory(theory, "T")
        reparsed = parse_document(printed, "x").theories["T"]
        assert reparsed == theory, rel
        assert format_theory(reparsed, "T") == printed, rel
    morphism_files = [
        ("span", "f1.mor"), ("span", "f2.mor"),
        ("coeq", "ga.mor"), ("coeq", "gb.mor"),
        ("eqmerge", "hf.mor"), ("eqmerge", "hg.mor"),
        ("prop", "rename.mor"),
    ]
    for rel in morphism_files:
        morphism = load_morphism(corpus_path(*rel))
        printed = format_morphism(morphism, "f")
        reparsed = parse_document(printed, "x").morphisms["f"]
        assert reparsed == morphism, rel
        assert format_morphism(reparsed, "f") == printed, rel
    budget("criterion 8 CLI golden suite and round trip", start, 10.0)
