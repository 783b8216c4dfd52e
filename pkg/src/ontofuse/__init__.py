"""Merge aligned ontologies by signature colimits and verify every
logical claim by exhaustive model enumeration within explicit bounds."""

from .errors import (
    ArityConflictError,
    ArityMismatchError,
    NoMediatorError,
    OntofuseError,
    ParseError,
    ResourceLimitError,
    SemanticError,
    TheoryMorphismError,
)
from .institution import (
    DEFAULT_BOUNDS,
    INSTITUTIONS,
    Bounds,
    Institution,
    SatisfactionReport,
    SentenceUniverse,
    Signature,
    SignatureMorphism,
    by_name,
    compose_morphisms,
    identity_morphism,
)
from .prop import PROP, Assignment, PropInstitution, PropSignature, eval_prop
from .eq import (
    EQ,
    EqInstitution,
    EqSignature,
    Equation,
    FiniteAlgebra,
    eval_term,
    satisfies_equation,
)
from .theories import (
    ClosedTheory,
    Theory,
    TheoryMorphism,
    close_extent,
    closure_in_universe,
    compose_theory_morphisms,
    counterexample,
    entails,
    entails_theory,
    equivalent,
    existential_image,
    extent,
    identity_theory_morphism,
    inverse_image,
    is_theory_morphism,
    join_closed,
    left_closed,
    left_entailment,
    meet,
    model_theory,
    models_of,
    right_closed,
    right_entailment,
    sentence_theory,
    theory_morphism,
)
from .fusion import (
    Cocone,
    DiagramReport,
    FusionResult,
    ShapeGraph,
    SignatureDiagram,
    TheoryDiagram,
    base_diagram,
    colimit_signature,
    fuse,
    mediating_morphism,
    validate_diagram,
)
from .fca import (
    Classification,
    ConceptLattice,
    FormalConcept,
    Infomorphism,
    check_infomorphism,
    classification_of,
    closure_quotient,
    concept_lattice,
    institution_infomorphism,
    lattice_dot,
    naturality_check,
    read_context,
    round_trip_check,
)
from .files import (
    format_model,
    format_morphism,
    format_sentence,
    format_signature,
    format_theory,
    load_diagram,
    load_document,
    load_morphism,
    load_theory,
    parse_document,
    parse_sentence,
)

__version__ = "0.1.0"
