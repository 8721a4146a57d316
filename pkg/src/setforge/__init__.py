"""Extensional digraphs, deficiency completion, and a tiny membership logic."""

from .completion import (
    Budget,
    DEFAULT_BUDGET,
    LeveledUniverse,
    WitnessFailure,
    WitnessReport,
    affordable_levels,
    complete,
    complete_step,
    deficiency,
    witness_report,
)
from .document import FORMAT_VERSION, GraphDocument, deserialize, serialize
from .dot import to_dot
from .dred import (
    Dred,
    DredLeveledUniverse,
    DredReport,
    DredViolation,
    bounded_deficiency,
    dred_complete,
    dred_from_graph,
    foundation_witness,
    require_dred,
    verify_dred,
)
from .errors import (
    BudgetExceededError,
    DecorationError,
    DredConditionError,
    FormulaError,
    NonExtensionalError,
    ParseError,
    SchemaError,
    SeedClashError,
    SetforgeError,
    SizeLimitError,
    SpecValidationError,
    UnknownNodeError,
)
from .graph import (
    Code,
    Deficiency,
    ExtensionalDigraph,
    Provenance,
    Seed,
    canonical_fingerprint,
    extension,
    extensionality_violation,
    is_end_extension,
    is_extensional,
    is_isomorphic,
    require_extensional,
    subset_node_id,
)
from .logic import (
    AXIOM_NAMES,
    And,
    AxiomReport,
    ComprehensionReport,
    Equal,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Member,
    Not,
    Or,
    Var,
    chain_code_formula,
    check_axiom,
    comprehension_instance,
    define_class,
    eval_formula,
    free_variables,
    parse,
    print_formula,
    quine_code_formula,
)
from .oracle import (
    ComparisonVerdict,
    atom,
    collection,
    compare,
    decorate,
    hf_universe,
    loop_code,
    oracle_complete,
    value_extension,
    values_to_graph,
)
from .seeds import (
    AssembledSeed,
    AtomDecl,
    CodeIndex,
    CodeSpec,
    TupleDecl,
    assemble,
    attach_codes,
    chain_atoms,
    encode_tuple,
    numeral_ids,
    quine_atoms,
    von_neumann_seed,
)

__all__ = [
    "AXIOM_NAMES",
    "AssembledSeed",
    "AtomDecl",
    "And",
    "AxiomReport",
    "Budget",
    "BudgetExceededError",
    "Code",
    "CodeIndex",
    "CodeSpec",
    "ComparisonVerdict",
    "Equal",
    "Exists",
    "ForAll",
    "Formula",
    "ComprehensionReport",
    "DEFAULT_BUDGET",
    "DecorationError",
    "Deficiency",
    "Dred",
    "DredConditionError",
    "DredLeveledUniverse",
    "DredReport",
    "DredViolation",
    "ExtensionalDigraph",
    "FORMAT_VERSION",
    "FormulaError",
    "GraphDocument",
    "Iff",
    "Implies",
    "Member",
    "LeveledUniverse",
    "NonExtensionalError",
    "Not",
    "Or",
    "ParseError",
    "Provenance",
    "SchemaError",
    "Seed",
    "SeedClashError",
    "SetforgeError",
    "SizeLimitError",
    "SpecValidationError",
    "TupleDecl",
    "UnknownNodeError",
    "Var",
    "WitnessFailure",
    "WitnessReport",
    "affordable_levels",
    "assemble",
    "atom",
    "attach_codes",
    "bounded_deficiency",
    "canonical_fingerprint",
    "chain_atoms",
    "chain_code_formula",
    "check_axiom",
    "collection",
    "compare",
    "complete",
    "complete_step",
    "comprehension_instance",
    "decorate",
    "deficiency",
    "define_class",
    "dred_complete",
    "dred_from_graph",
    "encode_tuple",
    "eval_formula",
    "extension",
    "extensionality_violation",
    "foundation_witness",
    "free_variables",
    "hf_universe",
    "is_end_extension",
    "is_extensional",
    "is_isomorphic",
    "loop_code",
    "numeral_ids",
    "oracle_complete",
    "parse",
    "print_formula",
    "quine_atoms",
    "quine_code_formula",
    "require_dred",
    "require_extensional",
    "serialize",
    "deserialize",
    "subset_node_id",
    "to_dot",
    "value_extension",
    "values_to_graph",
    "verify_dred",
    "von_neumann_seed",
    "witness_report",
]
