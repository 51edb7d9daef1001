"""Double-pushout graph transformation with moving, restriction and spines."""

from .dpo import (
    Derivation,
    DerivationStep,
    Rule,
    applicable_matches,
    apply,
    invert_derivation,
    invert_rule,
    invert_step,
    replay,
    run_script,
    verify_double_pushout,
)
from .errors import (
    DPOError,
    FactorizationError,
    FormatError,
    GluingError,
    IdentifierClashError,
    IndependenceError,
    IsoSearchUndecided,
    ScriptError,
)
from .graph import (
    Edge,
    Graph,
    GraphMorphism,
    SubgraphHandle,
    compose,
    enumerate_monomorphisms,
    find_isomorphism,
    intersect,
    is_isomorphic,
    union,
    validate_graph,
    validate_morphism,
)
from .moving import (
    check_rule_pair_independence,
    conflux,
    evom,
    interchange,
    move,
    move_forward,
    parallel_independent,
    sequentially_independent,
)
from .spine import (
    accessed_part,
    check_spine_preservation,
    derivations_equal_up_to_iso,
    restrict,
    spine,
)

__version__ = "0.1.0"

__all__ = [
    "DPOError",
    "Derivation",
    "DerivationStep",
    "Edge",
    "FactorizationError",
    "FormatError",
    "GluingError",
    "Graph",
    "GraphMorphism",
    "IdentifierClashError",
    "IndependenceError",
    "IsoSearchUndecided",
    "Rule",
    "ScriptError",
    "SubgraphHandle",
    "accessed_part",
    "applicable_matches",
    "apply",
    "check_rule_pair_independence",
    "check_spine_preservation",
    "compose",
    "conflux",
    "derivations_equal_up_to_iso",
    "enumerate_monomorphisms",
    "evom",
    "find_isomorphism",
    "interchange",
    "intersect",
    "invert_derivation",
    "invert_rule",
    "invert_step",
    "is_isomorphic",
    "move",
    "move_forward",
    "parallel_independent",
    "replay",
    "restrict",
    "run_script",
    "sequentially_independent",
    "spine",
    "union",
    "validate_graph",
    "validate_morphism",
    "verify_double_pushout",
]
