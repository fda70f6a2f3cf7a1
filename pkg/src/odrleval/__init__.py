"""odrleval: evaluation and comparison semantics for ODRL 2.2 usage policies.

The package evaluates whether an event log violates or satisfies a policy,
compares two policies for symmetric and asymmetric conflicts via rule
containment, normalizes policies into consistent form, materializes
permissions implied by an action hierarchy, and compiles violation
conditions into SQL over an event table.
"""

from .errors import (
    DocumentError,
    DomainTooLargeError,
    EngineError,
    IllFormedRuleError,
    InconsistentPolicyError,
    ModelInvariantError,
    NormalizationError,
    PolicyInvariantError,
    QueryEmitError,
    SchemaError,
    VocabularyError,
    WorldConformanceError,
)
from .model import (
    ACTION_FEATURE,
    ActionVocabulary,
    And,
    ComponentTag,
    Condition,
    Constant,
    Datatype,
    EMPTY_VOCABULARY,
    Event,
    EventRule,
    FeatureDecl,
    FeatureSchema,
    FullPolicy,
    LitePolicy,
    Not,
    NULL,
    Operator,
    Or,
    RULE_WIDE,
    SimpleCondition,
    TIMESTAMP_FEATURE,
    Value,
    ValueKind,
    World,
    Xor,
    feature_component,
    validate_schema,
)
from .conditions import desugar_xor, eval_complex, eval_simple, negate, simplify
from .matching import (
    WellFormednessReport,
    WellFormednessViolation,
    check_well_formed,
    match,
    softmatch,
    strip_deadline_conditions,
)
from .evaluation import (
    Clause,
    Finding,
    ViolationReport,
    evaluate_full,
    evaluate_lite,
    is_valid,
)
from .saturation import saturate
from .comparison import (
    ConflictVerdict,
    WitnessDomain,
    asymmetric_conflict,
    brute_force_containment,
    is_consistent,
    normalize,
    rule_contains,
    rule_satisfiable,
    rules_overlap,
    set_contains,
    symmetric_conflict,
)
from .sqlgen import (
    EmittedQuery,
    emit_full_violation_queries,
    emit_violation_queries,
    world_insert_sql,
)
from . import policyio

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
