"""Materialisation of permissions implied by the action hierarchy.

A permission on an action carries over to every action included in it, so
before evaluation or comparison each permission is copied once per
descendant action, with the action equality swapped. Prohibitions and
obligations are deliberately left untouched: there is no uncontroversial
reading of inheritance for them, so no inference is applied.

Duty pairs and duty-consequence triples follow their permission: each copy
of the permission gets its own tuple with the original duty rules, keeping
the "duties are permissions" invariant intact after saturation.
"""

from __future__ import annotations

from .matching import require_well_formed
from .model import (
    ACTION_FEATURE,
    ActionVocabulary,
    EventRule,
    FeatureSchema,
    FullPolicy,
    LitePolicy,
    Operator,
    Policy,
    SimpleCondition,
    Value,
)


def _action_equality(rule: EventRule) -> SimpleCondition:
    for c in rule.conditions:
        if (isinstance(c, SimpleCondition) and c.feature == ACTION_FEATURE
                and c.op is Operator.EQ):
            return c
    raise AssertionError("well-formed rules always pin the action")


def _specialize(rule: EventRule, action: str) -> EventRule:
    """Copy of the rule with its action equality replaced."""
    pin = _action_equality(rule)
    conditions = (rule.conditions - {pin}) | {
        SimpleCondition(ACTION_FEATURE, Operator.EQ, Value.identifier(action))}
    label = None if rule.label is None else f"{rule.label}@{action}"
    return EventRule(frozenset(conditions), label=label)


def _saturate_permissions(permissions, vocabulary: ActionVocabulary, schema: FeatureSchema):
    """permission -> its specialized copies (original included)."""
    expansion = {}
    for tau in permissions:
        require_well_formed(tau, schema)
        action = _action_equality(tau).value.raw
        copies = [tau]
        for sub in sorted(vocabulary.descendants_of(action) - {action}):
            copies.append(_specialize(tau, sub))
        expansion[tau] = copies
    return expansion


def saturate(policy: Policy, vocabulary: ActionVocabulary,
             schema: FeatureSchema) -> Policy:
    """Add every permission implied by the vocabulary; a fixpoint, since the
    closure is already reflexive and transitive."""
    if isinstance(policy, FullPolicy):
        expansion = _saturate_permissions(policy.lite.permissions, vocabulary, schema)
        lite = LitePolicy.of(
            permissions=(c for copies in expansion.values() for c in copies),
            prohibitions=policy.lite.prohibitions,
            obligations=policy.lite.obligations,
        )
        duty_pairs = {
            (copy, duty)
            for tau, duty in policy.duty_pairs
            for copy in expansion[tau]
        }
        triples = {
            (copy, duty, consequence)
            for tau, duty, consequence in policy.duty_consequence_triples
            for copy in expansion[tau]
        }
        return FullPolicy.of(
            lite,
            duty_pairs=duty_pairs,
            duty_consequence_triples=triples,
            remedy_pairs=policy.remedy_pairs,
            obligation_consequence_pairs=policy.obligation_consequence_pairs,
        )
    expansion = _saturate_permissions(policy.permissions, vocabulary, schema)
    return LitePolicy.of(
        permissions=(c for copies in expansion.values() for c in copies),
        prohibitions=policy.prohibitions,
        obligations=policy.obligations,
    )
