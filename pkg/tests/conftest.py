"""Shared fixtures: the six-feature demo schema, its three-event log, and the
print/read policy exercised throughout the suite."""

from __future__ import annotations

import pytest

from odrleval import (
    And,
    ComponentTag,
    Datatype,
    Event,
    EventRule,
    FeatureDecl,
    FeatureSchema,
    LitePolicy,
    NULL,
    Operator,
    SimpleCondition,
    Value,
    World,
)

# Feature indices of the demo schema.
DATETIME, ACTION, ACTOR, ASSET, RESOLUTION, PAGES = range(6)


def make_schema() -> FeatureSchema:
    return FeatureSchema((
        FeatureDecl(0, "Datetime", Datatype.TIMESTAMP, ComponentTag.RULE),
        FeatureDecl(1, "Action", Datatype.IDENTIFIER, ComponentTag.ACTION),
        FeatureDecl(2, "Actor", Datatype.IDENTIFIER, ComponentTag.PARTY,
                    party_role="assignee"),
        FeatureDecl(3, "Asset", Datatype.IDENTIFIER, ComponentTag.ASSET),
        FeatureDecl(4, "Print.Resolution", Datatype.NUMERIC,
                    ComponentTag.REFINES, refines=1),
        FeatureDecl(5, "Book.Pages", Datatype.NUMERIC,
                    ComponentTag.REFINES, refines=3),
    ))


def make_event(ts, action, actor, asset, resolution=None, pages=None) -> Event:
    return Event((
        Value.timestamp(ts),
        Value.identifier(action),
        NULL if actor is None else Value.identifier(actor),
        NULL if asset is None else Value.identifier(asset),
        NULL if resolution is None else Value.number(resolution),
        NULL if pages is None else Value.number(pages),
    ))


def eq(feature: int, ident: str) -> SimpleCondition:
    return SimpleCondition(feature, Operator.EQ, Value.identifier(ident))


def num(feature: int, op: Operator, x) -> SimpleCondition:
    return SimpleCondition(feature, op, Value.number(x))


def ts(op: Operator, t: int) -> SimpleCondition:
    return SimpleCondition(DATETIME, op, Value.timestamp(t))


def make_p1() -> EventRule:
    return EventRule.of(
        eq(ACTOR, "Alice"), eq(ACTION, "Print"), eq(ASSET, "Picture"),
        label="p1")


def make_f1() -> EventRule:
    return EventRule.of(
        eq(ACTOR, "Bob"), eq(ACTION, "Read"), eq(ASSET, "Book"),
        And((ts(Operator.LTEQ, 5), ts(Operator.GTEQ, 3))),
        num(PAGES, Operator.GT, 250),
        label="f1")


def make_o1() -> EventRule:
    return EventRule.of(
        eq(ACTOR, "Bob"), eq(ACTION, "Read"), eq(ASSET, "Book"),
        ts(Operator.LT, 3),
        label="o1")


@pytest.fixture
def schema() -> FeatureSchema:
    return make_schema()


@pytest.fixture
def e1() -> Event:
    return make_event(1, "Print", "Alice", "Picture", resolution=500)


@pytest.fixture
def e2() -> Event:
    return make_event(2, "Read", "Bob", "Book", pages=450)


@pytest.fixture
def e3() -> Event:
    return make_event(3, "Print", "Alice", "Book", resolution=600, pages=300)


@pytest.fixture
def world(e1, e2, e3) -> World:
    return World.of((e1, e2, e3))


@pytest.fixture
def p1() -> EventRule:
    return make_p1()


@pytest.fixture
def f1() -> EventRule:
    return make_f1()


@pytest.fixture
def o1() -> EventRule:
    return make_o1()


@pytest.fixture
def example_policy(p1, f1, o1) -> LitePolicy:
    return LitePolicy.of({p1}, {f1}, {o1})
