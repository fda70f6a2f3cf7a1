"""Compilation of policy violation conditions into ANSI SQL over an event table.

The world materializes as one row per event in ``world_events`` (columns
derived from feature names, event_id first) plus a normalized side table
``world_set_members`` holding identifier-set memberships. Every condition
compiles to a two-valued predicate: null feature values make the predicate
definitely false, never unknown, so negation in the permissions clause
behaves exactly like the in-memory evaluator.

One query is emitted per violation clause so a consumer can tell which
clause fired; the obligations clause returns a single flag row instead of
witness rows.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import QueryEmitError
from .matching import require_well_formed, strip_deadline_conditions
from .model import (
    And,
    Condition,
    Constant,
    Datatype,
    EventRule,
    FeatureSchema,
    FullPolicy,
    LitePolicy,
    Not,
    Operator,
    Or,
    SimpleCondition,
    TIMESTAMP_FEATURE,
    Value,
    ValueKind,
    World,
    Xor,
    deadline_conditions,
    ordered_rules,
)

MAIN_TABLE = "world_events"
SET_TABLE = "world_set_members"
SET_PRESENT_MARKER = "set"

_SQL_TYPE = {
    Datatype.TIMESTAMP: "INTEGER",
    Datatype.NUMERIC: "NUMERIC",
    Datatype.STRING: "VARCHAR(255)",
    Datatype.IDENTIFIER: "VARCHAR(255)",
    # presence marker; the members live in the side table
    Datatype.IDENTIFIER_SET: "VARCHAR(16)",
}

LITE_CLAUSES = (
    "permissions-violation",
    "prohibitions-violation",
    "obligations-violation",
)
FULL_CLAUSES = LITE_CLAUSES + (
    "permission-duties-violation",
    "permission-duties-with-consequences-violation",
    "prohibition-remedies-violation",
    "obligation-consequences-violation",
)


@dataclass(frozen=True)
class EmittedQuery:
    """DDL plus one SELECT per violation clause, keyed by clause name."""

    dialect: str
    ddl: str
    queries: tuple   # ((clause-name, sql), ...) in clause order

    def query(self, clause: str) -> str:
        for name, sql in self.queries:
            if name == clause:
                return sql
        raise KeyError(clause)

    def clauses(self) -> tuple:
        return tuple(name for name, _ in self.queries)


def sanitize_name(name: str) -> str:
    """Lower-case feature name with every non-alphanumeric run collapsed to
    an underscore; the documented column naming rule."""
    out = re.sub(r"[^0-9a-zA-Z]+", "_", name).strip("_").lower()
    if not out or out[0].isdigit():
        out = "f_" + out
    return out


def _columns(schema: FeatureSchema) -> dict:
    """feature index -> bare sanitized column name."""
    cols = {}
    seen = set()
    for decl in schema.features:
        col = sanitize_name(decl.name)
        if col in seen or col == "event_id":
            raise QueryEmitError(
                f"feature {decl.name!r} sanitizes to column {col!r}, which "
                f"collides with another column")
        seen.add(col)
        cols[decl.index] = col
    return cols


def _q(col: str) -> str:
    # Column identifiers are double-quoted in emitted SQL: several natural
    # feature names (action, datetime) are reserved words in the standard.
    return f'"{col}"'


def create_table_sql(schema: FeatureSchema) -> str:
    cols = _columns(schema)
    lines = ["CREATE TABLE world_events (", "  event_id INTEGER NOT NULL"]
    for decl in schema.features:
        null = " NOT NULL" if decl.index in (0, 1) else ""
        lines.append(f"  , {_q(cols[decl.index])} {_SQL_TYPE[decl.datatype]}{null}")
    lines.append("  , PRIMARY KEY (event_id)")
    lines.append(");")
    lines.append("")
    lines.append("CREATE TABLE world_set_members (")
    lines.append("  event_id INTEGER NOT NULL")
    lines.append("  , feature VARCHAR(255) NOT NULL")
    lines.append("  , member VARCHAR(255) NOT NULL")
    lines.append(");")
    return "\n".join(lines) + "\n"


def _quote(s: str) -> str:
    return "'" + s.replace("'", "''") + "'"


def _literal(v: Value) -> str:
    if v.kind in (ValueKind.TIMESTAMP, ValueKind.NUMBER):
        return repr(v.raw)
    if v.kind in (ValueKind.TEXT, ValueKind.IDENTIFIER):
        return _quote(v.raw)
    raise QueryEmitError(f"no scalar SQL literal for {v.kind.value}")


_FALSE = "(1=0)"
_TRUE = "(1=1)"

_SCALAR_SQL_OP = {
    Operator.EQ: "=", Operator.NEQ: "<>", Operator.GT: ">",
    Operator.GTEQ: ">=", Operator.LT: "<", Operator.LTEQ: "<=",
}


class _Compiler:
    def __init__(self, schema: FeatureSchema):
        self.schema = schema
        self.cols = _columns(schema)

    def rule(self, rule: EventRule, alias: str) -> str:
        parts = [self.condition(c, alias) for c in rule.ordered_conditions()]
        if not parts:
            return _TRUE
        return "(" + " AND ".join(parts) + ")"

    def condition(self, c: Condition, alias: str) -> str:
        if isinstance(c, SimpleCondition):
            return self.simple(c, alias)
        if isinstance(c, And):
            return "(" + " AND ".join(self.condition(p, alias) for p in c.parts) + ")"
        if isinstance(c, Or):
            return "(" + " OR ".join(self.condition(p, alias) for p in c.parts) + ")"
        if isinstance(c, Not):
            return "(NOT " + self.condition(c.part, alias) + ")"
        if isinstance(c, Xor):
            a = self.condition(c.left, alias)
            b = self.condition(c.right, alias)
            return f"(({a} AND NOT {b}) OR ((NOT {a}) AND {b}))"
        if isinstance(c, Constant):
            return _TRUE if c.truth else _FALSE
        raise AssertionError(f"unknown condition node {c!r}")

    def simple(self, c: SimpleCondition, alias: str) -> str:
        decl = self.schema.declaration(c.feature)
        col = f"{alias}.{_q(self.cols[c.feature])}"
        present = f"{col} IS NOT NULL"

        if c.op is Operator.IS_A:
            return self._is_a(c, col, present, alias)

        if c.op in (Operator.HAS_PART, Operator.IS_PART_OF, Operator.IS_ALL_OF):
            if decl.datatype is not Datatype.IDENTIFIER_SET:
                return _FALSE
            members = sorted(self._members(c.value))
            feature_lit = _quote(self.cols[c.feature])
            terms = [present]
            if c.op in (Operator.HAS_PART, Operator.IS_ALL_OF):
                terms += [self._member_exists(alias, feature_lit, m) for m in members]
            if c.op in (Operator.IS_PART_OF, Operator.IS_ALL_OF):
                terms.append(self._only_members(alias, feature_lit, members))
            return "(" + " AND ".join(terms) + ")"

        if c.op in (Operator.IS_ANY_OF, Operator.IS_NONE_OF):
            if decl.datatype not in (Datatype.IDENTIFIER, Datatype.STRING):
                return _FALSE
            members = sorted(self._members(c.value))
            if not members:
                return _FALSE if c.op is Operator.IS_ANY_OF else f"({present})"
            inlist = ", ".join(_quote(m) for m in members)
            test = f"{col} IN ({inlist})" if c.op is Operator.IS_ANY_OF \
                else f"{col} NOT IN ({inlist})"
            return f"({present} AND {test})"

        # scalar comparison; statically incomparable kinds are plain false
        expected = {
            Datatype.TIMESTAMP: ValueKind.TIMESTAMP,
            Datatype.NUMERIC: ValueKind.NUMBER,
            Datatype.STRING: ValueKind.TEXT,
            Datatype.IDENTIFIER: ValueKind.IDENTIFIER,
            Datatype.IDENTIFIER_SET: None,
        }[decl.datatype]
        if expected is None or c.value.kind is not expected:
            return _FALSE
        if c.op in (Operator.GT, Operator.GTEQ, Operator.LT, Operator.LTEQ) \
                and decl.datatype is Datatype.IDENTIFIER:
            return _FALSE
        return f"({present} AND {col} {_SCALAR_SQL_OP[c.op]} {_literal(c.value)})"

    def _is_a(self, c: SimpleCondition, col: str, present: str, alias: str) -> str:
        decl = self.schema.declaration(c.feature)
        members = self._members(c.value)
        if decl.class_feature is not None:
            companion = self.schema.declaration(decl.class_feature)
            ccol = f"{alias}.{_q(self.cols[companion.index])}"
            feature_lit = _quote(self.cols[companion.index])
            terms = [present, f"{ccol} IS NOT NULL"]
            terms += [self._member_exists(alias, feature_lit, m)
                      for m in sorted(members)]
            return "(" + " AND ".join(terms) + ")"
        if decl.classes is not None:
            verdict = _TRUE if decl.classes >= members else _FALSE
            return f"({present} AND {verdict})"
        return _FALSE

    @staticmethod
    def _members(v: Value) -> frozenset:
        if v.kind is ValueKind.IDENTIFIER_SET:
            return v.raw
        return frozenset({v.raw}) if isinstance(v.raw, str) else frozenset()

    @staticmethod
    def _member_exists(alias: str, feature_lit: str, member: str) -> str:
        return (f"EXISTS (SELECT 1 FROM {SET_TABLE} sm WHERE "
                f"sm.event_id = {alias}.event_id AND sm.feature = {feature_lit} "
                f"AND sm.member = {_quote(member)})")

    @staticmethod
    def _only_members(alias: str, feature_lit: str, members) -> str:
        if members:
            inlist = ", ".join(_quote(m) for m in members)
            extra = f" AND sm.member NOT IN ({inlist})"
        else:
            extra = ""
        return (f"NOT EXISTS (SELECT 1 FROM {SET_TABLE} sm WHERE "
                f"sm.event_id = {alias}.event_id AND sm.feature = {feature_lit}"
                f"{extra})")


def _disjoin(parts) -> str:
    parts = list(parts)
    if not parts:
        return _FALSE
    return "(" + "\n   OR ".join(parts) + ")"


def emit_violation_queries(p: LitePolicy, schema: FeatureSchema) -> EmittedQuery:
    """The three lite violation clauses as standalone SELECT statements."""
    for r in p.all_rules():
        require_well_formed(r, schema)
    comp = _Compiler(schema)
    w = "w"

    permissions = [comp.rule(t, w) for t in ordered_rules(p.permissions)]
    if permissions:
        perm_where = " AND ".join(f"(NOT {m})" for m in permissions)
    else:
        perm_where = _TRUE
    perm_sql = f"SELECT w.* FROM {MAIN_TABLE} w\nWHERE {perm_where};"

    prohibitions = [comp.rule(t, w) for t in ordered_rules(p.prohibitions)]
    proh_sql = f"SELECT w.* FROM {MAIN_TABLE} w\nWHERE {_disjoin(prohibitions)};"

    missing = [
        f"NOT EXISTS (SELECT 1 FROM {MAIN_TABLE} w WHERE {comp.rule(t, w)})"
        for t in ordered_rules(p.obligations)
    ]
    obl_sql = (f"SELECT 1 AS violated FROM (SELECT 1 AS x) AS one\n"
               f"WHERE {_disjoin(missing)};")

    return EmittedQuery(
        dialect="ansi-sql",
        ddl=create_table_sql(schema),
        queries=(
            ("permissions-violation", perm_sql),
            ("prohibitions-violation", proh_sql),
            ("obligations-violation", obl_sql),
        ),
    )


def emit_full_violation_queries(p: FullPolicy, schema: FeatureSchema) -> EmittedQuery:
    """Lite clauses plus the duty / remedy / consequence clauses, compiled as
    self-joins on the event table with timestamp predicates."""
    for r in p.all_rules():
        require_well_formed(r, schema)
    lite = emit_violation_queries(p.lite, schema)
    comp = _Compiler(schema)
    ts = _q(comp.cols[TIMESTAMP_FEATURE])

    def exists(alias: str, rule: EventRule, time_test: str | None) -> str:
        cond = comp.rule(rule, alias)
        if time_test:
            cond = f"{cond} AND {time_test}"
        return f"EXISTS (SELECT 1 FROM {MAIN_TABLE} {alias} WHERE {cond})"

    duty_terms = []
    for tau, duty in sorted(p.duty_pairs,
                            key=lambda pr: tuple(r.render() for r in pr)):
        duty_terms.append(
            f"({comp.rule(tau, 'w')} AND NOT "
            f"{exists('w2', duty, f'w2.{ts} <= w.{ts}')})")
    dp_sql = f"SELECT w.* FROM {MAIN_TABLE} w\nWHERE {_disjoin(duty_terms)};"

    dpc_terms = []
    for tau, duty, consequence in sorted(
            p.duty_consequence_triples,
            key=lambda tr: tuple(r.render() for r in tr)):
        dpc_terms.append(
            f"({comp.rule(tau, 'w')}"
            f" AND NOT {exists('w2', duty, f'w2.{ts} <= w.{ts}')}"
            f" AND ((NOT {exists('w3', duty, f'w3.{ts} >= w.{ts}')})"
            f" OR (NOT {exists('w4', consequence, f'w4.{ts} >= w.{ts}')})))")
    dpc_sql = f"SELECT w.* FROM {MAIN_TABLE} w\nWHERE {_disjoin(dpc_terms)};"

    remedy_terms = []
    for tau, remedy in sorted(p.remedy_pairs,
                              key=lambda pr: tuple(r.render() for r in pr)):
        remedy_terms.append(
            f"({comp.rule(tau, 'w')} AND NOT "
            f"{exists('w2', remedy, f'w2.{ts} >= w.{ts}')})")
    fr_sql = f"SELECT w.* FROM {MAIN_TABLE} w\nWHERE {_disjoin(remedy_terms)};"

    oc_terms = []
    for tau, consequence in sorted(p.obligation_consequence_pairs,
                                   key=lambda pr: tuple(r.render() for r in pr)):
        soft = strip_deadline_conditions(tau)
        for deadline in deadline_conditions(tau):
            t = deadline.value.raw
            late_pair = (
                f"EXISTS (SELECT 1 FROM {MAIN_TABLE} w2, {MAIN_TABLE} w3 "
                f"WHERE {comp.rule(soft, 'w2')} AND {comp.rule(consequence, 'w3')} "
                f"AND w3.{ts} >= {t})")
            oc_terms.append(
                f"((NOT EXISTS (SELECT 1 FROM {MAIN_TABLE} w WHERE "
                f"{comp.rule(tau, 'w')})) AND (NOT {late_pair}))")
    oc_sql = (f"SELECT 1 AS violated FROM (SELECT 1 AS x) AS one\n"
              f"WHERE {_disjoin(oc_terms)};")

    return EmittedQuery(
        dialect="ansi-sql",
        ddl=lite.ddl,
        queries=lite.queries + (
            ("permission-duties-violation", dp_sql),
            ("permission-duties-with-consequences-violation", dpc_sql),
            ("prohibition-remedies-violation", fr_sql),
            ("obligation-consequences-violation", oc_sql),
        ),
    )


def world_insert_sql(world: World, schema: FeatureSchema) -> list:
    """INSERT statements materializing a world, events ordered and numbered
    deterministically."""
    cols = _columns(schema)
    rows = []
    members = []
    for event_id, event in enumerate(world.ordered()):
        names = ["event_id"] + [_q(cols[d.index]) for d in schema.features]
        vals = [str(event_id)]
        for decl in schema.features:
            v = event.value(decl.index)
            if v.is_null:
                vals.append("NULL")
            elif v.kind is ValueKind.IDENTIFIER_SET:
                vals.append(_quote(SET_PRESENT_MARKER))
                for m in sorted(v.raw):
                    members.append(
                        f"INSERT INTO {SET_TABLE} (event_id, feature, member) "
                        f"VALUES ({event_id}, {_quote(cols[decl.index])}, "
                        f"{_quote(m)});")
            else:
                vals.append(_literal(v))
        rows.append(
            f"INSERT INTO {MAIN_TABLE} ({', '.join(names)}) "
            f"VALUES ({', '.join(vals)});")
    return rows + members
