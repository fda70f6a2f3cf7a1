"""Rule containment and overlap, policy consistency, normalization to
consistent form, conflict detection, and the brute-force containment oracle.

Containment questions quantify over all events, so they are decided by
finite enumeration over a witness domain: per feature, every constant the
compared rules mention, a representative of every open region between
adjacent constants (plus one below and one above), a fresh identifier for
identifier features, every relevant subset for set features, and null.
Any event whatsoever can be collapsed, feature by feature, onto a probe
event with identical condition outcomes, so the enumeration is complete for
the operators supported here.

Conflict detection follows the containment characterization for consistent
policies: the requester conflicts with the provider when its permissions are
not covered by the provider's, or some provider obligation has no agreeing
requester obligation. The independent oracle enumerates bounded worlds drawn
from the witness domain instead, and the two must agree on consistent input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .conditions import negate
from .errors import (
    DomainTooLargeError,
    InconsistentPolicyError,
    NormalizationError,
)
from .evaluation import evaluate_full, evaluate_lite
from .matching import check_well_formed, match_unchecked, require_well_formed
from .model import (
    ACTION_FEATURE,
    CORE_TAGS,
    Datatype,
    Event,
    EventRule,
    FeatureSchema,
    FullPolicy,
    KIND_FOR_DATATYPE,
    LitePolicy,
    NULL,
    Operator,
    Policy,
    SimpleCondition,
    TIMESTAMP_FEATURE,
    Value,
    ValueKind,
    World,
    deadline_conditions,
    ordered_rules,
    simple_conditions_of,
)

DEFAULT_MAX_EVENTS = 200_000
DEFAULT_MAX_SET_ATOMS = 6


# ---------------------------------------------------------------------------
# Witness domain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessDomain:
    """Finite per-feature probe values covering every region two rule sets
    can distinguish."""

    schema: FeatureSchema
    probes: tuple   # probes[i] is the tuple of probe Values for feature i

    @staticmethod
    def for_rules(schema: FeatureSchema, rules, *, extra_timestamps=(),
                  max_set_atoms: int = DEFAULT_MAX_SET_ATOMS) -> "WitnessDomain":
        rules = tuple(rules)
        scalar_constants: dict = {i: set() for i in range(len(schema))}
        set_atoms: dict = {i: set() for i in range(len(schema))}
        touched = set()

        for rule in rules:
            for sc in (c for cond in rule.conditions
                       for c in simple_conditions_of(cond)):
                i = sc.feature
                decl = schema.declaration(i)
                touched.add(i)
                expected = KIND_FOR_DATATYPE[decl.datatype]
                if sc.op is Operator.IS_A:
                    # isA reads the class set; per-event classes live on the
                    # companion feature, so its atoms must cover them.
                    if decl.class_feature is not None:
                        touched.add(decl.class_feature)
                        for m in _members(sc.value):
                            set_atoms[decl.class_feature].add(m)
                elif sc.op in (Operator.HAS_PART, Operator.IS_PART_OF,
                               Operator.IS_ALL_OF):
                    if decl.datatype is Datatype.IDENTIFIER_SET:
                        set_atoms[i].update(_members(sc.value))
                elif sc.op in (Operator.IS_ANY_OF, Operator.IS_NONE_OF):
                    if expected in (ValueKind.IDENTIFIER, ValueKind.TEXT):
                        scalar_constants[i].update(_members(sc.value))
                elif sc.value.kind is expected:
                    scalar_constants[i].add(sc.value.raw)

        for t in extra_timestamps:
            scalar_constants[TIMESTAMP_FEATURE].add(int(t))
            touched.add(TIMESTAMP_FEATURE)

        probes = []
        for decl in schema.features:
            i = decl.index
            if i not in touched:
                probes.append(_untouched_probe(decl))
                continue
            if decl.datatype is Datatype.IDENTIFIER_SET:
                atoms = sorted(set_atoms[i])
                if len(atoms) + 1 > max_set_atoms:
                    raise DomainTooLargeError(
                        f"feature {decl.name}: {len(atoms)} set atoms exceed the "
                        f"cap of {max_set_atoms - 1}")
                atoms.append(_fresh_atom(f"~other-{decl.name}", atoms))
                vals = [Value.identifier_set(sub)
                        for k in range(len(atoms) + 1)
                        for sub in itertools.combinations(atoms, k)]
                vals.append(NULL)
            elif decl.datatype is Datatype.IDENTIFIER:
                mentioned = sorted(scalar_constants[i])
                vals = [Value.identifier(m) for m in mentioned]
                vals.append(Value.identifier(
                    _fresh_atom(f"~other-{decl.name}", mentioned)))
                if i not in (TIMESTAMP_FEATURE, ACTION_FEATURE):
                    vals.append(NULL)
            else:
                raws = _ordered_probe_raws(decl.datatype, sorted(scalar_constants[i]))
                kind = KIND_FOR_DATATYPE[decl.datatype]
                vals = [Value(kind, r) for r in raws]
                if i != TIMESTAMP_FEATURE:
                    vals.append(NULL)
            probes.append(tuple(sorted(vals, key=Value.sort_key)))
        return WitnessDomain(schema, tuple(probes))

    def event_count(self) -> int:
        n = 1
        for p in self.probes:
            n *= len(p)
        return n

    def events(self, max_events: int = DEFAULT_MAX_EVENTS):
        """Deterministic iterator over the full probe product."""
        if self.event_count() > max_events:
            raise DomainTooLargeError(
                f"witness domain holds {self.event_count()} events, "
                f"cap is {max_events}")
        for combo in itertools.product(*self.probes):
            yield Event(combo)


def _members(v: Value) -> frozenset:
    if v.kind is ValueKind.IDENTIFIER_SET:
        return v.raw
    return frozenset({v.raw}) if isinstance(v.raw, str) else frozenset()


def _fresh_atom(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def _untouched_probe(decl) -> tuple:
    # Features no compared rule mentions cannot influence any match; one
    # probe suffices (a non-null one for the mandatory slots).
    if decl.index == TIMESTAMP_FEATURE:
        return (Value.timestamp(0),)
    if decl.index == ACTION_FEATURE:
        return (Value.identifier("~any-action"),)
    return (NULL,)


def _ordered_probe_raws(datatype: Datatype, constants: list) -> list:
    """Constants plus a representative of every region they induce."""
    if not constants:
        return [0] if datatype is not Datatype.STRING else ["s"]
    raws = list(constants)
    if datatype is Datatype.TIMESTAMP:
        raws.append(constants[0] - 1)
        raws.append(constants[-1] + 1)
        for a, b in zip(constants, constants[1:]):
            if b - a >= 2:
                raws.append((a + b) // 2)
    elif datatype is Datatype.NUMERIC:
        raws.append(constants[0] - 1)
        raws.append(constants[-1] + 1)
        for a, b in zip(constants, constants[1:]):
            raws.append((a + b) / 2)
    else:  # STRING: codepoint order; the successor of s is s + chr(0)
        if constants[0] > "":
            raws.append("")
        raws.append(constants[-1] + "\x00")
        for a, b in zip(constants, constants[1:]):
            succ = a + "\x00"
            if succ < b:
                raws.append(succ)
    return sorted(set(raws))


# ---------------------------------------------------------------------------
# Containment, overlap, consistency
# ---------------------------------------------------------------------------

def _domain_events(schema, rules, max_events=DEFAULT_MAX_EVENTS, extra_timestamps=()):
    domain = WitnessDomain.for_rules(schema, rules, extra_timestamps=extra_timestamps)
    return domain.events(max_events=max_events)


def rule_contains(tau: EventRule, tau_prime: EventRule, schema: FeatureSchema,
                  *, max_events: int = DEFAULT_MAX_EVENTS) -> bool:
    """True when every event matching ``tau`` also matches ``tau_prime``."""
    require_well_formed(tau, schema)
    require_well_formed(tau_prime, schema)
    for e in _domain_events(schema, (tau, tau_prime), max_events):
        if match_unchecked(tau, e, schema) and not match_unchecked(tau_prime, e, schema):
            return False
    return True


def rules_overlap(tau: EventRule, tau_prime: EventRule, schema: FeatureSchema,
                  *, max_events: int = DEFAULT_MAX_EVENTS) -> bool:
    """True when some event matches both rules."""
    require_well_formed(tau, schema)
    require_well_formed(tau_prime, schema)
    for e in _domain_events(schema, (tau, tau_prime), max_events):
        if match_unchecked(tau, e, schema) and match_unchecked(tau_prime, e, schema):
            return True
    return False


def rule_satisfiable(tau: EventRule, schema: FeatureSchema,
                     *, max_events: int = DEFAULT_MAX_EVENTS) -> bool:
    """True when some event matches the rule at all."""
    require_well_formed(tau, schema)
    return any(match_unchecked(tau, e, schema)
               for e in _domain_events(schema, (tau,), max_events))


def set_contains(rules, rules_prime, schema: FeatureSchema,
                 *, max_events: int = DEFAULT_MAX_EVENTS) -> bool:
    """Semantic set-lifted containment: every event matching some rule on the
    left matches some rule on the right."""
    rules, rules_prime = tuple(rules), tuple(rules_prime)
    for r in rules + rules_prime:
        require_well_formed(r, schema)
    for e in _domain_events(schema, rules + rules_prime, max_events):
        if (any(match_unchecked(r, e, schema) for r in rules)
                and not any(match_unchecked(r, e, schema) for r in rules_prime)):
            return False
    return True


def pairwise_set_contains(rules, rules_prime, schema: FeatureSchema) -> bool:
    """Sound but incomplete shortcut for ``set_contains``: per-rule subsumption."""
    return all(any(rule_contains(t, tp, schema) for tp in rules_prime)
               for t in rules)


def is_consistent(p: LitePolicy, schema: FeatureSchema,
                  *, max_events: int = DEFAULT_MAX_EVENTS) -> bool:
    """No permission or obligation overlaps a prohibition, and every
    obligation is covered by the permissions."""
    rules = tuple(p.all_rules())
    for r in rules:
        require_well_formed(r, schema)
    for e in _domain_events(schema, rules, max_events):
        p_hit = any(match_unchecked(r, e, schema) for r in p.permissions)
        f_hit = any(match_unchecked(r, e, schema) for r in p.prohibitions)
        o_hit = any(match_unchecked(r, e, schema) for r in p.obligations)
        if f_hit and (p_hit or o_hit):
            return False
        if o_hit and not p_hit:
            return False
    return True


# ---------------------------------------------------------------------------
# Normalization to consistent form
# ---------------------------------------------------------------------------

def _core_pins(rule: EventRule, schema: FeatureSchema) -> dict:
    """feature -> equality condition, over top-level core-component pins."""
    pins = {}
    for c in rule.conditions:
        if (isinstance(c, SimpleCondition) and c.op is Operator.EQ
                and schema.declaration(c.feature).component in CORE_TAGS):
            pins[c.feature] = c
    return pins


class _DomainOracle:
    """Satisfiability / overlap / coverage checks against one shared event
    list, so normalization probes stay region-complete while rules change."""

    def __init__(self, schema: FeatureSchema, rules, max_events: int):
        self.schema = schema
        self.events = list(_domain_events(schema, rules, max_events))

    def satisfiable(self, rule: EventRule) -> bool:
        return any(match_unchecked(rule, e, self.schema) for e in self.events)

    def overlap(self, a: EventRule, b: EventRule) -> bool:
        return any(match_unchecked(a, e, self.schema)
                   and match_unchecked(b, e, self.schema) for e in self.events)

    def covered(self, rule: EventRule, covers) -> bool:
        covers = tuple(covers)
        return all(any(match_unchecked(c, e, self.schema) for c in covers)
                   for e in self.events if match_unchecked(rule, e, self.schema))


def _forbidden_pin_gap(rule, prohibition, schema) -> int | None:
    """A core component the prohibition pins but the rule leaves open, if any."""
    rule_pins = _core_pins(rule, schema)
    for k in _core_pins(prohibition, schema):
        if k not in rule_pins:
            return k
    return None


def _carve_permission(rule: EventRule, prohibitions, schema, oracle,
                      max_rules: int) -> list:
    """The permission minus every prohibition, as a set of well-formed rules.

    Each overlapping prohibition contributes one disjunct per non-pin
    condition: the permission plus that condition's complement.
    """
    work = [rule]
    for f in prohibitions:
        nxt = []
        for piece in work:
            if not oracle.overlap(piece, f):
                nxt.append(piece)
                continue
            gap = _forbidden_pin_gap(piece, f, schema)
            if gap is not None:
                raise NormalizationError(
                    "inexpressible-difference",
                    f"prohibition {f.display_label(schema)} pins core feature "
                    f"{schema.declaration(gap).name}, which permission "
                    f"{piece.display_label(schema)} leaves open; the difference "
                    f"cannot be written as well-formed rules")
            negatable = [c for c in piece_complement_targets(f, schema)]
            for idx, c in enumerate(negatable):
                candidate = EventRule(
                    piece.conditions | {negate(c)},
                    label=_piece_label(piece.label, idx, len(negatable)))
                if oracle.satisfiable(candidate):
                    nxt.append(candidate)
        if len(nxt) > max_rules:
            raise NormalizationError(
                "normalization-blowup",
                f"carving produced more than {max_rules} rules")
        work = nxt
    return work


def piece_complement_targets(prohibition: EventRule, schema) -> list:
    """The prohibition's conditions other than its core pins, in stable order."""
    pins = set(_core_pins(prohibition, schema).values())
    return [c for c in prohibition.ordered_conditions() if c not in pins]


def _piece_label(label: str | None, idx: int, total: int) -> str | None:
    if label is None:
        return None
    return label if total == 1 else f"{label}~{idx}"


def _carve_obligation(rule: EventRule, prohibitions, schema, oracle):
    """The obligation minus every prohibition, kept as a single rule.

    Obligations demand one matching event each, so the carved match set must
    stay one rule: each overlapping prohibition's non-pin conditions are
    conjoined as one negated block, which is only well-formed when they share
    a component.
    """
    from .model import And  # local import to keep module load order simple

    current = rule
    for f in prohibitions:
        if not oracle.overlap(current, f):
            continue
        gap = _forbidden_pin_gap(current, f, schema)
        if gap is not None:
            raise NormalizationError(
                "inexpressible-difference",
                f"prohibition {f.display_label(schema)} pins core feature "
                f"{schema.declaration(gap).name}, which obligation "
                f"{rule.display_label(schema)} leaves open")
        targets = piece_complement_targets(f, schema)
        if not targets:
            return None  # prohibition swallows the obligation entirely
        block = targets[0] if len(targets) == 1 else And(tuple(targets))
        candidate = EventRule(current.conditions | {negate(block)}, label=rule.label)
        if not check_well_formed(candidate, schema).ok:
            raise NormalizationError(
                "inexpressible-difference",
                f"complement of prohibition {f.display_label(schema)} mixes "
                f"components, so obligation {rule.display_label(schema)} cannot "
                f"stay a single well-formed rule")
        if not oracle.satisfiable(candidate):
            return None
        current = candidate
    return current


def normalize(p: LitePolicy, schema: FeatureSchema, *,
              max_rules: int = 256,
              max_events: int = DEFAULT_MAX_EVENTS) -> LitePolicy:
    """Rewrite a policy into consistent form.

    Removes from permissions and obligations every part a prohibition
    forbids, removes from obligations every part the carved permissions do
    not cover, and drops the then-redundant prohibitions.
    """
    for r in p.all_rules():
        require_well_formed(r, schema)
    oracle = _DomainOracle(schema, tuple(p.all_rules()), max_events)
    prohibitions = ordered_rules(p.prohibitions)

    new_permissions = []
    for tau in ordered_rules(p.permissions):
        new_permissions.extend(
            _carve_permission(tau, prohibitions, schema, oracle, max_rules))
    if len(new_permissions) > max_rules:
        raise NormalizationError(
            "normalization-blowup",
            f"normalized policy would hold more than {max_rules} permissions")

    new_obligations = []
    for o in ordered_rules(p.obligations):
        carved = _carve_obligation(o, prohibitions, schema, oracle)
        if carved is None:
            continue
        if oracle.covered(carved, new_permissions):
            new_obligations.append(carved)
            continue
        overlapping = [t for t in new_permissions if oracle.overlap(carved, t)]
        if not overlapping:
            continue  # nothing of the obligation is permitted: drop it
        if len(overlapping) == 1:
            merged = EventRule(
                carved.conditions | overlapping[0].conditions, label=carved.label)
            assert check_well_formed(merged, schema).ok
            new_obligations.append(merged)
            continue
        raise NormalizationError(
            "inexpressible-difference",
            f"obligation {o.display_label(schema)} is only partially permitted "
            f"across several permissions; the permitted part is not expressible "
            f"as one well-formed rule")

    return LitePolicy.of(new_permissions, (), new_obligations)


# ---------------------------------------------------------------------------
# Conflict detection
# ---------------------------------------------------------------------------

CAUSE_PERMISSIONS = "permissions-not-contained"
CAUSE_OBLIGATIONS = "obligation-not-agreed"


@dataclass(frozen=True)
class ConflictVerdict:
    """Outcome of a policy comparison.

    For symmetric comparisons ``failing_directions`` names the direction(s)
    whose containment failed; ``cause`` and ``witness`` describe the first
    failure. A witness world is always valid for the policy on the contained
    side of the failed direction and violating for the other.
    """

    conflict: bool
    kind: str                               # "asymmetric" | "symmetric"
    cause: str | None = None
    witness: World | None = None
    failing_directions: tuple = ()
    detail: str | None = None


def _require_consistent(p: LitePolicy, schema, auto_normalize: bool,
                        max_events: int, who: str) -> LitePolicy:
    if is_consistent(p, schema, max_events=max_events):
        return p
    if auto_normalize:
        return normalize(p, schema, max_events=max_events)
    raise InconsistentPolicyError(
        f"the {who} policy is not in consistent form; normalize it first "
        f"(or pass auto_normalize=True)")


def asymmetric_conflict(requester: LitePolicy, provider: LitePolicy,
                        schema: FeatureSchema, *, auto_normalize: bool = False,
                        max_events: int = DEFAULT_MAX_EVENTS) -> ConflictVerdict:
    """Conflict when the requester policy is not contained in the provider's.

    For consistent policies this reduces to two checks: the requester's
    permissions must be covered by the provider's, and every provider
    obligation must contain some requester obligation.
    """
    requester = _require_consistent(
        requester, schema, auto_normalize, max_events, "requester")
    provider = _require_consistent(
        provider, schema, auto_normalize, max_events, "provider")

    rules = tuple(requester.all_rules()) + tuple(provider.all_rules())
    events = list(_domain_events(schema, rules, max_events))

    def hits(rule):
        return [e for e in events if match_unchecked(rule, e, schema)]

    obligation_hits = {tau: hits(tau) for tau in requester.obligations}

    # A requester obligation no event can satisfy makes every world invalid
    # for the requester, so the requester is vacuously contained.
    if any(not hs for hs in obligation_hits.values()):
        return ConflictVerdict(
            False, "asymmetric",
            detail="requester policy is unsatisfiable; containment holds vacuously")

    # Containment characterization, condition 1: permission coverage.
    permissions = ordered_rules(requester.permissions)
    provider_permissions = ordered_rules(provider.permissions)
    e_star = None
    for e in events:
        if (any(match_unchecked(t, e, schema) for t in permissions)
                and not any(match_unchecked(t, e, schema)
                            for t in provider_permissions)):
            e_star = e
            break
    if e_star is not None:
        witness_events = {e_star}
        for tau in ordered_rules(requester.obligations):
            witness_events.add(obligation_hits[tau][0])
        return ConflictVerdict(
            True, "asymmetric", cause=CAUSE_PERMISSIONS,
            witness=World(frozenset(witness_events)),
            detail="a requester-permitted event matches no provider permission")

    # Condition 2: every provider obligation is agreed to by containment.
    for tau_prime in ordered_rules(provider.obligations):
        agreed = any(
            _contains_on(events, tau, tau_prime, schema)
            for tau in requester.obligations)
        if agreed:
            continue
        witness_events = set()
        for tau in ordered_rules(requester.obligations):
            e = next(e for e in obligation_hits[tau]
                     if not match_unchecked(tau_prime, e, schema))
            witness_events.add(e)
        return ConflictVerdict(
            True, "asymmetric", cause=CAUSE_OBLIGATIONS,
            witness=World(frozenset(witness_events)),
            detail=f"provider obligation {tau_prime.display_label(schema)} "
                   f"contains no requester obligation")

    return ConflictVerdict(False, "asymmetric")


def _contains_on(events, tau, tau_prime, schema) -> bool:
    return all(match_unchecked(tau_prime, e, schema)
               for e in events if match_unchecked(tau, e, schema))


def symmetric_conflict(p: LitePolicy, p_prime: LitePolicy, schema: FeatureSchema,
                       *, auto_normalize: bool = False,
                       max_events: int = DEFAULT_MAX_EVENTS) -> ConflictVerdict:
    """Conflict on any semantic difference: containment must hold both ways."""
    forward = asymmetric_conflict(
        p, p_prime, schema, auto_normalize=auto_normalize, max_events=max_events)
    backward = asymmetric_conflict(
        p_prime, p, schema, auto_normalize=auto_normalize, max_events=max_events)
    directions = []
    if forward.conflict:
        directions.append("requester-to-provider")
    if backward.conflict:
        directions.append("provider-to-requester")
    if not directions:
        return ConflictVerdict(False, "symmetric")
    first = forward if forward.conflict else backward
    return ConflictVerdict(
        True, "symmetric", cause=first.cause, witness=first.witness,
        failing_directions=tuple(directions), detail=first.detail)


# ---------------------------------------------------------------------------
# Brute-force containment oracle
# ---------------------------------------------------------------------------

def brute_force_containment(p: Policy, p_prime: Policy, schema: FeatureSchema,
                            *, max_events: int = 20_000,
                            max_world_size: int | None = None) -> bool:
    """Containment by bounded-world enumeration.

    Enumerates every world of size up to one more than the number of
    obligations (the proof-guided bound: one event per obligation plus one
    extra), drawn from the witness-domain product, and reports False exactly
    when some such world is valid for ``p`` and violating for ``p_prime``.
    Full policies are handled best-effort with deadline-derived timestamp
    probes; completeness is only claimed for consistent lite policies.
    """
    full = isinstance(p, FullPolicy) or isinstance(p_prime, FullPolicy)
    if full:
        return _brute_force_full(p, p_prime, schema, max_events, max_world_size)
    return _brute_force_lite(p, p_prime, schema, max_events, max_world_size)


def _brute_force_lite(p: LitePolicy, p_prime: LitePolicy, schema,
                      max_events, max_world_size) -> bool:
    rules = tuple(p.all_rules()) + tuple(p_prime.all_rules())
    for r in rules:
        require_well_formed(r, schema)
    events = list(_domain_events(schema, rules, max_events))
    bound = (len(p.obligations) + 1) if max_world_size is None else max_world_size

    # Per-event facts. A counterexample world is valid for p, so every event
    # in it is p-permitted and p-unforbidden; restricting the pool to those
    # events discards no candidate world.
    def any_match(rules_, e):
        return any(match_unchecked(r, e, schema) for r in rules_)

    pool = [e for e in events
            if any_match(p.permissions, e) and not any_match(p.prohibitions, e)]
    o_masks = [_mask(rule, pool, schema) for rule in ordered_rules(p.obligations)]
    bad_for_p_prime = [
        not any_match(p_prime.permissions, e) or any_match(p_prime.prohibitions, e)
        for e in pool]
    o_prime_masks = [_mask(rule, pool, schema)
                     for rule in ordered_rules(p_prime.obligations)]

    for size in range(0, min(bound, len(pool)) + 1):
        for combo in itertools.combinations(range(len(pool)), size):
            wmask = 0
            for j in combo:
                wmask |= 1 << j
            if any(m & wmask == 0 for m in o_masks):
                continue  # p-obligation unfulfilled: not p-valid
            violates = (any(bad_for_p_prime[j] for j in combo)
                        or any(m & wmask == 0 for m in o_prime_masks))
            if violates:
                world = World(frozenset(pool[j] for j in combo))
                # Confirm through the evaluators; the bit tables must agree.
                assert evaluate_lite(p, world, schema).valid
                assert not evaluate_lite(p_prime, world, schema).valid
                return False
    return True


def _mask(rule, pool, schema) -> int:
    m = 0
    for j, e in enumerate(pool):
        if match_unchecked(rule, e, schema):
            m |= 1 << j
    return m


def _brute_force_full(p: Policy, p_prime: Policy, schema,
                      max_events, max_world_size) -> bool:
    p_full = p if isinstance(p, FullPolicy) else FullPolicy.of(p)
    q_full = p_prime if isinstance(p_prime, FullPolicy) else FullPolicy.of(p_prime)
    rules = tuple(p_full.all_rules()) + tuple(q_full.all_rules())
    for r in rules:
        require_well_formed(r, schema)

    # Deadline constants +/- 1 give the enumeration enough timestamp
    # resolution to order events around each deadline.
    extra = set()
    for rule in rules:
        for c in deadline_conditions(rule):
            extra.update((c.value.raw - 1, c.value.raw, c.value.raw + 1))
        for sc in (x for cond in rule.conditions for x in simple_conditions_of(cond)):
            if sc.feature == TIMESTAMP_FEATURE and sc.value.kind is ValueKind.TIMESTAMP:
                extra.update((sc.value.raw - 1, sc.value.raw + 1))

    events = list(_domain_events(schema, rules, max_events, extra_timestamps=extra))

    def any_match(rules_, e):
        return any(match_unchecked(r, e, schema) for r in rules_)

    pool = [e for e in events
            if any_match(p_full.lite.permissions, e)
            and not any_match(p_full.lite.prohibitions, e)]
    if max_world_size is None:
        bound = (len(p_full.lite.obligations) + len(p_full.duty_pairs)
                 + len(p_full.duty_consequence_triples) + len(p_full.remedy_pairs)
                 + len(p_full.obligation_consequence_pairs) + 1)
    else:
        bound = max_world_size

    for size in range(0, min(bound, len(pool)) + 1):
        for combo in itertools.combinations(pool, size):
            world = World(frozenset(combo))
            if not evaluate_full(p_full, world, schema).valid:
                continue
            if not evaluate_full(q_full, world, schema).valid:
                return False
    return True
