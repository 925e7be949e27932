"""Append-only annotated fact store.

Individuals carry coarse-grained provenance (who created / last modified
the instance); every assertion appends an immutable Fact carrying its own
fine-grained timestamp, optional unit, quality annotations and source.
Facts are never mutated or deleted; current-value resolution happens at
query time under a freshness/confidence policy.

All operations are atomic under the store lock: an assertion plus its
materialized inverse is one step, and readers never observe one without
the other. Returned values are frozen dataclasses safe to share.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime

from .base import SYSTEM, TermName, as_term, check_identifier
from .errors import (
    DomainViolation,
    DuplicateIndividual,
    IndividualClassConflict,
    InvalidQoC,
    RangeViolation,
    SchemaMismatch,
    TypeMismatch,
    UnknownClass,
    UnknownIndividual,
    UnknownProperty,
    UnknownTerm,
    UnknownUnit,
)
from .quality import EMPTY_QOC, Ordering, QoC, UnitRegistry, validate_qoc
from .schema import SchemaRegistry, ValueType

#: Facts without a probability annotation count as fully confident.
DEFAULT_PROBABILITY = 1.0
#: Default threshold for confidence-filtered resolution.
DEFAULT_CONFIDENCE_THRESHOLD = 0.5


@dataclass(frozen=True)
class ProvenanceRecord:
    created_by: str
    created_at: datetime
    last_modified_by: str
    last_modified_at: datetime
    last_change: str


@dataclass(frozen=True)
class Individual:
    id: str
    class_term: TermName
    provenance: ProvenanceRecord


@dataclass(frozen=True)
class AnnotatedValue:
    """A typed literal (or object id, for relations) with its annotations."""

    value: object
    timestamp: datetime
    unit: str | None = None
    qoc: QoC = EMPTY_QOC
    source: str | None = None

    @property
    def probability(self) -> float:
        p = self.qoc.probability
        return DEFAULT_PROBABILITY if p is None else p


class FactKind(enum.Enum):
    DATA = "data"
    RELATION = "relation"


@dataclass(frozen=True)
class Fact:
    fact_id: int
    subject: str
    property: TermName
    kind: FactKind
    annotated: AnnotatedValue
    asserted_by: str
    asserted_at: datetime
    derived_from: int | None = None

    @property
    def object_id(self) -> str | None:
        return self.annotated.value if self.kind is FactKind.RELATION else None


@dataclass(frozen=True)
class ResolutionPolicy:
    kind: str  # latest | confident | all
    threshold: float | None = None

    @classmethod
    def parse(cls, text: str) -> "ResolutionPolicy":
        text = text.strip().lower()
        if text == "latest":
            return LATEST
        if text == "all":
            return ALL
        if text == "confident":
            return confident()
        if text.startswith("confident:"):
            return confident(float(text.split(":", 1)[1]))
        raise ValueError(f"unknown policy {text!r}")

    def __str__(self) -> str:
        if self.kind == "confident":
            return f"confident:{self.threshold}"
        return self.kind


LATEST = ResolutionPolicy("latest")
ALL = ResolutionPolicy("all")


def confident(threshold: float = DEFAULT_CONFIDENCE_THRESHOLD) -> ResolutionPolicy:
    return ResolutionPolicy("confident", threshold)


@dataclass(frozen=True)
class QueryPattern:
    """Conjunctive constraints for fact queries; absent fields match all.

    ``class_term`` matches subjects whose class is a subclass of it;
    ``value_predicate`` is an (operator, operand) pair with operator in
    <, <=, ==, !=, >=, >.
    """

    class_term: TermName | None = None
    property: TermName | None = None
    subject: str | None = None
    value_predicate: tuple[str, object] | None = None


_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}

_PYTHON_TYPES = {
    ValueType.TEXT: str,
    ValueType.INTEGER: int,
    ValueType.REAL: float,
    ValueType.BOOLEAN: bool,
    ValueType.DATETIME: datetime,
}


def check_value_type(value: object, value_type: ValueType) -> object:
    """Check (and mildly coerce) a literal against a declared value type."""
    if value_type is ValueType.REAL and isinstance(value, int) \
            and not isinstance(value, bool):
        value = float(value)
    expected = _PYTHON_TYPES[value_type]
    if not isinstance(value, expected) or (
            expected in (int, float) and isinstance(value, bool)):
        raise TypeMismatch(
            f"value {value!r} is not a {value_type.value} literal")
    return value


class ContextStore:
    def __init__(self, schema: SchemaRegistry, units: UnitRegistry):
        self.schema = schema
        self.units = units
        self._individuals: dict[str, Individual] = {}
        self._facts: list[Fact] = []
        self._superseded: set[int] = set()
        self._by_subject_prop: dict[tuple[str, TermName], list[int]] = {}
        self._lock = threading.RLock()

    # --- individuals ----------------------------------------------------

    def create_individual(self, class_term: TermName | str, individual_id: str,
                          actor: str = SYSTEM,
                          at: datetime | None = None) -> Individual:
        class_term = as_term(class_term)
        check_identifier(individual_id)
        if at is None:
            at = datetime(1970, 1, 1)
        if not self.schema.has_class(class_term):
            raise UnknownClass(f"unknown class {class_term}")
        with self._lock:
            if individual_id in self._individuals:
                raise DuplicateIndividual(
                    f"individual {individual_id!r} already exists")
            record = ProvenanceRecord(created_by=actor, created_at=at,
                                      last_modified_by=actor,
                                      last_modified_at=at,
                                      last_change="created")
            ind = Individual(id=individual_id, class_term=class_term,
                             provenance=record)
            self._individuals[individual_id] = ind
            return ind

    def has_individual(self, individual_id: str) -> bool:
        return individual_id in self._individuals

    def get_individual(self, individual_id: str) -> Individual:
        try:
            return self._individuals[individual_id]
        except KeyError:
            raise UnknownIndividual(
                f"unknown individual {individual_id!r}") from None

    def individuals(self) -> tuple[Individual, ...]:
        with self._lock:
            return tuple(self._individuals.values())

    def provenance(self, subject: str) -> ProvenanceRecord:
        return self.get_individual(subject).provenance

    # --- assertions -----------------------------------------------------

    def assert_data(self, subject: str, prop: TermName | str, value: object, *,
                    timestamp: datetime | None = None, unit: str | None = None,
                    qoc: QoC = EMPTY_QOC, source: str | None = None,
                    actor: str = SYSTEM, at: datetime) -> Fact:
        prop = as_term(prop)
        with self._lock:
            ind = self.get_individual(subject)
            pdef = self.schema.get_data_property(prop)
            if not self.schema.is_subclass_of(ind.class_term, pdef.domain):
                raise DomainViolation(
                    f"{prop} applies to {pdef.domain}, not {ind.class_term}")
            value = check_value_type(value, pdef.value_type)
            self._check_annotations(unit, qoc)
            annotated = AnnotatedValue(value=value,
                                       timestamp=timestamp or at,
                                       unit=unit, qoc=qoc, source=source)
            fact = self._append(subject, prop, FactKind.DATA, annotated,
                                actor, at, None)
            self._touch(subject, actor, at, f"assert {prop}")
            return fact

    def assert_relation(self, subject: str, prop: TermName | str, obj: str, *,
                        timestamp: datetime | None = None, qoc: QoC = EMPTY_QOC,
                        source: str | None = None, actor: str = SYSTEM,
                        at: datetime) -> tuple[Fact, Fact | None]:
        prop = as_term(prop)
        with self._lock:
            ind = self.get_individual(subject)
            target = self.get_individual(obj)
            pdef = self.schema.get_object_property(prop)
            if not self.schema.is_subclass_of(ind.class_term, pdef.domain):
                raise DomainViolation(
                    f"{prop} applies to {pdef.domain}, not {ind.class_term}")
            if not self.schema.is_subclass_of(target.class_term, pdef.range):
                raise RangeViolation(
                    f"{prop} ranges over {pdef.range}, not {target.class_term}")
            self._check_annotations(None, qoc)
            annotated = AnnotatedValue(value=obj, timestamp=timestamp or at,
                                       qoc=qoc, source=source)
            primary = self._append_relation(subject, prop, pdef.functional,
                                            annotated, actor, at, None)
            self._touch(subject, actor, at, f"assert {prop}")
            derived: Fact | None = None
            inverses = self.schema.inverses_of(prop)
            if len(inverses) == 1:
                (inv,) = inverses
                inv_def = self.schema.get_object_property(inv)
                mirrored = AnnotatedValue(value=subject,
                                          timestamp=annotated.timestamp,
                                          qoc=qoc, source=source)
                derived = self._append_relation(obj, inv, inv_def.functional,
                                                mirrored, actor, at,
                                                primary.fact_id)
                self._touch(obj, actor, at, f"assert {inv}")
            return primary, derived

    def _check_annotations(self, unit: str | None, qoc: QoC) -> None:
        if unit is not None and not self.units.known(unit):
            raise UnknownUnit(f"unknown unit {unit!r}")
        issues = validate_qoc(qoc)
        if issues:
            raise InvalidQoC("; ".join(str(i) for i in issues))

    def _append(self, subject: str, prop: TermName, kind: FactKind,
                annotated: AnnotatedValue, actor: str, at: datetime,
                derived_from: int | None) -> Fact:
        fact = Fact(fact_id=len(self._facts) + 1, subject=subject,
                    property=prop, kind=kind, annotated=annotated,
                    asserted_by=actor, asserted_at=at,
                    derived_from=derived_from)
        self._facts.append(fact)
        self._by_subject_prop.setdefault((subject, prop), []).append(fact.fact_id)
        return fact

    def _append_relation(self, subject: str, prop: TermName, functional: bool,
                         annotated: AnnotatedValue, actor: str, at: datetime,
                         derived_from: int | None) -> Fact:
        if functional:
            for fid in self._by_subject_prop.get((subject, prop), ()):
                self._superseded.add(fid)
        return self._append(subject, prop, FactKind.RELATION, annotated,
                            actor, at, derived_from)

    def _touch(self, subject: str, actor: str, at: datetime, change: str) -> None:
        ind = self._individuals[subject]
        if at >= ind.provenance.last_modified_at:
            record = replace(ind.provenance, last_modified_by=actor,
                             last_modified_at=at, last_change=change)
            self._individuals[subject] = replace(ind, provenance=record)

    # --- resolution -------------------------------------------------------

    def _current_candidates(self, subject: str, prop: TermName) -> list[Fact]:
        ids = self._by_subject_prop.get((subject, prop), ())
        return [self._facts[fid - 1] for fid in ids
                if fid not in self._superseded]

    def get_current(self, subject: str, prop: TermName | str,
                    policy: ResolutionPolicy = LATEST):
        """Resolve the current value of (subject, property) under a policy.

        LATEST and CONFIDENT return a single AnnotatedValue or None;
        ALL returns every current candidate as a tuple, in assertion order.
        """
        prop = as_term(prop)
        with self._lock:
            self.get_individual(subject)
            if not (self.schema.has_data_property(prop)
                    or self.schema.has_object_property(prop)):
                raise UnknownProperty(f"unknown property {prop}")
            candidates = self._current_candidates(subject, prop)
            if policy.kind == "all":
                return tuple(f.annotated for f in candidates)
            if policy.kind == "confident":
                threshold = policy.threshold
                if threshold is None:
                    threshold = DEFAULT_CONFIDENCE_THRESHOLD
                candidates = [f for f in candidates
                              if f.annotated.probability >= threshold]
            if not candidates:
                return None
            best = max(candidates, key=lambda f: (f.annotated.timestamp,
                                                  f.fact_id))
            return best.annotated

    def history(self, subject: str, prop: TermName | str) -> list[Fact]:
        """Every fact ever asserted for (subject, property), in fact order."""
        prop = as_term(prop)
        with self._lock:
            self.get_individual(subject)
            ids = self._by_subject_prop.get((subject, prop), ())
            return [self._facts[fid - 1] for fid in ids]

    def facts(self) -> tuple[Fact, ...]:
        with self._lock:
            return tuple(self._facts)

    def is_superseded(self, fact_id: int) -> bool:
        return fact_id in self._superseded

    def query(self, pattern: QueryPattern = QueryPattern()) -> list[Fact]:
        """All current (non-superseded) facts matching every constraint."""
        with self._lock:
            if pattern.subject is not None:
                self.get_individual(pattern.subject)
            if pattern.property is not None and not (
                    self.schema.has_data_property(pattern.property)
                    or self.schema.has_object_property(pattern.property)):
                raise UnknownTerm(f"unknown property {pattern.property}")
            if pattern.class_term is not None and not self.schema.has_class(
                    pattern.class_term):
                raise UnknownTerm(f"unknown class {pattern.class_term}")
            out = []
            for fact in self._facts:
                if fact.fact_id in self._superseded:
                    continue
                if pattern.subject is not None and fact.subject != pattern.subject:
                    continue
                if pattern.property is not None and fact.property != pattern.property:
                    continue
                if pattern.class_term is not None:
                    subject_class = self._individuals[fact.subject].class_term
                    if not self.schema.is_subclass_of(subject_class,
                                                      pattern.class_term):
                        continue
                if pattern.value_predicate is not None:
                    op, operand = pattern.value_predicate
                    try:
                        if not _OPS[op](fact.annotated.value, operand):
                            continue
                    except TypeError:
                        continue
                out.append(fact)
            return out

    # --- location granularity ---------------------------------------------

    def location_at_granularity(self, subject: str, level: int) -> str | None:
        """Walk the current ``locatedin`` chain ``level`` steps up.

        Level 0 is the directly asserted location; each further level is
        one containment step. None when the chain is shorter, or when no
        ``locatedin`` property applies to a node on the chain.
        """
        with self._lock:
            self.get_individual(subject)
            current = subject
            for _ in range(level + 1):
                prop = self._locatedin_for(current)
                if prop is None:
                    return None
                annotated = self.get_current(current, prop, LATEST)
                if annotated is None:
                    return None
                current = annotated.value
            return current

    def _locatedin_for(self, individual_id: str) -> TermName | None:
        cls = self._individuals[individual_id].class_term
        applicable = [p.name for p in self.schema.object_properties()
                      if p.name.local == "locatedin"
                      and self.schema.is_subclass_of(cls, p.domain)]
        if not applicable:
            return None
        return sorted(applicable)[0]

    # --- merge --------------------------------------------------------------

    def merge(self, other: "ContextStore") -> "ContextStore":
        """Aggregate two stores built against the identical schema.

        Individuals are unioned (same id requires the same class); facts
        are interleaved by fine-grained timestamp, then origin (self
        first), then original fact id, and renumbered. Functional-property
        supersession is replayed over the merged order.
        """
        if self.schema.fingerprint() != other.schema.fingerprint():
            raise SchemaMismatch("stores were built against different schemas")
        with self._lock, other._lock:
            merged = ContextStore(self.schema, self.units)
            for ind in self._individuals.values():
                merged._individuals[ind.id] = ind
            for ind in other._individuals.values():
                mine = merged._individuals.get(ind.id)
                if mine is None:
                    merged._individuals[ind.id] = ind
                    continue
                if mine.class_term != ind.class_term:
                    raise IndividualClassConflict(
                        f"{ind.id!r} is {mine.class_term} on one side and "
                        f"{ind.class_term} on the other")
                merged._individuals[ind.id] = _merge_individual(mine, ind)
            tagged = [(f.annotated.timestamp, 0, f.fact_id, f)
                      for f in self._facts]
            tagged += [(f.annotated.timestamp, 1, f.fact_id, f)
                       for f in other._facts]
            tagged.sort(key=lambda t: t[:3])
            id_map: dict[tuple[int, int], int] = {}
            for new_id, (_, origin, old_id, _) in enumerate(tagged, start=1):
                id_map[(origin, old_id)] = new_id
            for _, origin, old_id, fact in tagged:
                derived_from = fact.derived_from
                if derived_from is not None:
                    derived_from = id_map[(origin, derived_from)]
                renumbered = replace(fact, fact_id=id_map[(origin, old_id)],
                                     derived_from=derived_from)
                functional = (
                    renumbered.kind is FactKind.RELATION
                    and self.schema.get_object_property(renumbered.property).functional)
                key = (renumbered.subject, renumbered.property)
                if functional:
                    for fid in merged._by_subject_prop.get(key, ()):
                        merged._superseded.add(fid)
                merged._facts.append(renumbered)
                merged._by_subject_prop.setdefault(key, []).append(
                    renumbered.fact_id)
            return merged

    # --- apply support --------------------------------------------------------

    def _snapshot(self):
        with self._lock:
            return (dict(self._individuals), list(self._facts),
                    set(self._superseded),
                    {k: list(v) for k, v in self._by_subject_prop.items()})

    def _restore(self, snapshot) -> None:
        with self._lock:
            individuals, facts, superseded, index = snapshot
            self._individuals = individuals
            self._facts = facts
            self._superseded = superseded
            self._by_subject_prop = index


def _merge_individual(a: Individual, b: Individual) -> Individual:
    first = a if a.provenance.created_at <= b.provenance.created_at else b
    last = b if b.provenance.last_modified_at > a.provenance.last_modified_at else a
    record = ProvenanceRecord(
        created_by=first.provenance.created_by,
        created_at=first.provenance.created_at,
        last_modified_by=last.provenance.last_modified_by,
        last_modified_at=last.provenance.last_modified_at,
        last_change=last.provenance.last_change,
    )
    return replace(a, provenance=record)


def compare_annotated(units: UnitRegistry, a: AnnotatedValue,
                      b: AnnotatedValue) -> Ordering:
    """Order two annotated magnitudes, converting across unit encodings."""
    return units.compare(a.value, a.unit, b.value, b.unit)
