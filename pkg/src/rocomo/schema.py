"""Registry for the core and application ontologies.

Holds class definitions (a single-parent forest rooted at six pre-seeded
top-level classes), object and data property definitions, and declared
equivalences to terms of external ontologies. Definitions happen during
load; afterwards the registry is read-mostly and all mutation is
serialized under an internal lock.
"""

from __future__ import annotations

import enum
import hashlib
import threading
from dataclasses import dataclass, field

from .base import Issue, TermName, as_term
from .errors import (
    ConflictingMapping,
    DuplicateTerm,
    UnknownClass,
    UnknownParent,
    UnknownProperty,
    UnknownTerm,
    WouldCreateCycle,
)

#: The six top-level classes, pre-seeded in every registry.
ROOT_CLASSES = ("entity", "event", "activity", "location", "time", "goal")


class ValueType(enum.Enum):
    TEXT = "text"
    INTEGER = "integer"
    REAL = "real"
    BOOLEAN = "boolean"
    DATETIME = "datetime"


class Volatility(enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


class TermKind(enum.Enum):
    CLASS = "class"
    PROPERTY = "property"


@dataclass(frozen=True)
class ClassDef:
    name: TermName
    parent: TermName | None  # None only for the six pre-seeded roots
    label: str
    equivalences: tuple[str, ...] = ()


@dataclass(frozen=True)
class ObjectPropertyDef:
    name: TermName
    domain: TermName
    range: TermName
    functional: bool = False
    inverse_functional: bool = False
    inverse_of: tuple[TermName, ...] = ()
    sub_property_of: TermName | None = None
    equivalences: tuple[str, ...] = ()


@dataclass(frozen=True)
class DataPropertyDef:
    name: TermName
    domain: TermName
    value_type: ValueType
    volatility: Volatility
    sub_property_of: TermName | None = None
    equivalences: tuple[str, ...] = ()


@dataclass
class _SchemaState:
    classes: dict[TermName, ClassDef] = field(default_factory=dict)
    object_props: dict[TermName, ObjectPropertyDef] = field(default_factory=dict)
    data_props: dict[TermName, DataPropertyDef] = field(default_factory=dict)
    # Effective symmetric inverse links (a superset of the declared ones).
    inverses: dict[TermName, frozenset[TermName]] = field(default_factory=dict)
    equivalences: dict[str, tuple[TermKind, TermName]] = field(default_factory=dict)


class SchemaRegistry:
    def __init__(self):
        self._s = _SchemaState()
        self._lock = threading.RLock()
        for root in ROOT_CLASSES:
            name = TermName(root, root)
            self._s.classes[name] = ClassDef(name=name, parent=None, label=root)

    # --- classes ------------------------------------------------------

    def define_class(self, name: TermName | str, parent: TermName | str,
                     label: str | None = None,
                     equivalences: tuple[str, ...] = ()) -> ClassDef:
        name = as_term(name)
        parent = as_term(parent)
        with self._lock:
            if name in self._s.classes:
                raise DuplicateTerm(f"class {name} already defined")
            if name == parent:
                raise WouldCreateCycle(f"class {name} cannot be its own parent")
            if parent not in self._s.classes:
                raise UnknownParent(f"unknown parent class {parent}")
            cdef = ClassDef(name=name, parent=parent,
                            label=label if label is not None else name.local,
                            equivalences=tuple(equivalences))
            self._s.classes[name] = cdef
            return cdef

    def has_class(self, name: TermName | str) -> bool:
        return as_term(name) in self._s.classes

    def get_class(self, name: TermName | str) -> ClassDef:
        term = as_term(name)
        try:
            return self._s.classes[term]
        except KeyError:
            raise UnknownClass(f"unknown class {term}") from None

    def is_subclass_of(self, a: TermName | str, b: TermName | str) -> bool:
        """True iff ``b`` is reachable from ``a`` by parent edges (reflexive)."""
        a = as_term(a)
        b = as_term(b)
        if b not in self._s.classes:
            raise UnknownClass(f"unknown class {b}")
        current: TermName | None = a
        if current not in self._s.classes:
            raise UnknownClass(f"unknown class {a}")
        while current is not None:
            if current == b:
                return True
            current = self._s.classes[current].parent
        return False

    def classes(self) -> tuple[ClassDef, ...]:
        return tuple(self._s.classes.values())

    # --- properties ---------------------------------------------------

    def define_object_property(self, prop: ObjectPropertyDef) -> ObjectPropertyDef:
        with self._lock:
            self._check_property_name_free(prop.name)
            if prop.domain not in self._s.classes:
                raise UnknownClass(f"unknown domain class {prop.domain}")
            if prop.range not in self._s.classes:
                raise UnknownClass(f"unknown range class {prop.range}")
            for inv in prop.inverse_of:
                if inv not in self._s.object_props:
                    raise UnknownProperty(f"unknown inverse property {inv}")
            if prop.sub_property_of is not None:
                if prop.sub_property_of not in self._s.object_props:
                    raise UnknownProperty(
                        f"unknown super-property {prop.sub_property_of}")
            self._s.object_props[prop.name] = prop
            # Inverse registration is symmetric.
            links = self._s.inverses.get(prop.name, frozenset()) | set(prop.inverse_of)
            self._s.inverses[prop.name] = frozenset(links)
            for inv in prop.inverse_of:
                other = self._s.inverses.get(inv, frozenset())
                self._s.inverses[inv] = other | {prop.name}
            return prop

    def define_data_property(self, prop: DataPropertyDef) -> DataPropertyDef:
        with self._lock:
            self._check_property_name_free(prop.name)
            if prop.domain not in self._s.classes:
                raise UnknownClass(f"unknown domain class {prop.domain}")
            if prop.sub_property_of is not None:
                if prop.sub_property_of not in self._s.data_props:
                    raise UnknownProperty(
                        f"unknown super-property {prop.sub_property_of}")
            self._s.data_props[prop.name] = prop
            return prop

    def _check_property_name_free(self, name: TermName) -> None:
        if name in self._s.object_props or name in self._s.data_props:
            raise DuplicateTerm(f"property {name} already defined")

    def has_object_property(self, name: TermName | str) -> bool:
        return as_term(name) in self._s.object_props

    def has_data_property(self, name: TermName | str) -> bool:
        return as_term(name) in self._s.data_props

    def get_object_property(self, name: TermName | str) -> ObjectPropertyDef:
        term = as_term(name)
        try:
            return self._s.object_props[term]
        except KeyError:
            raise UnknownProperty(f"unknown object property {term}") from None

    def get_data_property(self, name: TermName | str) -> DataPropertyDef:
        term = as_term(name)
        try:
            return self._s.data_props[term]
        except KeyError:
            raise UnknownProperty(f"unknown data property {term}") from None

    def inverses_of(self, name: TermName | str) -> frozenset[TermName]:
        """Effective (symmetric) inverse links of an object property."""
        term = as_term(name)
        if term not in self._s.object_props:
            raise UnknownProperty(f"unknown object property {term}")
        return self._s.inverses.get(term, frozenset())

    def object_properties(self) -> tuple[ObjectPropertyDef, ...]:
        return tuple(self._s.object_props.values())

    def data_properties(self) -> tuple[DataPropertyDef, ...]:
        return tuple(self._s.data_props.values())

    # --- equivalences ---------------------------------------------------

    def declare_equivalence(self, local: TermName | str, kind: TermKind,
                            external_iri: str) -> None:
        local = as_term(local)
        with self._lock:
            if kind is TermKind.CLASS:
                if local not in self._s.classes:
                    raise UnknownTerm(f"unknown class {local}")
            else:
                if (local not in self._s.object_props
                        and local not in self._s.data_props):
                    raise UnknownTerm(f"unknown property {local}")
            existing = self._s.equivalences.get(external_iri)
            if existing is not None and existing != (kind, local):
                raise ConflictingMapping(
                    f"{external_iri} already mapped to {existing[0].value} "
                    f"{existing[1]}")
            self._s.equivalences[external_iri] = (kind, local)

    def resolve_external(self, external_iri: str) -> tuple[TermKind, TermName] | None:
        """Resolve an external IRI to a local term; None when not mapped."""
        return self._s.equivalences.get(external_iri)

    def equivalences(self) -> tuple[tuple[str, TermKind, TermName], ...]:
        return tuple((iri, kind, term)
                     for iri, (kind, term) in self._s.equivalences.items())

    # --- validation -----------------------------------------------------

    def validate(self) -> list[Issue]:
        """Check cross-definition coherence; returns all detected issues."""
        issues: list[Issue] = []
        by_label: dict[str, list[TermName]] = {}
        for cdef in self._s.classes.values():
            by_label.setdefault(cdef.label, []).append(cdef.name)
            if cdef.parent is not None and cdef.parent not in self._s.classes:
                issues.append(Issue("unreachable-class", "error", str(cdef.name),
                                    f"parent {cdef.parent} is not defined"))
        for label, names in sorted(by_label.items()):
            if len(names) > 1:
                listed = ", ".join(str(n) for n in sorted(names))
                issues.append(Issue("ambiguous-label", "warning", label,
                                    f"classes {listed} share the label {label!r}"))
        seen_pairs: set[frozenset[TermName]] = set()
        for name, links in sorted(self._s.inverses.items()):
            p = self._s.object_props.get(name)
            if p is None:
                continue
            for inv in sorted(links):
                pair = frozenset((name, inv))
                if pair in seen_pairs:
                    continue
                seen_pairs.add(pair)
                q = self._s.object_props.get(inv)
                if q is None:
                    continue
                if p.domain != q.range or p.range != q.domain:
                    issues.append(Issue(
                        "inverse-domain-range-mismatch", "error",
                        f"{name}/{inv}",
                        f"inverse pair domains/ranges are not mutually swapped: "
                        f"{name}: {p.domain}->{p.range}, {inv}: {q.domain}->{q.range}"))
        for p in self._s.object_props.values():
            if p.sub_property_of is not None:
                sup = self._s.object_props.get(p.sub_property_of)
                if sup is not None and not self.is_subclass_of(p.domain, sup.domain):
                    issues.append(Issue(
                        "subproperty-domain-mismatch", "error", str(p.name),
                        f"domain {p.domain} is not a subclass of "
                        f"super-property domain {sup.domain}"))
        for d in self._s.data_props.values():
            if d.sub_property_of is not None:
                sup = self._s.data_props.get(d.sub_property_of)
                if sup is not None and not self.is_subclass_of(d.domain, sup.domain):
                    issues.append(Issue(
                        "subproperty-domain-mismatch", "error", str(d.name),
                        f"domain {d.domain} is not a subclass of "
                        f"super-property domain {sup.domain}"))
        return issues

    # --- identity -------------------------------------------------------

    def fingerprint(self) -> str:
        """Stable digest of every definition, for store-merge compatibility."""
        parts: list[str] = []
        for c in sorted(self._s.classes.values(), key=lambda c: c.name):
            parts.append(f"c|{c.name}|{c.parent}|{c.label}|{','.join(sorted(c.equivalences))}")
        for p in sorted(self._s.object_props.values(), key=lambda p: p.name):
            inv = ",".join(str(t) for t in sorted(self._s.inverses.get(p.name, frozenset())))
            parts.append(f"o|{p.name}|{p.domain}|{p.range}|{int(p.functional)}|"
                         f"{int(p.inverse_functional)}|{inv}|{p.sub_property_of}")
        for d in sorted(self._s.data_props.values(), key=lambda d: d.name):
            parts.append(f"d|{d.name}|{d.domain}|{d.value_type.value}|"
                         f"{d.volatility.value}|{d.sub_property_of}")
        for iri in sorted(self._s.equivalences):
            kind, term = self._s.equivalences[iri]
            parts.append(f"e|{iri}|{kind.value}|{term}")
        return hashlib.sha256("\n".join(parts).encode("utf-8")).hexdigest()

    # --- apply support ----------------------------------------------------

    def _snapshot(self) -> _SchemaState:
        with self._lock:
            return _SchemaState(
                classes=dict(self._s.classes),
                object_props=dict(self._s.object_props),
                data_props=dict(self._s.data_props),
                inverses=dict(self._s.inverses),
                equivalences=dict(self._s.equivalences),
            )

    def _restore(self, snapshot: _SchemaState) -> None:
        with self._lock:
            self._s = snapshot
