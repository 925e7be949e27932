"""Shared vocabulary primitives: term names, identifiers, timestamps, issues.

Terms name schema concepts (classes and properties) and follow the
``namespace#local`` syntax; identifiers name individual instances in a
store. Both are case-sensitive. Timestamps are naive ISO-8601 datetimes
compared as instants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from .errors import InvalidIdentifier, InvalidTerm

TERM_PART_RE = re.compile(r"^[a-z][a-z0-9]*$")
IDENTIFIER_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")

# Reserved actor id for engine-originated changes; never a store individual.
SYSTEM = "SYSTEM"

EPOCH = datetime(1970, 1, 1)


@dataclass(frozen=True, order=True)
class TermName:
    """A ``namespace#local`` concept name.

    The short form ``person`` collapses to namespace ``person``, local
    ``person``; ``person#daughter`` keeps both parts. Class terms and
    property terms live in separate registries, so the same TermName can
    denote a class and, independently, a property.
    """

    namespace: str
    local: str

    @classmethod
    def parse(cls, text: str) -> "TermName":
        if not isinstance(text, str) or not text:
            raise InvalidTerm(f"empty term name: {text!r}")
        namespace, sep, local = text.partition("#")
        if not sep:
            local = namespace
        if not TERM_PART_RE.match(namespace) or not TERM_PART_RE.match(local):
            raise InvalidTerm(
                f"term {text!r} does not match namespace#local with parts [a-z][a-z0-9]*"
            )
        return cls(namespace, local)

    def __str__(self) -> str:
        if self.namespace == self.local:
            return self.local
        return f"{self.namespace}#{self.local}"


def as_term(value: "TermName | str") -> TermName:
    if isinstance(value, TermName):
        return value
    return TermName.parse(value)


def check_identifier(value: str) -> str:
    """Validate an individual id; SYSTEM is reserved for actors only."""
    if not isinstance(value, str) or not IDENTIFIER_RE.match(value):
        raise InvalidIdentifier(
            f"identifier {value!r} must match [A-Za-z][A-Za-z0-9_-]*"
        )
    if value == SYSTEM:
        raise InvalidIdentifier("SYSTEM is a reserved actor id")
    return value


def parse_datetime(text: str) -> datetime:
    """Parse a naive ISO-8601 datetime; timezone offsets are rejected."""
    try:
        value = datetime.fromisoformat(text)
    except ValueError as exc:
        raise InvalidTerm(f"bad datetime literal {text!r}: {exc}") from None
    if value.tzinfo is not None:
        raise InvalidTerm(f"datetime {text!r} must be timezone-naive")
    return value


def format_datetime(value: datetime) -> str:
    return value.isoformat()


@dataclass(frozen=True)
class Issue:
    """A validation finding; ``severity`` is ``error`` or ``warning``."""

    code: str
    severity: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}:{self.code} {self.subject}: {self.message}"
