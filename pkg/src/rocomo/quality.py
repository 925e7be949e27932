"""Unit comparability and quality-of-context validation.

Measured values carry a unit name; units belong to a dimension and
convert to that dimension's canonical unit through an affine map
``canonical = scale * x + offset``. Affine (not merely linear) maps are
required because temperature scales carry an offset. Comparisons happen
in canonical units with a fixed equality tolerance.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass

from .base import Issue
from .errors import (
    DimensionMismatch,
    DuplicateUnit,
    UnknownUnit,
    ZeroScale,
)

EQUALITY_TOLERANCE = 1e-9


class Ordering(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


@dataclass(frozen=True)
class UnitDef:
    """A named unit with its affine conversion onto the canonical unit."""

    name: str
    dimension: str
    scale: float
    offset: float = 0.0

    @property
    def is_canonical(self) -> bool:
        return self.scale == 1.0 and self.offset == 0.0


class UnitRegistry:
    """Write-during-setup, read-only-afterwards registry of units.

    Lookup is case-insensitive so that values annotated with e.g.
    ``Fahrenheit`` resolve against a registry entry named ``fahrenheit``;
    the asserted spelling is preserved on the annotated value itself.
    """

    def __init__(self):
        self._units: dict[str, UnitDef] = {}
        self._lock = threading.RLock()

    def register(self, unit: UnitDef) -> None:
        if unit.scale == 0:
            raise ZeroScale(f"unit {unit.name!r} has zero scale")
        key = unit.name.lower()
        with self._lock:
            if key in self._units:
                raise DuplicateUnit(f"unit {unit.name!r} already registered")
            self._units[key] = unit

    def known(self, name: str) -> bool:
        return name.lower() in self._units

    def get(self, name: str) -> UnitDef:
        try:
            return self._units[name.lower()]
        except KeyError:
            raise UnknownUnit(f"unknown unit {name!r}") from None

    def units(self) -> tuple[UnitDef, ...]:
        with self._lock:
            return tuple(self._units.values())

    def to_canonical(self, value: float, name: str) -> float:
        u = self.get(name)
        return u.scale * value + u.offset

    def convert(self, value: float, from_unit: str, to_unit: str) -> float:
        src = self.get(from_unit)
        dst = self.get(to_unit)
        if src.dimension != dst.dimension:
            raise DimensionMismatch(
                f"cannot convert {src.dimension} ({from_unit}) to "
                f"{dst.dimension} ({to_unit})"
            )
        return (src.scale * value + src.offset - dst.offset) / dst.scale

    def compare(self, a_value: float, a_unit: str | None,
                b_value: float, b_unit: str | None) -> Ordering:
        """Order two magnitudes in canonical units.

        Unitless values compare raw against each other; mixing a unitless
        value with a dimensioned one is a dimension mismatch.
        """
        if a_unit is None and b_unit is None:
            left, right = float(a_value), float(b_value)
        elif a_unit is None or b_unit is None:
            raise DimensionMismatch("cannot compare unitless and dimensioned values")
        else:
            src = self.get(a_unit)
            dst = self.get(b_unit)
            if src.dimension != dst.dimension:
                raise DimensionMismatch(
                    f"cannot compare {src.dimension} with {dst.dimension}"
                )
            left = src.scale * float(a_value) + src.offset
            right = dst.scale * float(b_value) + dst.offset
        if abs(left - right) <= EQUALITY_TOLERANCE:
            return Ordering.EQUAL
        return Ordering.LESS if left < right else Ordering.GREATER

    def _snapshot(self) -> dict[str, UnitDef]:
        with self._lock:
            return dict(self._units)

    def _restore(self, snapshot: dict[str, UnitDef]) -> None:
        with self._lock:
            self._units = dict(snapshot)


@dataclass(frozen=True)
class QoC:
    """Imperfection annotations attached to a contextual value.

    Six attributes: accuracy (correctness), probability (certainty of
    being correct, in [0, 1]), coverage (range, free text), resolution
    (smallest perceivable element, positive), mean_error (average error,
    non-negative) and recurrence (repeatability, free text).
    """

    accuracy: float | None = None
    probability: float | None = None
    coverage: str | None = None
    resolution: float | None = None
    mean_error: float | None = None
    recurrence: str | None = None

    def is_empty(self) -> bool:
        return self == EMPTY_QOC


EMPTY_QOC = QoC()


def validate_qoc(qoc: QoC) -> list[Issue]:
    """Return one issue per out-of-bound QoC field; empty when valid."""
    issues: list[Issue] = []
    if qoc.probability is not None and not 0.0 <= qoc.probability <= 1.0:
        issues.append(Issue("qoc-probability", "error", "probability",
                            f"{qoc.probability} outside [0, 1]"))
    if qoc.resolution is not None and qoc.resolution <= 0:
        issues.append(Issue("qoc-resolution", "error", "resolution",
                            f"{qoc.resolution} is not positive"))
    if qoc.mean_error is not None and qoc.mean_error < 0:
        issues.append(Issue("qoc-mean-error", "error", "meanError",
                            f"{qoc.mean_error} is negative"))
    return issues
