"""Domain types for use-case-based sizing: projects, use cases, actors, factor
ratings, and transaction counting under a configurable extension policy.

All types are immutable after construction and validate their invariants in
``__post_init__``; every operation here is a pure function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


class ValidationError(ValueError):
    """A domain object or operation input violates its invariants."""


class ClampWarning(UserWarning):
    """A transaction count fell outside the 1..10 weight range and was clamped."""


RELATIONS = ("base", "include", "extend")
ACTOR_KINDS = ("simple", "average", "complex")


def _require_identifier(value: object, what: str) -> None:
    if not isinstance(value, str) or not value.strip():
        raise ValidationError(f"{what} must be a non-blank string, got {value!r}")

MIN_TRANSACTION_LEVEL = 1
MAX_TRANSACTION_LEVEL = 10


@dataclass(frozen=True)
class TransactionPolicy:
    """How extension-part transactions are weighted relative to main-scenario ones.

    ``extension_weight`` = 1.0 counts extensions at full value (the classical
    rule); lower values discount them.  0.3 is shipped as the ``discounted``
    preset.
    """

    extension_weight: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.extension_weight <= 1.0:
            raise ValidationError(
                f"extension_weight must be in [0, 1], got {self.extension_weight}"
            )

    @classmethod
    def karner(cls) -> "TransactionPolicy":
        return cls(extension_weight=1.0)

    @classmethod
    def discounted(cls) -> "TransactionPolicy":
        return cls(extension_weight=0.3)


@dataclass(frozen=True)
class Scenario:
    """Transaction counts of a structured use case scenario."""

    main_steps: int
    extension_steps: int = 0

    def __post_init__(self):
        if not isinstance(self.main_steps, int) or isinstance(self.main_steps, bool):
            raise ValidationError(f"main_steps must be an integer, got {self.main_steps!r}")
        if not isinstance(self.extension_steps, int) or isinstance(self.extension_steps, bool):
            raise ValidationError(
                f"extension_steps must be an integer, got {self.extension_steps!r}"
            )
        if self.main_steps < 1:
            raise ValidationError(
                f"a use case needs at least one main-scenario transaction, got {self.main_steps}"
            )
        if self.extension_steps < 0:
            raise ValidationError(
                f"extension_steps must be non-negative, got {self.extension_steps}"
            )


@dataclass(frozen=True)
class UseCaseSpec:
    """One use case, sized either by a direct transaction count or a Scenario."""

    name: str
    transactions: int | None = None
    scenario: Scenario | None = None
    relation: str = "base"

    def __post_init__(self):
        _require_identifier(self.name, "use case name")
        if (self.transactions is None) == (self.scenario is None):
            raise ValidationError(
                f"use case {self.name!r}: give exactly one of a transaction count or a scenario"
            )
        if self.transactions is not None:
            if not isinstance(self.transactions, int) or isinstance(self.transactions, bool):
                raise ValidationError(
                    f"use case {self.name!r}: transaction count must be an integer, "
                    f"got {self.transactions!r}"
                )
            if self.transactions < 1:
                raise ValidationError(
                    f"use case {self.name!r}: transaction count must be >= 1, "
                    f"got {self.transactions}"
                )
        if self.relation not in RELATIONS:
            raise ValidationError(
                f"use case {self.name!r}: relation must be one of {RELATIONS}, "
                f"got {self.relation!r}"
            )


@dataclass(frozen=True)
class ActorSpec:
    """An actor role.  simple = system interface, average = interactive or
    protocol-driven interface, complex = graphical interface."""

    name: str
    kind: str

    def __post_init__(self):
        _require_identifier(self.name, "actor name")
        if self.kind not in ACTOR_KINDS:
            raise ValidationError(
                f"actor {self.name!r}: kind must be one of {ACTOR_KINDS}, got {self.kind!r}"
            )


@dataclass(frozen=True)
class FactorRatings:
    """13 technical and 8 environmental factor ratings, each an integer 0..5."""

    technical: tuple[int, ...]
    environmental: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "technical", tuple(self.technical))
        object.__setattr__(self, "environmental", tuple(self.environmental))
        self._check("technical", self.technical, 13)
        self._check("environmental", self.environmental, 8)

    @staticmethod
    def _check(label: str, ratings: tuple, expected: int) -> None:
        if len(ratings) != expected:
            raise ValidationError(
                f"{label} ratings: expected {expected} entries, got {len(ratings)}"
            )
        for i, r in enumerate(ratings, start=1):
            if not isinstance(r, int) or isinstance(r, bool) or not 0 <= r <= 5:
                raise ValidationError(
                    f"{label} factor F{i}: rating must be an integer in 0..5, got {r!r}"
                )

    @classmethod
    def nominal(cls) -> "FactorRatings":
        """All factors rated 3 (the neutral level: TF = EF = 1)."""
        return cls(technical=(3,) * 13, environmental=(3,) * 8)


@dataclass(frozen=True)
class ProjectSpec:
    """A project: its use cases, actors, factor ratings, and optional actuals."""

    id: str
    use_cases: tuple[UseCaseSpec, ...]
    actors: tuple[ActorSpec, ...]
    factors: FactorRatings
    actual_effort_ph: float | None = None
    actual_size_uucp: float | None = None

    def __post_init__(self):
        _require_identifier(self.id, "project id")
        object.__setattr__(self, "use_cases", tuple(self.use_cases))
        object.__setattr__(self, "actors", tuple(self.actors))
        if not self.use_cases:
            raise ValidationError(f"project {self.id!r}: needs at least one use case")
        if not self.actors:
            raise ValidationError(f"project {self.id!r}: needs at least one actor")
        for label, value in (
            ("actual_effort_ph", self.actual_effort_ph),
            ("actual_size_uucp", self.actual_size_uucp),
        ):
            if value is not None and not value > 0:
                raise ValidationError(
                    f"project {self.id!r}: {label} must be positive, got {value}"
                )


def count_transactions(uc: UseCaseSpec, policy: TransactionPolicy) -> float:
    """Transaction count of a use case under the given extension policy.

    Direct counts are returned as-is; scenarios yield
    ``main_steps + extension_weight * extension_steps``.
    """
    if uc.transactions is not None:
        return float(uc.transactions)
    return uc.scenario.main_steps + policy.extension_weight * uc.scenario.extension_steps


def effective_transactions(uc: UseCaseSpec, policy: TransactionPolicy) -> int:
    """Integer transaction level for weight lookup: rounded half away from
    zero, clamped to 1..10 (with a ClampWarning above 10)."""
    raw = count_transactions(uc, policy)
    level = int(math.floor(raw + 0.5))  # counts are non-negative
    if level > MAX_TRANSACTION_LEVEL:
        warnings.warn(
            f"use case {uc.name!r}: {raw:g} transactions exceed the 10-transaction "
            f"weight range, clamped to {MAX_TRANSACTION_LEVEL}",
            ClampWarning,
            stacklevel=2,
        )
        level = MAX_TRANSACTION_LEVEL
    return max(level, MIN_TRANSACTION_LEVEL)
