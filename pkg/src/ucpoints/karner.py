"""Classical Use Case Points computation.

Covers complexity classification of use cases and actors, unadjusted points
(UUCP), the technical and environmental adjustment factors, adjusted points
(UCP), and effort conversion at either Karner's flat 20 ph/UCP or Schneider's
environment-dependent 20/28 rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import (
    ActorSpec,
    FactorRatings,
    ProjectSpec,
    TransactionPolicy,
    UseCaseSpec,
    ValidationError,
    effective_transactions,
)

KARNER_RATE_PH_PER_UCP = 20
SCHNEIDER_ELEVATED_RATE_PH_PER_UCP = 28


@dataclass(frozen=True)
class WeightTable:
    """Class weights and the transaction bands that select the use case class.

    Bands: simple = 1..simple_max, average = simple_max+1..average_max,
    complex = average_max+1 and up.
    """

    use_case_weights: Mapping[str, float]
    actor_weights: Mapping[str, float]
    simple_max_transactions: int = 3
    average_max_transactions: int = 7

    def __post_init__(self):
        for label, weights in (
            ("use_case_weights", self.use_case_weights),
            ("actor_weights", self.actor_weights),
        ):
            if set(weights) != {"simple", "average", "complex"}:
                raise ValidationError(f"{label} must map exactly simple/average/complex")
            if not weights["simple"] < weights["average"] < weights["complex"]:
                raise ValidationError(f"{label} must be strictly increasing across classes")
        if not 1 <= self.simple_max_transactions < self.average_max_transactions:
            raise ValidationError("transaction bands must partition the positive integers")


DEFAULT_WEIGHTS = WeightTable(
    use_case_weights={"simple": 5, "average": 10, "complex": 15},
    actor_weights={"simple": 1, "average": 2, "complex": 3},
)


@dataclass(frozen=True)
class FactorConstants:
    """Weights and affine constants of the two adjustment factor formulas."""

    tf_weights: tuple[float, ...] = (2, 1, 1, 1, 1, 0.5, 0.5, 2, 1, 1, 1, 1, 1)
    ef_weights: tuple[float, ...] = (1.5, -1, 0.5, 0.5, 1, 1, -1, 2)
    tf_c1: float = 0.6
    tf_c2: float = 0.01
    ef_c1: float = 1.4
    ef_c2: float = -0.03

    def __post_init__(self):
        if len(self.tf_weights) != 13 or not math.isclose(sum(self.tf_weights), 14.0):
            raise ValidationError("technical weights must be the 13 standard entries (sum 14)")
        if len(self.ef_weights) != 8 or not math.isclose(sum(self.ef_weights), 4.5):
            raise ValidationError("environmental weights must be the 8 standard entries (sum 4.5)")


DEFAULT_CONSTANTS = FactorConstants()


@dataclass(frozen=True)
class SizeEstimate:
    """A size estimate produced by one model, with its adjustment factors."""

    model_tag: str
    uucp: float
    tf: float
    ef: float
    ucp: float
    effort_ph: float | None = None
    rate_ph_per_ucp: int | None = None

    def __post_init__(self):
        if self.model_tag not in ("karner", "fuzzy", "mlp"):
            raise ValidationError(f"unknown model tag {self.model_tag!r}")
        if not math.isclose(self.ucp, self.uucp * self.tf * self.ef, rel_tol=1e-9, abs_tol=1e-9):
            raise ValidationError(
                f"inconsistent estimate: ucp={self.ucp} != uucp*tf*ef="
                f"{self.uucp * self.tf * self.ef}"
            )
        if self.rate_ph_per_ucp is not None and self.rate_ph_per_ucp not in (
            KARNER_RATE_PH_PER_UCP,
            SCHNEIDER_ELEVATED_RATE_PH_PER_UCP,
        ):
            raise ValidationError(f"rate must be 20 or 28 ph/UCP, got {self.rate_ph_per_ucp}")


class HighRiskTeamError(Exception):
    """The environmental ratings signal a team at significant risk of failure.

    No effort rate is defined at this level; carries the risk total ``total``.
    """

    def __init__(self, total: int):
        self.total = total
        super().__init__(
            f"environmental risk total T={total} (>= 5): team restructure recommended "
            f"before estimating; pass force=True to apply the elevated 28 ph/UCP rate anyway"
        )


def classify_use_case(transactions: int, table: WeightTable = DEFAULT_WEIGHTS) -> str:
    """Class of a use case from its transaction count: 1-3 simple, 4-7 average,
    8+ complex (under the default bands)."""
    if not isinstance(transactions, int) or isinstance(transactions, bool) or transactions < 1:
        raise ValidationError(f"transaction count must be a positive integer, got {transactions!r}")
    if transactions <= table.simple_max_transactions:
        return "simple"
    if transactions <= table.average_max_transactions:
        return "average"
    return "complex"


def use_case_points(
    use_cases: Iterable[UseCaseSpec],
    policy: TransactionPolicy,
    table: WeightTable = DEFAULT_WEIGHTS,
) -> float:
    """Summed class weights of the use cases (the use case weight factor)."""
    return float(
        sum(
            table.use_case_weights[classify_use_case(effective_transactions(uc, policy), table)]
            for uc in use_cases
        )
    )


def actor_points(actors: Iterable[ActorSpec], table: WeightTable = DEFAULT_WEIGHTS) -> float:
    """Summed class weights of the actors (the actor weight factor)."""
    return float(sum(table.actor_weights[actor.kind] for actor in actors))


def uucp(
    project: ProjectSpec,
    policy: TransactionPolicy | None = None,
    table: WeightTable = DEFAULT_WEIGHTS,
) -> float:
    """Unadjusted use case points: use case weight factor + actor weight factor."""
    policy = policy or TransactionPolicy.karner()
    return use_case_points(project.use_cases, policy, table) + actor_points(project.actors, table)


def technical_factor(
    ratings: FactorRatings, constants: FactorConstants = DEFAULT_CONSTANTS
) -> float:
    """TF = 0.6 + 0.01 * sum(F_i * W_i) over the 13 technical factors; in [0.6, 1.3]."""
    total = sum(f * w for f, w in zip(ratings.technical, constants.tf_weights))
    return constants.tf_c1 + constants.tf_c2 * total


def environmental_factor(
    ratings: FactorRatings, constants: FactorConstants = DEFAULT_CONSTANTS
) -> float:
    """EF = 1.4 - 0.03 * sum(F_i * W_i) over the 8 environmental factors; in [0.425, 1.7]."""
    total = sum(f * w for f, w in zip(ratings.environmental, constants.ef_weights))
    return constants.ef_c1 + constants.ef_c2 * total


def ucp(uucp_value: float, tf: float, ef: float) -> float:
    """Adjusted use case points: UUCP * TF * EF."""
    return uucp_value * tf * ef


def uucp_from_ucp(ucp_value: float, tf: float, ef: float) -> float:
    """Invert the adjustment: recover UUCP from UCP and the two factors."""
    return ucp_value / (tf * ef)


def schneider_rate(ratings: FactorRatings, force: bool = False) -> int:
    """Effort rate (ph/UCP) from the environmental ratings.

    Let T = count of E1..E6 rated below 3 plus count of E7..E8 rated above 3.
    T <= 2 selects 20, T in {3, 4} selects 28, and T >= 5 signals a high-risk
    team: HighRiskTeamError is raised unless ``force`` overrides with 28.

    The published rule text is ambiguous at T = 3 ("three or less" vs "three or
    four"); this implementation fixes the only self-consistent reading:
    20 for T <= 2, 28 for T in {3, 4}.
    """
    env = ratings.environmental
    total = sum(1 for r in env[:6] if r < 3) + sum(1 for r in env[6:] if r > 3)
    if total <= 2:
        return KARNER_RATE_PH_PER_UCP
    if total <= 4:
        return SCHNEIDER_ELEVATED_RATE_PH_PER_UCP
    if force:
        return SCHNEIDER_ELEVATED_RATE_PH_PER_UCP
    raise HighRiskTeamError(total)


def effort(ucp_value: float, rate: int) -> float:
    """Effort in person-hours: UCP times the rate."""
    if not ucp_value > 0:
        raise ValidationError(f"ucp must be positive, got {ucp_value}")
    return ucp_value * rate


def estimate(
    project: ProjectSpec,
    policy: TransactionPolicy | None = None,
    table: WeightTable = DEFAULT_WEIGHTS,
    constants: FactorConstants = DEFAULT_CONSTANTS,
) -> SizeEstimate:
    """Full classical size estimate for a project (effort not yet attached)."""
    u = uucp(project, policy, table)
    tf = technical_factor(project.factors, constants)
    ef = environmental_factor(project.factors, constants)
    return SizeEstimate(model_tag="karner", uucp=u, tf=tf, ef=ef, ucp=ucp(u, tf, ef))
