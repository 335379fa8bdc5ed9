"""Use case points sizing engine.

Three size models over one project description: the classical banded-weight
computation (``karner``), a fuzzy graduation of the use case complexity
weights (``fuzzy``), and a trained feed-forward network (``mlp``); plus
accuracy metrics, corpus handling, and a CLI.
"""

from .karner import (
    HighRiskTeamError,
    SizeEstimate,
    effort,
    environmental_factor,
    schneider_rate,
    technical_factor,
    uucp,
)
from .model import (
    ActorSpec,
    ClampWarning,
    FactorRatings,
    ProjectSpec,
    Scenario,
    TransactionPolicy,
    UseCaseSpec,
    ValidationError,
    count_transactions,
    effective_transactions,
)

__version__ = "0.1.0"

__all__ = [
    "ActorSpec",
    "ClampWarning",
    "FactorRatings",
    "HighRiskTeamError",
    "ProjectSpec",
    "Scenario",
    "SizeEstimate",
    "TransactionPolicy",
    "UseCaseSpec",
    "ValidationError",
    "__version__",
    "count_transactions",
    "effective_transactions",
    "effort",
    "environmental_factor",
    "schneider_rate",
    "technical_factor",
    "uucp",
]
