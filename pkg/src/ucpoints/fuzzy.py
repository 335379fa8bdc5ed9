"""Fuzzy graduation of use case complexity weights.

Replaces the three-band weight table with ten per-transaction-level weights
produced by a small Mamdani-style system: three triangular input sets peaked
at 2, 6 and 10 transactions, three triangular output sets peaked at weights
5, 10 and 15, one rule per peak pair, centroid defuzzification.

The default defuzzifier integrates the aggregated output set analytically in
exact rational arithmetic, so inputs at a rule peak yield the peak weight
exactly (5.0, 10.0, 15.0) rather than to within float rounding.  A classic
sampled-grid centroid is available by setting ``centroid_step`` in the
configuration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import karner
from .model import (
    ProjectSpec,
    TransactionPolicy,
    ValidationError,
    effective_transactions,
)

CONFIG_FORMAT_VERSION = 1

WEIGHT_FLOOR = 5.0
WEIGHT_CEILING = 15.0

INPUT_PEAKS = (2.0, 6.0, 10.0)
OUTPUT_PEAKS = (5.0, 10.0, 15.0)

ACTIVATIONS = ("min", "product")
AGGREGATIONS = ("max", "sum")


@dataclass(frozen=True)
class TriangularMF:
    """Triangular membership function with feet a, c and peak b."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not self.a <= self.b <= self.c:
            raise ValidationError(
                f"triangular membership needs a <= b <= c, got ({self.a}, {self.b}, {self.c})"
            )

    def membership(self, x):
        """Degree of membership of x, in [0, 1].

        Works on floats or Fractions.  Degenerate shoulders (a == b or b == c)
        are allowed; the peak always has membership 1.
        """
        if x == self.b:
            return x - x + 1  # one, in the arithmetic type of x
        if x <= self.a or x >= self.c:
            return (x - x) * 0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.c - x) / (self.c - self.b)

    def __call__(self, x):
        return self.membership(x)


@dataclass(frozen=True)
class FuzzyRule:
    """Maps one input set (by index) to one output set (by index)."""

    antecedent: int
    consequent: int


@dataclass(frozen=True)
class FuzzyConfig:
    """Complete parameterization of the weight-graduation system."""

    inputs: tuple[TriangularMF, ...]
    outputs: tuple[TriangularMF, ...]
    rules: tuple[FuzzyRule, ...]
    activation: str = "min"
    aggregation: str = "max"
    centroid_step: float | None = None  # None = exact analytic centroid

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "rules", tuple(self.rules))
        if len(self.inputs) != 3 or len(self.outputs) != 3:
            raise ValidationError("exactly three input and three output sets are required")
        if len(self.rules) != 3:
            raise ValidationError("exactly three rules are required")
        for rule in self.rules:
            if not 0 <= rule.antecedent < 3 or not 0 <= rule.consequent < 3:
                raise ValidationError(f"rule {rule} references a nonexistent set")
        peak_map = {
            self.inputs[r.antecedent].b: self.outputs[r.consequent].b for r in self.rules
        }
        if peak_map != dict(zip(INPUT_PEAKS, OUTPUT_PEAKS)):
            raise ValidationError(
                f"rules must map input peaks {INPUT_PEAKS} to output peaks {OUTPUT_PEAKS}, "
                f"got {peak_map}"
            )
        if self.activation not in ACTIVATIONS:
            raise ValidationError(f"activation must be one of {ACTIVATIONS}")
        if self.aggregation not in AGGREGATIONS:
            raise ValidationError(f"aggregation must be one of {AGGREGATIONS}")
        if self.centroid_step is not None and not self.centroid_step > 0:
            raise ValidationError("centroid_step must be positive or null")


def _config_to_dict(config: FuzzyConfig) -> dict:
    return {
        "format_version": CONFIG_FORMAT_VERSION,
        "input_sets": [[mf.a, mf.b, mf.c] for mf in config.inputs],
        "output_sets": [[mf.a, mf.b, mf.c] for mf in config.outputs],
        "rules": [[r.antecedent, r.consequent] for r in config.rules],
        "activation": config.activation,
        "aggregation": config.aggregation,
        "centroid_step": config.centroid_step,
    }


def _config_from_dict(data: dict) -> FuzzyConfig:
    version = data.get("format_version")
    if version != CONFIG_FORMAT_VERSION:
        raise ValidationError(f"unsupported fuzzy config format_version {version!r}")
    try:
        inputs = tuple(TriangularMF(*map(float, triple)) for triple in data["input_sets"])
        outputs = tuple(TriangularMF(*map(float, triple)) for triple in data["output_sets"])
        rules = tuple(FuzzyRule(int(a), int(c)) for a, c in data["rules"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed fuzzy config: {exc}") from exc
    step = data.get("centroid_step")
    return FuzzyConfig(
        inputs=inputs,
        outputs=outputs,
        rules=rules,
        activation=data.get("activation", "min"),
        aggregation=data.get("aggregation", "max"),
        centroid_step=None if step is None else float(step),
    )


def load_config(path: str | Path) -> FuzzyConfig:
    with open(path, encoding="utf-8") as fh:
        return _config_from_dict(json.load(fh))


def save_config(config: FuzzyConfig, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(_config_to_dict(config), indent=2) + "\n", encoding="utf-8"
    )


@lru_cache(maxsize=1)
def default_config() -> FuzzyConfig:
    """The shipped configuration (symmetric triangles, min/max, exact centroid)."""
    text = resources.files("ucpoints").joinpath("data/fuzzy_default.json").read_text("utf-8")
    return _config_from_dict(json.loads(text))


# --- inference -----------------------------------------------------------

def _activated_pieces(mf: TriangularMF, alpha: Fraction, activation: str):
    """The activated consequent as linear pieces (x0, x1, v0, v1) in Fractions.

    Building pieces from the geometry (rather than sampling the function)
    keeps degenerate shoulders and clip corners exact.
    """
    if alpha == 0:
        return []
    a, b, c = Fraction(mf.a), Fraction(mf.b), Fraction(mf.c)
    one = Fraction(1)
    if activation == "product":
        pieces = [(a, b, Fraction(0), alpha), (b, c, alpha, Fraction(0))]
    elif alpha >= 1:
        pieces = [(a, b, Fraction(0), one), (b, c, one, Fraction(0))]
    else:
        rise = a + alpha * (b - a) if b > a else a
        fall = c - alpha * (c - b) if c > b else c
        pieces = [
            (a, rise, Fraction(0), alpha),
            (rise, fall, alpha, alpha),
            (fall, c, alpha, Fraction(0)),
        ]
    return [p for p in pieces if p[1] > p[0]]


def _line_through(piece, x: Fraction) -> Fraction:
    x0, x1, v0, v1 = piece
    return v0 + (v1 - v0) * (x - x0) / (x1 - x0)


def _value_near(pieces, midpoint: Fraction, x: Fraction) -> Fraction:
    """Value at x of the linear piece containing midpoint (0 if none does)."""
    for piece in pieces:
        if piece[0] <= midpoint <= piece[1]:
            return _line_through(piece, x)
    return Fraction(0)


def _segment_area_moment(x0, x1, v0, v1):
    dx = x1 - x0
    area = (v0 + v1) * dx / 2
    moment = dx * (x0 * (2 * v0 + v1) + x1 * (v0 + 2 * v1)) / 6
    return area, moment


def _exact_centroid(piece_sets, aggregation: str) -> Fraction:
    breakpoints = sorted({x for ps in piece_sets for p in ps for x in (p[0], p[1])})
    area = Fraction(0)
    moment = Fraction(0)
    for x0, x1 in zip(breakpoints, breakpoints[1:]):
        if x1 == x0:
            continue
        mid = (x0 + x1) / 2
        ends = [(_value_near(ps, mid, x0), _value_near(ps, mid, x1)) for ps in piece_sets]
        if aggregation == "sum":
            a, m = _segment_area_moment(x0, x1, sum(e[0] for e in ends), sum(e[1] for e in ends))
            area += a
            moment += m
            continue
        # max of linear segments: cut at pairwise crossings so the argmax is
        # constant on every sub-interval, then the aggregate is linear there
        cuts = {x0, x1}
        for i in range(len(ends)):
            for j in range(i + 1, len(ends)):
                d0 = ends[i][0] - ends[j][0]
                d1 = ends[i][1] - ends[j][1]
                if d0 * d1 < 0:
                    t = d0 / (d0 - d1)
                    cuts.add(x0 + t * (x1 - x0))
        ordered = sorted(cuts)
        dx = x1 - x0
        for c0, c1 in zip(ordered, ordered[1:]):
            v0 = max(e0 + (e1 - e0) * (c0 - x0) / dx for e0, e1 in ends)
            v1 = max(e0 + (e1 - e0) * (c1 - x0) / dx for e0, e1 in ends)
            a, m = _segment_area_moment(c0, c1, v0, v1)
            area += a
            moment += m
    if area == 0:
        raise ValidationError("no rule activation: centroid undefined")
    return moment / area


class InferenceEngine:
    """Fuzzify -> activate rules -> aggregate -> defuzzify, per configuration.

    Immutable after construction; ``infer`` returns the raw (unclamped)
    defuzzified weight and is safe to call from inspection code directly.
    """

    def __init__(self, config: FuzzyConfig | None = None):
        self._config = config if config is not None else default_config()

    @property
    def config(self) -> FuzzyConfig:
        return self._config

    def activations(self, transactions: float) -> tuple[float, ...]:
        """Per-rule antecedent membership degrees for the given input."""
        cfg = self._config
        return tuple(cfg.inputs[r.antecedent].membership(float(transactions)) for r in cfg.rules)

    def infer(self, transactions: float) -> float:
        cfg = self._config
        if cfg.centroid_step is not None:
            activated = [
                (cfg.inputs[r.antecedent].membership(float(transactions)), cfg.outputs[r.consequent])
                for r in cfg.rules
            ]
            return self._sampled(activated)
        x = Fraction(transactions)
        piece_sets = []
        for rule in cfg.rules:
            mf_in = cfg.inputs[rule.antecedent]
            alpha = TriangularMF(
                Fraction(mf_in.a), Fraction(mf_in.b), Fraction(mf_in.c)
            ).membership(x)
            piece_sets.append(
                _activated_pieces(cfg.outputs[rule.consequent], Fraction(alpha), cfg.activation)
            )
        return float(_exact_centroid(piece_sets, cfg.aggregation))

    def _sampled(self, activated) -> float:
        cfg = self._config
        product = cfg.activation == "product"
        lo = min(mf.a for _, mf in activated)
        hi = max(mf.c for _, mf in activated)
        step = cfg.centroid_step
        num = 0.0
        den = 0.0
        count = int((hi - lo) / step) + 1
        for k in range(count + 1):
            y = min(lo + k * step, hi)
            values = [(alpha * mf(y)) if product else min(alpha, mf(y)) for alpha, mf in activated]
            mu = max(values) if cfg.aggregation == "max" else sum(values)
            num += mu * y
            den += mu
        if den == 0.0:
            raise ValidationError("no rule activation: centroid undefined")
        return num / den


@dataclass(frozen=True)
class AdjustedWeightTable:
    """Graduated use case weights for transaction levels 1..10.

    Non-decreasing, with the endpoints pinned to the classical extremes
    (level 1 -> 5, level 10 -> 15).
    """

    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) != 10:
            raise ValidationError(f"expected 10 weights, got {len(self.weights)}")
        if any(b < a for a, b in zip(self.weights, self.weights[1:])):
            raise ValidationError(f"weights must be non-decreasing, got {self.weights}")
        if self.weights[0] != WEIGHT_FLOOR or self.weights[-1] != WEIGHT_CEILING:
            raise ValidationError(
                f"endpoint weights must be {WEIGHT_FLOOR} and {WEIGHT_CEILING}, "
                f"got {self.weights[0]} and {self.weights[-1]}"
            )

    @classmethod
    def from_config(cls, config: FuzzyConfig | None = None) -> "AdjustedWeightTable":
        """Run the inference engine once per level and clamp into [5, 15].

        Levels 1 and 10 are pinned to exactly 5 and 15: the centroid of an
        edge output set is biased toward the universe interior, and the model
        fixes the largest use case's weight at the classical 15.
        """
        engine = InferenceEngine(config)
        raw = [engine.infer(level) for level in range(1, 11)]
        clamped = [min(WEIGHT_CEILING, max(WEIGHT_FLOOR, v)) for v in raw]
        clamped[0] = WEIGHT_FLOOR
        clamped[-1] = WEIGHT_CEILING
        return cls(weights=tuple(clamped))

    def weight(self, transactions: int) -> float:
        if (
            not isinstance(transactions, int)
            or isinstance(transactions, bool)
            or not 1 <= transactions <= 10
        ):
            raise ValidationError(
                f"transaction level must be an integer in 1..10, got {transactions!r}"
            )
        return self.weights[transactions - 1]


@lru_cache(maxsize=1)
def default_table() -> AdjustedWeightTable:
    return AdjustedWeightTable.from_config(default_config())


def adjusted_weight(transactions: int, table: AdjustedWeightTable | None = None) -> float:
    """Graduated weight of a use case with the given transaction level (1..10)."""
    table = table if table is not None else default_table()
    return table.weight(transactions)


def fuzzy_use_case_points(
    use_cases,
    policy: TransactionPolicy,
    table: AdjustedWeightTable | None = None,
) -> float:
    table = table if table is not None else default_table()
    return float(sum(table.weight(effective_transactions(uc, policy)) for uc in use_cases))


def fuzzy_uucp(
    project: ProjectSpec,
    policy: TransactionPolicy | None = None,
    table: AdjustedWeightTable | None = None,
) -> float:
    """UUCP with graduated use case weights; actor weights stay classical
    (actor weight is small next to use case weight, so graduating it buys
    nothing measurable)."""
    policy = policy or TransactionPolicy.karner()
    return fuzzy_use_case_points(project.use_cases, policy, table) + karner.actor_points(
        project.actors
    )


def estimate(
    project: ProjectSpec,
    policy: TransactionPolicy | None = None,
    table: AdjustedWeightTable | None = None,
) -> karner.SizeEstimate:
    """Full fuzzy-weighted size estimate for a project (effort not yet attached)."""
    u = fuzzy_uucp(project, policy, table)
    tf = karner.technical_factor(project.factors)
    ef = karner.environmental_factor(project.factors)
    return karner.SizeEstimate(model_tag="fuzzy", uucp=u, tf=tf, ef=ef, ucp=karner.ucp(u, tf, ef))
