"""Feed-forward size estimator: 13 project features to UUCP through one
hidden layer.

Features are the use case histogram (number of use cases at each effective
transaction level 1..10) plus the three actor-kind counts.  The default
topology is 13-20-1 with a tanh hidden layer and a linear output; training is
Levenberg-Marquardt over the full Jacobian (datasets here are tiny, so exact
LM is cheap), with plain gradient backpropagation kept as a fallback.
Everything is seeded and bit-reproducible.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import karner
from .model import (
    ACTOR_KINDS,
    ProjectSpec,
    TransactionPolicy,
    ValidationError,
    effective_transactions,
)

N_INPUTS = 13
MIN_HIDDEN_WIDTH = 14
MAX_HIDDEN_WIDTH = 25
DEFAULT_HIDDEN_WIDTH = 20

MODEL_FORMAT_VERSION = 1

ALGORITHMS = ("levenberg_marquardt", "gradient_backprop")


class NumericError(ArithmeticError):
    """A computation produced a non-finite value."""


class ConvergenceError(RuntimeError):
    """LM damping escalated past its maximum without finding a better step.

    Carries the best parameters seen (``model``) and the accepted-SSE
    ``history`` so a caller can keep the partial result.
    """

    def __init__(self, message: str, model: "TrainedModel", history):
        super().__init__(message)
        self.model = model
        self.history = tuple(history)


def _tanh(z):
    a = np.tanh(z)
    return a, 1.0 - a * a


def _logistic(z):
    with np.errstate(over="ignore"):
        a = 1.0 / (1.0 + np.exp(-z))
    return a, a * (1.0 - a)


HIDDEN_ACTIVATIONS = {"tanh": _tanh, "logistic": _logistic}


@dataclass(frozen=True)
class FeatureVector:
    """Histogram features of a project: u[k] counts use cases with k+1
    effective transactions; a counts (simple, average, complex) actors."""

    u: tuple[int, ...]
    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "a", tuple(self.a))
        if len(self.u) != 10 or len(self.a) != 3:
            raise ValidationError(
                f"feature vector needs 10 use case counts and 3 actor counts, "
                f"got {len(self.u)} and {len(self.a)}"
            )
        for label, counts in (("use case", self.u), ("actor", self.a)):
            for c in counts:
                if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                    raise ValidationError(
                        f"{label} counts must be non-negative integers, got {c!r}"
                    )
        if sum(self.u) < 1 or sum(self.a) < 1:
            raise ValidationError("a project has at least one use case and one actor")

    @property
    def values(self) -> tuple[int, ...]:
        return self.u + self.a

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def featurize(project: ProjectSpec, policy: TransactionPolicy | None = None) -> FeatureVector:
    """Histogram of effective transaction levels plus actor kind counts."""
    policy = policy or TransactionPolicy.karner()
    u = [0] * 10
    for uc in project.use_cases:
        u[effective_transactions(uc, policy) - 1] += 1
    kinds = Counter(actor.kind for actor in project.actors)
    return FeatureVector(u=tuple(u), a=tuple(kinds.get(kind, 0) for kind in ACTOR_KINDS))


@dataclass(frozen=True, eq=False)
class Network:
    """One-hidden-layer regression network; parameters immutable once built."""

    hidden_weights: np.ndarray  # (width, 13)
    hidden_biases: np.ndarray  # (width,)
    output_weights: np.ndarray  # (width,)
    output_bias: float
    hidden_activation: str = "tanh"

    def __post_init__(self):
        for name in ("hidden_weights", "hidden_biases", "output_weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "output_bias", float(self.output_bias))
        width = self.hidden_biases.shape[0] if self.hidden_biases.ndim == 1 else -1
        if (
            self.hidden_weights.shape != (width, N_INPUTS)
            or self.output_weights.shape != (width,)
        ):
            raise ValidationError(
                f"inconsistent parameter shapes for a {N_INPUTS}-input network: "
                f"{self.hidden_weights.shape}, {self.hidden_biases.shape}, "
                f"{self.output_weights.shape}"
            )
        if not MIN_HIDDEN_WIDTH <= width <= MAX_HIDDEN_WIDTH:
            raise ValidationError(
                f"hidden width must be in {MIN_HIDDEN_WIDTH}..{MAX_HIDDEN_WIDTH}, got {width}"
            )
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValidationError(
                f"hidden_activation must be one of {tuple(HIDDEN_ACTIVATIONS)}, "
                f"got {self.hidden_activation!r}"
            )
        if not (
            np.isfinite(self.hidden_weights).all()
            and np.isfinite(self.hidden_biases).all()
            and np.isfinite(self.output_weights).all()
            and np.isfinite(self.output_bias)
        ):
            raise ValidationError("network parameters must be finite")

    @property
    def hidden_width(self) -> int:
        return self.hidden_biases.shape[0]

    @property
    def n_params(self) -> int:
        w = self.hidden_width
        return w * N_INPUTS + w + w + 1

    def flatten(self) -> np.ndarray:
        return np.concatenate(
            [
                self.hidden_weights.ravel(),
                self.hidden_biases,
                self.output_weights,
                [self.output_bias],
            ]
        )

    @classmethod
    def unflatten(
        cls, theta: np.ndarray, width: int, hidden_activation: str = "tanh"
    ) -> "Network":
        theta = np.asarray(theta, dtype=float)
        expected = width * N_INPUTS + 2 * width + 1
        if theta.shape != (expected,):
            raise ValidationError(
                f"expected {expected} parameters for width {width}, got {theta.shape}"
            )
        hw = width * N_INPUTS
        return cls(
            hidden_weights=theta[:hw].reshape(width, N_INPUTS),
            hidden_biases=theta[hw : hw + width],
            output_weights=theta[hw + width : hw + 2 * width],
            output_bias=theta[-1],
            hidden_activation=hidden_activation,
        )

    @classmethod
    def random(
        cls,
        width: int = DEFAULT_HIDDEN_WIDTH,
        hidden_activation: str = "tanh",
        rng_seed: int = 0,
    ) -> "Network":
        """Uniform [-0.5, 0.5] initialization from a seeded generator."""
        rng = np.random.default_rng(rng_seed)
        n = width * N_INPUTS + 2 * width + 1
        return cls.unflatten(rng.uniform(-0.5, 0.5, size=n), width, hidden_activation)


def _as_input_matrix(xs) -> np.ndarray:
    rows = [x.as_array() if isinstance(x, FeatureVector) else np.asarray(x, float) for x in xs]
    X = np.vstack(rows) if rows else np.empty((0, N_INPUTS))
    if X.ndim != 2 or X.shape[1] != N_INPUTS:
        raise ValidationError(f"inputs must be {N_INPUTS}-vectors, got shape {X.shape}")
    return X


def _forward_batch(net: Network, X: np.ndarray):
    act = HIDDEN_ACTIVATIONS[net.hidden_activation]
    Z = X @ net.hidden_weights.T + net.hidden_biases
    A, D = act(Z)
    Y = A @ net.output_weights + net.output_bias
    return Y, A, D


def forward(net: Network, x) -> float:
    """Network output for one input (a FeatureVector or 13 raw numbers)."""
    X = _as_input_matrix([x])
    Y, _, _ = _forward_batch(net, X)
    y = float(Y[0])
    if not np.isfinite(y):
        raise NumericError(f"non-finite network output {y}")
    return y


def _jacobian(net: Network, X: np.ndarray):
    """Residual Jacobian d pred_k / d theta, columns in flatten() order."""
    Y, A, D = _forward_batch(net, X)
    WD = net.output_weights * D  # (m, width)
    J_hw = (WD[:, :, None] * X[:, None, :]).reshape(X.shape[0], -1)
    J = np.hstack([J_hw, WD, A, np.ones((X.shape[0], 1))])
    return Y, J


def sse(net: Network, xs, targets) -> float:
    X = _as_input_matrix(xs)
    t = np.asarray(targets, dtype=float)
    Y, _, _ = _forward_batch(net, X)
    return float(np.sum((Y - t) ** 2))


def sse_gradient(net: Network, xs, targets) -> np.ndarray:
    """Gradient of the sum of squared errors w.r.t. the flattened parameters."""
    X = _as_input_matrix(xs)
    t = np.asarray(targets, dtype=float)
    Y, J = _jacobian(net, X)
    return 2.0 * (J.T @ (Y - t))


def gradient_check(
    net: Network, data, fd_step: float = 1e-5, floor: float = 1e-8
) -> float:
    """Max relative discrepancy between the analytic SSE gradient and central
    finite differences over all parameters.

    Where both gradients sit below ``floor`` in magnitude (a stationary
    point), the discrepancy is defined as zero.
    """
    xs = [pair[0] for pair in data]
    targets = [pair[1] for pair in data]
    analytic = sse_gradient(net, xs, targets)
    theta = net.flatten()
    width, activation = net.hidden_width, net.hidden_activation
    numeric = np.empty_like(analytic)
    for i in range(theta.size):
        bumped = theta.copy()
        bumped[i] = theta[i] + fd_step
        hi = sse(Network.unflatten(bumped, width, activation), xs, targets)
        bumped[i] = theta[i] - fd_step
        lo = sse(Network.unflatten(bumped, width, activation), xs, targets)
        numeric[i] = (hi - lo) / (2.0 * fd_step)
    worst = 0.0
    for ga, gn in zip(analytic, numeric):
        scale = max(abs(ga), abs(gn))
        if scale < floor:
            continue
        worst = max(worst, abs(ga - gn) / scale)
    return worst


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters; every run is fully determined by these."""

    algorithm: str = "levenberg_marquardt"
    max_epochs: int = 200
    target_sse: float = 1e-10  # on the normalized scale
    lm_damping_init: float = 1e-3
    lm_damping_factor: float = 10.0
    lm_damping_max: float = 1e10
    learning_rate: float = 0.01  # gradient_backprop only
    rng_seed: int = 0
    hidden_width: int = DEFAULT_HIDDEN_WIDTH
    hidden_activation: str = "tanh"
    input_scale: tuple[float, ...] | None = None  # default: per-feature training maxima
    target_scale: float | None = None  # default: training target maximum

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(f"algorithm must be one of {ALGORITHMS}")
        if not isinstance(self.max_epochs, int) or self.max_epochs < 1:
            raise ValidationError(f"max_epochs must be a positive integer, got {self.max_epochs!r}")
        if not self.target_sse >= 0:
            raise ValidationError(f"target_sse must be non-negative, got {self.target_sse}")
        if not self.lm_damping_init > 0:
            raise ValidationError(f"lm_damping_init must be positive, got {self.lm_damping_init}")
        if not self.lm_damping_factor > 1:
            raise ValidationError(
                f"lm_damping_factor must exceed 1, got {self.lm_damping_factor}"
            )
        if not self.lm_damping_max > self.lm_damping_init:
            raise ValidationError("lm_damping_max must exceed lm_damping_init")
        if not self.learning_rate > 0:
            raise ValidationError(f"learning_rate must be positive, got {self.learning_rate}")
        if not isinstance(self.rng_seed, int) or isinstance(self.rng_seed, bool):
            raise ValidationError(f"rng_seed must be an integer, got {self.rng_seed!r}")
        if not MIN_HIDDEN_WIDTH <= self.hidden_width <= MAX_HIDDEN_WIDTH:
            raise ValidationError(
                f"hidden_width must be in {MIN_HIDDEN_WIDTH}..{MAX_HIDDEN_WIDTH}, "
                f"got {self.hidden_width}"
            )
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValidationError(
                f"hidden_activation must be one of {tuple(HIDDEN_ACTIVATIONS)}"
            )
        if self.input_scale is not None:
            object.__setattr__(self, "input_scale", tuple(float(s) for s in self.input_scale))
            if len(self.input_scale) != N_INPUTS or any(s <= 0 for s in self.input_scale):
                raise ValidationError("input_scale needs 13 positive entries")
        if self.target_scale is not None and not self.target_scale > 0:
            raise ValidationError(f"target_scale must be positive, got {self.target_scale}")


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """A network plus the normalization bounds and provenance needed to use it."""

    network: Network
    input_scale: tuple[float, ...]
    target_scale: float
    rng_seed: int
    algorithm: str
    epochs_run: int
    final_sse: float

    def __post_init__(self):
        object.__setattr__(self, "input_scale", tuple(float(s) for s in self.input_scale))
        if len(self.input_scale) != N_INPUTS or any(s <= 0 for s in self.input_scale):
            raise ValidationError("input_scale needs 13 positive entries")
        if not self.target_scale > 0:
            raise ValidationError(f"target_scale must be positive, got {self.target_scale}")
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(f"algorithm must be one of {ALGORITHMS}")
        if self.epochs_run < 0 or not np.isfinite(self.final_sse) or self.final_sse < 0:
            raise ValidationError("training provenance fields out of range")


@dataclass(frozen=True, eq=False)
class TrainResult:
    model: TrainedModel
    history: tuple[float, ...]  # SSE before training, then after each accepted epoch


def _normalize(data, cfg: TrainConfig):
    if len(data) < 2:
        raise ValidationError(f"training needs at least 2 samples, got {len(data)}")
    X = _as_input_matrix([x for x, _ in data])
    t = np.asarray([y for _, y in data], dtype=float)
    if not (t > 0).all():
        raise ValidationError("training targets must be positive sizes")
    if cfg.input_scale is not None:
        in_scale = np.asarray(cfg.input_scale)
    else:
        in_scale = X.max(axis=0)
        in_scale[in_scale <= 0] = 1.0  # unseen feature: leave it unscaled
    t_scale = cfg.target_scale if cfg.target_scale is not None else float(t.max())
    return X / in_scale, t / t_scale, tuple(float(s) for s in in_scale), float(t_scale)


def train(data, cfg: TrainConfig | None = None, initial: Network | None = None) -> TrainResult:
    """Fit a network to (features, size) pairs; deterministic given the seed.

    ``initial`` overrides the seeded random initialization (the seed is still
    recorded in the model).  LM escalates damping on rejected or singular
    steps and raises ConvergenceError past ``lm_damping_max``; accepted steps
    strictly decrease the SSE, so the history is monotone non-increasing.
    """
    cfg = cfg or TrainConfig()
    Xn, tn, in_scale, t_scale = _normalize(data, cfg)
    net = (
        initial
        if initial is not None
        else Network.random(cfg.hidden_width, cfg.hidden_activation, cfg.rng_seed)
    )

    def packaged(net: Network, history) -> TrainResult:
        model = TrainedModel(
            network=net,
            input_scale=in_scale,
            target_scale=t_scale,
            rng_seed=cfg.rng_seed,
            algorithm=cfg.algorithm,
            epochs_run=len(history) - 1,
            final_sse=history[-1],
        )
        return TrainResult(model=model, history=tuple(history))

    if cfg.algorithm == "gradient_backprop":
        return _train_backprop(net, Xn, tn, cfg, packaged)
    return _train_lm(net, Xn, tn, cfg, packaged)


def _train_lm(net, Xn, tn, cfg, packaged):
    theta = net.flatten()
    width, activation = net.hidden_width, net.hidden_activation
    current = sse(net, Xn, tn)
    history = [current]
    lam = cfg.lm_damping_init
    identity = np.eye(theta.size)
    for _ in range(cfg.max_epochs):
        if current <= cfg.target_sse:
            break
        Y, J = _jacobian(net, Xn)
        residual = Y - tn
        gradient = J.T @ residual
        normal = J.T @ J
        while True:
            try:
                delta = np.linalg.solve(normal + lam * identity, -gradient)
            except np.linalg.LinAlgError:
                delta = None
            if delta is not None:
                candidate_theta = theta + delta
                candidate = Network.unflatten(candidate_theta, width, activation)
                candidate_sse = sse(candidate, Xn, tn)
                if np.isfinite(candidate_sse) and candidate_sse < current:
                    theta, net, current = candidate_theta, candidate, candidate_sse
                    history.append(current)
                    lam /= cfg.lm_damping_factor
                    break
            lam *= cfg.lm_damping_factor
            if lam > cfg.lm_damping_max:
                raise ConvergenceError(
                    f"LM damping exceeded {cfg.lm_damping_max:g} without improving "
                    f"SSE {current:g}",
                    packaged(net, history).model,
                    history,
                )
    return packaged(net, history)


def _train_backprop(net, Xn, tn, cfg, packaged):
    theta = net.flatten()
    width, activation = net.hidden_width, net.hidden_activation
    current = sse(net, Xn, tn)
    history = [current]
    for _ in range(cfg.max_epochs):
        if current <= cfg.target_sse:
            break
        theta = theta - cfg.learning_rate * sse_gradient(net, Xn, tn)
        net = Network.unflatten(theta, width, activation)
        current = sse(net, Xn, tn)
        history.append(current)
    return packaged(net, history)


def predict(model: TrainedModel, subject, policy: TransactionPolicy | None = None) -> float:
    """Predicted UUCP for a project (or prepared feature vector)."""
    if isinstance(subject, ProjectSpec):
        subject = featurize(subject, policy)
    x = subject.as_array() if isinstance(subject, FeatureVector) else np.asarray(subject, float)
    y = forward(model.network, x / np.asarray(model.input_scale))
    return y * model.target_scale


def estimate(
    project: ProjectSpec,
    model: TrainedModel,
    policy: TransactionPolicy | None = None,
    constants: karner.FactorConstants = karner.DEFAULT_CONSTANTS,
) -> karner.SizeEstimate:
    """Full network-based size estimate for a project (effort not yet attached)."""
    u = predict(model, project, policy)
    tf = karner.technical_factor(project.factors, constants)
    ef = karner.environmental_factor(project.factors, constants)
    return karner.SizeEstimate(model_tag="mlp", uucp=u, tf=tf, ef=ef, ucp=karner.ucp(u, tf, ef))


# --- model file ----------------------------------------------------------

def _model_to_dict(model: TrainedModel) -> dict:
    net = model.network
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "topology": {"inputs": N_INPUTS, "hidden": net.hidden_width, "outputs": 1},
        "hidden_activation": net.hidden_activation,
        "hidden_weights": [[float(v) for v in row] for row in net.hidden_weights],
        "hidden_biases": [float(v) for v in net.hidden_biases],
        "output_weights": [float(v) for v in net.output_weights],
        "output_bias": float(net.output_bias),
        "input_scale": [float(v) for v in model.input_scale],
        "target_scale": float(model.target_scale),
        "rng_seed": model.rng_seed,
        "training": {
            "algorithm": model.algorithm,
            "epochs_run": model.epochs_run,
            "final_sse": float(model.final_sse),
        },
    }


def save_model(model: TrainedModel, path: str | Path) -> None:
    """Write the model file; full float precision, so round-trips are bit-exact."""
    Path(path).write_text(
        json.dumps(_model_to_dict(model), indent=2) + "\n", encoding="utf-8"
    )


def load_model(path: str | Path) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    version = data.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValidationError(f"unsupported model format_version {version!r}")
    try:
        topology = data["topology"]
        if topology != {
            "inputs": N_INPUTS,
            "hidden": len(data["hidden_biases"]),
            "outputs": 1,
        }:
            raise ValidationError(f"model topology {topology} does not match its parameters")
        net = Network(
            hidden_weights=np.asarray(data["hidden_weights"], dtype=float),
            hidden_biases=np.asarray(data["hidden_biases"], dtype=float),
            output_weights=np.asarray(data["output_weights"], dtype=float),
            output_bias=data["output_bias"],
            hidden_activation=data["hidden_activation"],
        )
        training = data["training"]
        return TrainedModel(
            network=net,
            input_scale=tuple(data["input_scale"]),
            target_scale=data["target_scale"],
            rng_seed=data["rng_seed"],
            algorithm=training["algorithm"],
            epochs_run=training["epochs_run"],
            final_sse=training["final_sse"],
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed model file: {exc}") from exc
