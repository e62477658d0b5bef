"""Model function classes: training, prediction, loss, feature importance.

Two classes are supported. ``logistic_regression`` fits a regularized
logistic model by full-batch gradient descent on standardized features
(zero mean, unit variance computed from the training rows), which keeps
runs deterministic and makes coefficient magnitudes comparable across
features. ``norm_threshold`` is the fixed rule "predict 1 iff the L2 norm
of the input is at least the configured threshold"; it has no fitted
parameters and exists so simple worked scenarios can be expressed in the
same API as trained models.

Feature importance is the vector of signed coefficients rescaled to unit
L1 norm; it feeds the label-gap comparison between a deployed model and
the evaluation model it stands in for.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import SingleClassError, ValidationError

FUNCTION_CLASSES = ("logistic_regression", "norm_threshold")

DEFAULT_HYPERPARAMS = {
    "learning_rate": 0.1,
    "iterations": 2000,
    "l2": 1e-4,
    "decision_threshold": 0.5,
}

# standardization guard for constant columns
_VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class ModelSpec:
    """A candidate model: which features it reads and how it decides."""

    feature_names: tuple[str, ...]
    function_class: str = "logistic_regression"
    hyperparams: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if not self.feature_names:
            raise ValidationError("feature_names must be nonempty")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValidationError("feature_names must be unique")
        if self.function_class not in FUNCTION_CLASSES:
            raise ValidationError(
                f"unknown function_class {self.function_class!r}; "
                f"expected one of {FUNCTION_CLASSES}"
            )

    def resolved_hyperparams(self) -> dict:
        merged = dict(DEFAULT_HYPERPARAMS)
        merged.update(self.hyperparams)
        return merged


@dataclass(frozen=True)
class TrainedModel:
    """An immutable fitted model.

    For the logistic class, ``coefficients`` and ``intercept`` act on
    standardized inputs; ``mu`` and ``sigma`` are the standardization
    parameters remembered from training. For the threshold class only
    ``threshold`` is meaningful. ``importance`` is the signed, L1-normalized
    coefficient vector (all zeros when no coefficient is nonzero).
    """

    spec: ModelSpec
    coefficients: np.ndarray
    intercept: float
    mu: np.ndarray
    sigma: np.ndarray
    importance: np.ndarray
    decision_threshold: float = 0.5
    threshold: float | None = None

    @property
    def dim(self) -> int:
        return len(self.spec.feature_names)

    @classmethod
    def from_coefficients(
        cls,
        spec: ModelSpec,
        coefficients,
        intercept: float = 0.0,
        decision_threshold: float = 0.5,
    ) -> "TrainedModel":
        """Wrap externally chosen coefficients (identity standardization).

        Handy for fixed "environment" models and worked examples where the
        weights are given rather than fitted.
        """
        coef = np.asarray(coefficients, dtype=float)
        if coef.shape != (len(spec.feature_names),):
            raise ValidationError(
                f"expected {len(spec.feature_names)} coefficients, got {coef.shape}"
            )
        d = coef.shape[0]
        return cls(
            spec=spec,
            coefficients=coef,
            intercept=float(intercept),
            mu=np.zeros(d),
            sigma=np.ones(d),
            importance=_normalize_importance(coef),
            decision_threshold=decision_threshold,
        )

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.spec.feature_names),
            "function_class": self.spec.function_class,
            "hyperparams": dict(self.spec.hyperparams),
            "coefficients": [float(c) for c in self.coefficients],
            "intercept": float(self.intercept),
            "mu": [float(v) for v in self.mu],
            "sigma": [float(v) for v in self.sigma],
            "importance": [float(v) for v in self.importance],
            "decision_threshold": float(self.decision_threshold),
            "threshold": None if self.threshold is None else float(self.threshold),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainedModel":
        spec = ModelSpec(
            tuple(doc["feature_names"]),
            doc["function_class"],
            dict(doc.get("hyperparams", {})),
        )
        return cls(
            spec=spec,
            coefficients=np.asarray(doc["coefficients"], dtype=float),
            intercept=float(doc["intercept"]),
            mu=np.asarray(doc["mu"], dtype=float),
            sigma=np.asarray(doc["sigma"], dtype=float),
            importance=np.asarray(doc["importance"], dtype=float),
            decision_threshold=float(doc.get("decision_threshold", 0.5)),
            threshold=None if doc.get("threshold") is None else float(doc["threshold"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        return cls.from_dict(json.loads(text))


def _normalize_importance(coefficients: np.ndarray) -> np.ndarray:
    total = float(np.sum(np.abs(coefficients)))
    if total == 0.0:
        return np.zeros_like(coefficients)
    return coefficients / total


def _sigmoid(scores: np.ndarray) -> np.ndarray:
    out = np.empty_like(scores)
    pos = scores >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-scores[pos]))
    expv = np.exp(scores[~pos])
    out[~pos] = expv / (1.0 + expv)
    return out


def _softplus(scores: np.ndarray) -> np.ndarray:
    # log(1 + e^s), computed without overflow for large |s|
    return np.maximum(scores, 0.0) + np.log1p(np.exp(-np.abs(scores)))


def logistic_loss_and_gradient(
    weights: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray]:
    """Mean log-loss plus an L2 penalty on the non-intercept weights.

    ``weights`` is ``[w_1..w_d, intercept]``. Returns the loss value and its
    exact gradient; gradient-check tests difference this pair numerically.
    """
    w, b = weights[:-1], weights[-1]
    scores = X @ w + b
    # mean[ softplus(s) - y*s ] == mean[-y log p - (1-y) log(1-p)]
    data_loss = float(np.mean(_softplus(scores) - y * scores))
    penalty = 0.5 * l2 * float(w @ w)
    p = _sigmoid(scores)
    resid = p - y
    grad_w = X.T @ resid / X.shape[0] + l2 * w
    grad_b = float(np.mean(resid))
    return data_loss + penalty, np.append(grad_w, grad_b)


def _validate_training_inputs(spec: ModelSpec, features, labels) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if X.ndim != 2:
        raise ValidationError(f"features must be 2-D, got shape {X.shape}")
    if X.shape[1] != len(spec.feature_names):
        raise ValidationError(
            f"features have {X.shape[1]} columns, spec names {len(spec.feature_names)}"
        )
    if y.shape != (X.shape[0],):
        raise ValidationError("labels must be a vector matching the feature rows")
    if X.shape[0] < 2:
        raise ValidationError("need at least 2 training rows")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise ValidationError("training data contains non-finite values")
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise ValidationError("labels must be binary (0/1)")
    if np.all(y == y[0]):
        raise SingleClassError("training labels contain a single class")
    return X, y


def train(spec: ModelSpec, features, labels, seed: int = 0) -> TrainedModel:
    """Fit a model of the spec's class.

    Logistic regression runs full-batch gradient descent from a zero start
    on standardized features, so the result is a deterministic function of
    (spec, data); the seed is accepted for interface stability. The
    threshold class performs no fitting and just validates its inputs.
    """
    X, y = _validate_training_inputs(spec, features, labels)
    hp = spec.resolved_hyperparams()

    if spec.function_class == "norm_threshold":
        if "threshold" not in hp:
            raise ValidationError("norm_threshold requires a 'threshold' hyperparam")
        d = len(spec.feature_names)
        return TrainedModel(
            spec=spec,
            coefficients=np.zeros(d),
            intercept=0.0,
            mu=np.zeros(d),
            sigma=np.ones(d),
            importance=np.zeros(d),
            decision_threshold=float(hp["decision_threshold"]),
            threshold=float(hp["threshold"]),
        )

    mu = X.mean(axis=0)
    var = X.var(axis=0)
    sigma = np.sqrt(np.maximum(var, _VARIANCE_FLOOR))
    Xs = (X - mu) / sigma

    weights = np.zeros(X.shape[1] + 1)
    lr = float(hp["learning_rate"])
    l2 = float(hp["l2"])
    for _ in range(int(hp["iterations"])):
        _, grad = logistic_loss_and_gradient(weights, Xs, y, l2)
        weights = weights - lr * grad

    coef = weights[:-1]
    return TrainedModel(
        spec=spec,
        coefficients=coef,
        intercept=float(weights[-1]),
        mu=mu,
        sigma=sigma,
        importance=_normalize_importance(coef),
        decision_threshold=float(hp["decision_threshold"]),
    )


def predict_proba(model: TrainedModel, features) -> np.ndarray:
    """Positive-class scores for one vector or a matrix of rows."""
    X = np.asarray(features, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != model.dim:
        raise ValidationError(
            f"expected {model.dim} features, got {X.shape[1]}"
        )
    if model.spec.function_class == "norm_threshold":
        scores = np.linalg.norm(X, axis=1)
    else:
        Xs = (X - model.mu) / model.sigma
        scores = _sigmoid(Xs @ model.coefficients + model.intercept)
    return scores[0] if single else scores


def predict(model: TrainedModel, x_rev) -> int | np.ndarray:
    """Binary decision; ties at the threshold classify as 1."""
    scores = predict_proba(model, x_rev)
    cutoff = (
        model.threshold
        if model.spec.function_class == "norm_threshold"
        else model.decision_threshold
    )
    decided = np.asarray(scores) >= cutoff
    if np.ndim(scores) == 0:
        return int(decided)
    return decided.astype(int)


def loss(model: TrainedModel, features, labels) -> float:
    """Mean log-loss for logistic models, 0/1 error for threshold models."""
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("loss requires a nonempty 2-D feature matrix")
    if y.shape != (X.shape[0],):
        raise ValidationError("labels must match the feature rows")
    if model.spec.function_class == "norm_threshold":
        preds = predict(model, X)
        return float(np.mean(preds != y.astype(int)))
    Xs = (X - model.mu) / model.sigma
    scores = Xs @ model.coefficients + model.intercept
    return float(np.mean(_softplus(scores) - y * scores))


def feature_importance(model: TrainedModel) -> np.ndarray:
    """Signed importances with unit L1 norm (all-zero for zero coefficients)."""
    return model.importance.copy()


def _group_threshold_grid(
    model: TrainedModel, features, labels, groups, n_candidates: int
) -> tuple[dict, np.ndarray, np.ndarray]:
    """Per-group cutoff candidates with their TPR/FPR/accuracy curves."""
    scores = np.asarray(predict_proba(model, features), dtype=float)
    y = np.asarray(labels, dtype=int)
    g = np.asarray(groups, dtype=int)
    present = sorted(set(int(v) for v in g))
    if present != [0, 1]:
        raise ValidationError(f"need both groups 0 and 1, got {present}")

    per_group = {}
    for grp in (0, 1):
        mask = g == grp
        if not np.any(y[mask] == 1) or not np.any(y[mask] == 0):
            raise ValidationError(
                f"group {grp} lacks a label class; per-group thresholds undefined"
            )
        s = scores[mask]
        qs = np.quantile(s, np.linspace(0.0, 1.0, min(n_candidates, s.size)))
        cands = np.unique(np.concatenate([qs, [model.decision_threshold, 0.0, 1.0 + 1e-12]]))
        # decisions for every candidate at once: n_cands x n_rows
        dec = s[None, :] >= cands[:, None]
        pos = y[mask] == 1
        tpr = dec[:, pos].mean(axis=1)
        fpr = dec[:, ~pos].mean(axis=1)
        acc = (dec == pos[None, :]).mean(axis=1)
        per_group[grp] = (cands, tpr, fpr, acc, float(np.mean(mask)))

    c0, tpr0, fpr0, acc0, w0 = per_group[0]
    c1, tpr1, fpr1, acc1, w1 = per_group[1]
    gap = np.abs(tpr0[:, None] - tpr1[None, :]) + np.abs(fpr0[:, None] - fpr1[None, :])
    combined_acc = w0 * acc0[:, None] + w1 * acc1[None, :]
    return per_group, gap, combined_acc


def fit_group_thresholds(
    model: TrainedModel,
    features,
    labels,
    groups,
    tau_o: float,
    n_candidates: int = 64,
) -> dict[int, float]:
    """Pick per-group decision thresholds that shrink the odds gap.

    Scans quantile-spaced score cutoffs per group and returns the pair with
    the smallest |TPR0-TPR1| + |FPR0-FPR1| on the given data; among pairs
    already under ``tau_o`` the most accurate wins. Raises if either group
    lacks positives or negatives (the gap would be undefined).
    """
    per_group, gap, combined_acc = _group_threshold_grid(
        model, features, labels, groups, n_candidates
    )
    ok = gap <= tau_o
    if np.any(ok):
        score_grid = np.where(ok, combined_acc, -np.inf)
    else:
        score_grid = -gap
    flat = int(np.argmax(score_grid))
    i, j = np.unravel_index(flat, score_grid.shape)
    return {0: float(per_group[0][0][i]), 1: float(per_group[1][0][j])}


def candidate_group_thresholds(
    model: TrainedModel,
    features,
    labels,
    groups,
    tau_o: float = 0.15,
    k: int = 25,
    n_candidates: int = 64,
) -> list[dict[int, float]]:
    """Top-k per-group threshold pairs for the odds-gap search.

    Pairs whose gap on the given data clears ``tau_o`` come first, most
    accurate first (this keeps the degenerate accept-everyone and
    reject-everyone corners, which zero the gap at useless accuracy, from
    winning); remaining pairs follow by ascending gap. Callers walk the
    list until a pair also clears their reported-metric gate.
    """
    per_group, gap, combined_acc = _group_threshold_grid(
        model, features, labels, groups, n_candidates
    )
    feasible = gap <= tau_o
    # two-block ordering: feasible by accuracy, infeasible by gap
    primary = np.where(feasible, 0.0, 1.0)
    secondary = np.where(feasible, -combined_acc, gap)
    order = np.lexsort((gap.ravel(), secondary.ravel(), primary.ravel()))
    pairs = []
    for flat in order[: max(1, k)]:
        i, j = np.unravel_index(int(flat), gap.shape)
        pairs.append({0: float(per_group[0][0][i]), 1: float(per_group[1][0][j])})
    return pairs


def predict_with_group_thresholds(
    model: TrainedModel, features, groups, thresholds: dict[int, float]
) -> np.ndarray:
    """Binary decisions using a per-group score cutoff."""
    scores = np.asarray(predict_proba(model, features), dtype=float)
    g = np.asarray(groups, dtype=int)
    cuts = np.array([thresholds[int(v)] for v in g])
    return (scores >= cuts).astype(int)
