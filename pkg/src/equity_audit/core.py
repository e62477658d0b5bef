"""Core semantics: obstacles, alleviation policies, and revealed features.

The model here is a decision pipeline in which every individual has two
feature vectors of equal length: ``z``, the values they would present with
no barriers in the way (obstacle-free), and ``x``, the values they actually
present under the barriers they face (obstacle-refrained). Whenever barriers
bind, ``z`` dominates ``x``: every coordinate of ``z`` is at least the
matching coordinate of ``x`` and at least one is strictly larger.

An :class:`ObstacleModel` assigns each feature a nonnegative constraint
weight ``alpha``; the scalar obstacle magnitude for an individual is the
inner product ``<alpha, z - x>``. A :class:`Policy` carries a per-individual
alleviation budget ``delta``, and the alleviated residual is
``max(magnitude - delta, 0)``. An individual whose magnitude is zero, or
whose residual after alleviation is zero, interacts with the decision model
at full capacity and reveals ``(z, y_prime)``; everyone else reveals
``(x, y)``. That piecewise rule is :func:`reveal` and everything downstream
(access rates, trained models, utilization checks) consumes its output.

All functions in this module are pure; nothing mutates its inputs, so the
operations are safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DominanceError, ValidationError

__all__ = [
    "Individual",
    "Population",
    "ObstacleModel",
    "Policy",
    "RevealedPair",
    "obstacle_magnitude",
    "dominates",
    "apply_policy",
    "reveal",
    "reveal_population",
]


def _as_float_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def _check_binary(value: int, name: str) -> int:
    if value not in (0, 1):
        raise ValidationError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class Individual:
    """One person as seen by a decision pipeline.

    Attributes:
        z: obstacle-free feature values
        x: obstacle-refrained feature values (same length as ``z``)
        y_prime: label attached to the obstacle-free state
        y: label attached to the obstacle-refrained state
        grp: protected-group membership, 0 or 1
        id: opaque unique identifier
    """

    z: np.ndarray
    x: np.ndarray
    y_prime: int
    y: int
    grp: int
    id: str

    def __post_init__(self):
        object.__setattr__(self, "z", _as_float_vector(self.z, "z"))
        object.__setattr__(self, "x", _as_float_vector(self.x, "x"))
        if self.z.shape != self.x.shape:
            raise ValidationError(
                f"z and x must have equal length ({self.z.shape[0]} != {self.x.shape[0]})"
            )
        object.__setattr__(self, "y_prime", _check_binary(self.y_prime, "y_prime"))
        object.__setattr__(self, "y", _check_binary(self.y, "y"))
        object.__setattr__(self, "grp", _check_binary(self.grp, "grp"))

    @property
    def dim(self) -> int:
        return self.z.shape[0]


@dataclass(frozen=True)
class Population:
    """An ordered collection of individuals over one feature space."""

    individuals: tuple[Individual, ...]
    feature_names: tuple[str, ...]
    group_name: str = "group"

    def __post_init__(self):
        object.__setattr__(self, "individuals", tuple(self.individuals))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        d = len(self.feature_names)
        for ind in self.individuals:
            if ind.dim != d:
                raise ValidationError(
                    f"individual {ind.id!r} has {ind.dim} features, expected {d}"
                )
        ids = [ind.id for ind in self.individuals]
        if len(set(ids)) != len(ids):
            raise ValidationError("individual ids must be unique")

    def __len__(self) -> int:
        return len(self.individuals)

    def x_matrix(self) -> np.ndarray:
        return np.array([ind.x for ind in self.individuals], dtype=float).reshape(
            len(self), len(self.feature_names)
        )

    def z_matrix(self) -> np.ndarray:
        return np.array([ind.z for ind in self.individuals], dtype=float).reshape(
            len(self), len(self.feature_names)
        )

    def labels(self) -> np.ndarray:
        return np.array([ind.y for ind in self.individuals], dtype=int)

    def labels_prime(self) -> np.ndarray:
        return np.array([ind.y_prime for ind in self.individuals], dtype=int)

    def groups(self) -> np.ndarray:
        return np.array([ind.grp for ind in self.individuals], dtype=int)

    def ids(self) -> list[str]:
        return [ind.id for ind in self.individuals]

    def restrict(self, feature_names: list[str] | tuple[str, ...]) -> "Population":
        """Project the population onto a subset of its features.

        Used when a candidate model only consumes some columns; labels,
        groups and ids are untouched.
        """
        idx = [self.feature_names.index(f) for f in feature_names]
        inds = tuple(
            Individual(
                z=ind.z[idx],
                x=ind.x[idx],
                y_prime=ind.y_prime,
                y=ind.y,
                grp=ind.grp,
                id=ind.id,
            )
            for ind in self.individuals
        )
        return Population(inds, tuple(feature_names), self.group_name)


@dataclass(frozen=True)
class ObstacleModel:
    """Per-feature constraint weights describing how barriers bind.

    ``alpha`` must be nonnegative everywhere and zero outside
    ``affected_features``.
    """

    alpha: np.ndarray
    affected_features: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_float_vector(self.alpha, "alpha"))
        object.__setattr__(self, "affected_features", frozenset(self.affected_features))
        if np.any(self.alpha < 0):
            raise ValidationError("alpha must be nonnegative")
        for i, a in enumerate(self.alpha):
            if a > 0 and i not in self.affected_features:
                raise ValidationError(
                    f"alpha[{i}] > 0 but feature {i} is not in affected_features"
                )
        for i in self.affected_features:
            if not 0 <= i < self.alpha.shape[0]:
                raise ValidationError(f"affected feature index {i} out of range")

    @classmethod
    def from_alpha(cls, alpha) -> "ObstacleModel":
        """Build a model whose affected set is exactly the support of alpha."""
        arr = _as_float_vector(alpha, "alpha")
        return cls(arr, frozenset(int(i) for i in np.nonzero(arr > 0)[0]))

    def restrict(self, indices: list[int]) -> "ObstacleModel":
        """Project onto a subset of feature indices (re-indexed)."""
        alpha = self.alpha[indices]
        affected = frozenset(
            new for new, old in enumerate(indices) if old in self.affected_features
        )
        return ObstacleModel(alpha, affected)


@dataclass(frozen=True)
class Policy:
    """Per-individual alleviation budget. ``delta`` may be ``math.inf``."""

    delta: float = 0.0

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValidationError(f"delta must be >= 0, got {self.delta!r}")


@dataclass(frozen=True)
class RevealedPair:
    """What one individual presents to a model after alleviation.

    ``fully_accessed`` is true exactly when the pair is ``(z, y_prime)``.
    """

    x_rev: np.ndarray
    y_rev: int
    fully_accessed: bool


def dominates(z, x) -> bool:
    """True iff ``z_i >= x_i`` everywhere and ``z_i > x_i`` somewhere."""
    z = _as_float_vector(z, "z")
    x = _as_float_vector(x, "x")
    if z.shape != x.shape:
        raise ValidationError(f"length mismatch: {z.shape[0]} != {x.shape[0]}")
    return bool(np.all(z >= x) and np.any(z > x))


def obstacle_magnitude(model: ObstacleModel, ind: Individual) -> float:
    """Scalar obstacle size ``<alpha, z - x>`` for one individual.

    Raises:
        ValidationError: if dimensions disagree.
        DominanceError: if any coordinate has ``z_i < x_i``.
    """
    if model.alpha.shape[0] != ind.dim:
        raise ValidationError(
            f"obstacle model has {model.alpha.shape[0]} weights, "
            f"individual has {ind.dim} features"
        )
    diff = ind.z - ind.x
    if np.any(diff < 0):
        bad = int(np.argmax(diff < 0))
        raise DominanceError(
            f"z must dominate-or-equal x componentwise; z[{bad}] < x[{bad}] "
            f"for individual {ind.id!r}"
        )
    return float(model.alpha @ diff)


def apply_policy(obstacle: float, policy: Policy) -> float:
    """Residual obstacle after spending the budget: ``max(obstacle - delta, 0)``."""
    if not obstacle >= 0:
        raise ValidationError(f"obstacle must be >= 0, got {obstacle!r}")
    return max(obstacle - policy.delta, 0.0)


def reveal(ind: Individual, model: ObstacleModel, policy: Policy) -> RevealedPair:
    """Piecewise reveal rule for one individual.

    Returns ``(z, y_prime)`` with ``fully_accessed=True`` when the obstacle
    magnitude is zero or fully alleviated by the policy, and ``(x, y)`` with
    ``fully_accessed=False`` otherwise. Deterministic.
    """
    magnitude = obstacle_magnitude(model, ind)
    if magnitude == 0.0 or apply_policy(magnitude, policy) == 0.0:
        return RevealedPair(ind.z.copy(), ind.y_prime, True)
    return RevealedPair(ind.x.copy(), ind.y, False)


def reveal_population(
    pop: Population, model: ObstacleModel, policy: Policy
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized :func:`reveal` over a population.

    Returns ``(X_rev, y_rev, fully_accessed)`` where rows follow the
    population's order. Semantically identical to calling :func:`reveal`
    per individual.
    """
    if model.alpha.shape[0] != len(pop.feature_names):
        raise ValidationError(
            f"obstacle model has {model.alpha.shape[0]} weights, "
            f"population has {len(pop.feature_names)} features"
        )
    z = pop.z_matrix()
    x = pop.x_matrix()
    diff = z - x
    if np.any(diff < 0):
        row, col = np.argwhere(diff < 0)[0]
        raise DominanceError(
            f"z must dominate-or-equal x componentwise; violation at "
            f"individual {pop.individuals[int(row)].id!r}, feature {int(col)}"
        )
    magnitude = diff @ model.alpha
    residual = np.maximum(magnitude - policy.delta, 0.0)
    accessed = (magnitude == 0.0) | (residual == 0.0)
    x_rev = np.where(accessed[:, None], z, x)
    y_rev = np.where(accessed, pop.labels_prime(), pop.labels()).astype(int)
    return x_rev, y_rev, accessed
