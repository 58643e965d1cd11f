"""Exponential-family signal models with conjugate priors.

Two families are built in:

* ``GAUSSIAN`` -- samples ``N(theta, 1/sigma)`` with ``sigma == delta``;
  conjugate prior is Gaussian with mean ``alpha/beta`` and precision ``beta``.
* ``POISSON`` -- samples ``Poisson(delta * theta)`` with ``sigma == 1``;
  conjugate prior is ``Gamma(alpha, beta)`` on ``theta``.

Both use the identity sufficient statistic, so every update depends only on
``(sigma, delta, n_samples)`` and the per-agent sum of raw samples.  The
quantity an agent estimates is the mean of one sample, ``theta`` for the
Gaussian family and ``delta * theta`` for the Poisson family.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import gammaln

from .errors import DegeneratePriorError, DomainError, NumericalError


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    POISSON = "poisson"


@dataclass(frozen=True)
class SignalModel:
    """Likelihood of one agent's private samples.

    ``sigma`` scales the sufficient statistic and ``delta`` scales the
    log-partition term; ``n_samples`` is the number of i.i.d. draws.
    ``drop_constants`` removes the ``log(s!)`` term from Poisson
    log-likelihoods (it never changes likelihood ratios).
    """

    family: Family
    sigma: float
    delta: float
    n_samples: int = 1
    dim: int = 1
    drop_constants: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be a positive finite number, got {self.sigma}")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise DomainError(f"delta must be a positive finite number, got {self.delta}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise DomainError(f"n_samples must be a positive integer, got {self.n_samples}")
        if self.dim != 1:
            raise DomainError("built-in families have a one-dimensional sufficient statistic")
        if self.family is Family.GAUSSIAN and self.sigma != self.delta:
            raise DomainError("Gaussian signals require sigma == delta (precision)")
        if self.family is Family.POISSON and self.sigma != 1:
            raise DomainError("Poisson signals require sigma == 1")
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @classmethod
    def gaussian(cls, precision: float, n_samples: int = 1) -> "SignalModel":
        return cls(Family.GAUSSIAN, precision, precision, n_samples)

    @classmethod
    def poisson(cls, exposure: float, n_samples: int = 1, drop_constants: bool = False) -> "SignalModel":
        return cls(Family.POISSON, 1.0, exposure, n_samples, drop_constants=drop_constants)

    def signal_mean(self, theta: float) -> float:
        """Expected value of one sample given ``theta``."""
        self.check_theta(theta)
        if self.family is Family.GAUSSIAN:
            return float(theta)
        return self.delta * float(theta)

    def check_theta(self, theta: float) -> None:
        if self.family is Family.POISSON and not theta > 0:
            raise DomainError(f"Poisson rate parameter must be positive, got {theta}")
        if not math.isfinite(theta):
            raise DomainError(f"theta must be finite, got {theta}")


@dataclass(frozen=True)
class Informative:
    """Proper conjugate prior with parameters ``(alpha, beta)``."""

    alpha: tuple
    beta: float

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        if alpha.ndim != 1 or not np.all(np.isfinite(alpha)):
            raise DomainError("alpha must be a finite real vector")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be positive, got {self.beta}")
        object.__setattr__(self, "alpha", tuple(float(a) for a in alpha))
        object.__setattr__(self, "beta", float(self.beta))

    def params(self, dim: int = 1) -> tuple[np.ndarray, float]:
        if len(self.alpha) != dim:
            raise DomainError(f"alpha has length {len(self.alpha)}, expected {dim}")
        return np.array(self.alpha), self.beta


@dataclass(frozen=True)
class NonInformative:
    """The improper ``alpha -> 0, beta -> 0`` limit of the conjugate family."""

    def params(self, dim: int = 1) -> tuple[np.ndarray, float]:
        return np.zeros(dim), 0.0


ConjugatePrior = Union[Informative, NonInformative]


def check_compatible(model: SignalModel, prior: ConjugatePrior) -> None:
    """Raise if ``prior`` is not a valid conjugate prior for ``model``."""
    alpha, _ = prior.params(model.dim)
    if isinstance(prior, Informative) and model.family is Family.POISSON and np.any(alpha <= 0):
        raise DomainError("Gamma prior requires alpha > 0")


@dataclass(frozen=True)
class PosteriorParams:
    alpha: np.ndarray
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.atleast_1d(np.asarray(self.alpha, dtype=float)))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Raw samples of one agent and their sufficient-statistic sum."""

    values: np.ndarray
    stat_sum: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", values)
        if self.stat_sum is None:
            with np.errstate(over="ignore"):
                total = values.sum()
            if np.all(np.isfinite(values)) and not np.isfinite(total):
                raise NumericalError("sufficient statistic overflowed")
            object.__setattr__(self, "stat_sum", np.array([total]))
        else:
            object.__setattr__(self, "stat_sum", np.atleast_1d(np.asarray(self.stat_sum, dtype=float)))

    @property
    def n_samples(self) -> int:
        return len(self.values)

    @classmethod
    def from_stat(cls, stat_sum, n_samples: int) -> "SampleBatch":
        """Batch known only through its statistic (raw values are placeholders)."""
        stat = np.atleast_1d(np.asarray(stat_sum, dtype=float))
        return cls(np.full(n_samples, stat[0] / n_samples), stat)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_signals(model: SignalModel, theta: float, seed) -> SampleBatch:
    """Draw ``model.n_samples`` private signals for state ``theta``.

    ``seed`` is either a ``numpy.random.Generator`` (consumed in place) or
    anything accepted by ``numpy.random.default_rng``.
    """
    model.check_theta(theta)
    rng = _rng(seed)
    if model.family is Family.GAUSSIAN:
        values = rng.normal(theta, 1.0 / math.sqrt(model.sigma), size=model.n_samples)
    else:
        values = rng.poisson(model.delta * theta, size=model.n_samples).astype(float)
    return SampleBatch(values)


def _check_batch(model: SignalModel, batch: SampleBatch) -> None:
    if batch.n_samples != model.n_samples:
        raise DomainError(f"batch has {batch.n_samples} samples, model expects {model.n_samples}")
    if batch.stat_sum.shape != (model.dim,):
        raise DomainError(f"stat_sum must have length {model.dim}")


def posterior_update(prior: ConjugatePrior, model: SignalModel, batch: SampleBatch) -> PosteriorParams:
    check_compatible(model, prior)
    _check_batch(model, batch)
    alpha, beta = prior.params(model.dim)
    return PosteriorParams(alpha + model.sigma * batch.stat_sum, beta + model.n_samples * model.delta)


def bayes_estimate(params: PosteriorParams, model: SignalModel) -> np.ndarray:
    """Posterior mean of the per-sample signal mean: ``alpha*delta/(sigma*beta)``."""
    if not params.beta > 0:
        raise DegeneratePriorError("Bayes estimate undefined for beta == 0")
    return params.alpha * model.delta / (model.sigma * params.beta)


def time_zero_action(model: SignalModel, prior: ConjugatePrior, batch: SampleBatch) -> np.ndarray:
    return bayes_estimate(posterior_update(prior, model, batch), model)


def infer_neighbor_stat(action, model: SignalModel, prior: ConjugatePrior) -> np.ndarray:
    """Recover a neighbour's statistic sum from its time-zero action."""
    check_compatible(model, prior)
    alpha, beta = prior.params(model.dim)
    action = np.atleast_1d(np.asarray(action, dtype=float))
    return (model.n_samples + beta / model.delta) * action - alpha / model.sigma


def log_likelihood(model: SignalModel, batch: SampleBatch, theta: float) -> float:
    model.check_theta(theta)
    s = batch.values
    if model.family is Family.GAUSSIAN:
        prec = model.sigma
        return float(np.sum(0.5 * math.log(prec / (2 * math.pi)) - 0.5 * prec * (s - theta) ** 2))
    if np.any(s < 0) or np.any(s != np.round(s)):
        raise DomainError("Poisson samples must be non-negative integers")
    rate = model.delta * theta
    ll = np.sum(s * math.log(rate) - rate)
    if not model.drop_constants:
        ll -= np.sum(gammaln(s + 1))
    return float(ll)
