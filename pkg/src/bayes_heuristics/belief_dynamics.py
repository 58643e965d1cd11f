"""Log-linear belief updates on a finite state space.

Beliefs are stored as normalized log-masses.  The interior of the simplex
(every log-mass finite) forms an abelian group under pointwise
multiply-and-normalize (:func:`oplus`), with the uniform belief as identity;
:func:`scale` is the matching real-exponent action.  A round of the
heuristic update is

    mu_i <- (oplus_{j in N_i} mu_j)  ominus  (oplus_{j in N_i, j != i} nu_j)

where ``nu_j`` is agent ``j``'s prior.  In log-space one round is the affine
map ``L <- (I + A) L - A log(nu)`` followed by per-agent renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from . import expfam
from .errors import DegenerateEvidenceError, DomainError, NumericalError
from .network import DiGraph

DEFAULT_TIE_TOL = 1e-9


@dataclass(frozen=True)
class StateSpace:
    """Ordered finite grid of parameter values ``theta_1..theta_m``."""

    values: tuple
    labels: Optional[tuple] = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) < 2:
            raise DomainError("state space needs at least two states")
        labels = tuple(self.labels) if self.labels is not None else tuple(f"{v:g}" for v in values)
        if len(labels) != len(values):
            raise DomainError("labels and values differ in length")
        if len(set(labels)) != len(labels):
            raise DomainError("state labels must be unique")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)


def _normalize(log_mass: np.ndarray) -> np.ndarray:
    return log_mass - logsumexp(log_mass, axis=-1, keepdims=True)


@dataclass(frozen=True, eq=False)
class Belief:
    """Probability mass function held as normalized log-masses."""

    log_mass: np.ndarray

    def __post_init__(self):
        lm = np.asarray(self.log_mass, dtype=float)
        if lm.ndim != 1 or len(lm) < 2:
            raise DomainError("belief needs a 1-d log-mass vector over at least two states")
        if np.any(np.isnan(lm)) or np.any(lm == np.inf) or np.all(lm == -np.inf):
            raise DomainError("log-masses must be finite or -inf, with at least one finite")
        object.__setattr__(self, "log_mass", _normalize(lm))

    @classmethod
    def from_probs(cls, probs) -> "Belief":
        p = np.asarray(probs, dtype=float)
        if np.any(p < 0):
            raise DomainError("probabilities must be non-negative")
        with np.errstate(divide="ignore"):
            return cls(np.log(p))

    @classmethod
    def uniform(cls, m: int) -> "Belief":
        return cls(np.zeros(m))

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_mass)

    @property
    def m(self) -> int:
        return len(self.log_mass)

    def is_interior(self) -> bool:
        return bool(np.all(np.isfinite(self.log_mass)))

    def __repr__(self):
        return f"Belief({np.array2string(self.probs, precision=6)})"


def _interior(*beliefs: Belief) -> None:
    for b in beliefs:
        if not b.is_interior():
            raise DomainError("belief algebra is defined on the simplex interior only")
    if len({b.m for b in beliefs}) > 1:
        raise DomainError("beliefs live on state spaces of different sizes")


def oplus(a: Belief, b: Belief) -> Belief:
    _interior(a, b)
    return Belief(a.log_mass + b.log_mass)


def inverse(a: Belief) -> Belief:
    _interior(a)
    return Belief(-a.log_mass)


def ominus(a: Belief, b: Belief) -> Belief:
    _interior(a, b)
    return Belief(a.log_mass - b.log_mass)


def scale(r: float, a: Belief) -> Belief:
    """``r (.) a``: raise masses to the real power ``r`` and renormalize."""
    _interior(a)
    return Belief(r * a.log_mass)


@dataclass(frozen=True, eq=False)
class LimitBelief:
    """Limit of a belief trajectory; may sit on the simplex boundary."""

    probs: np.ndarray


@dataclass(frozen=True, eq=False)
class BeliefProfile:
    beliefs: tuple
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "beliefs", tuple(self.beliefs))
        if len({b.m for b in self.beliefs}) > 1:
            raise DomainError("agents hold beliefs over different state spaces")

    @classmethod
    def from_log_masses(cls, log_masses: np.ndarray, t: int = 0) -> "BeliefProfile":
        return cls(tuple(Belief(row) for row in log_masses), t)

    @property
    def n(self) -> int:
        return len(self.beliefs)

    def log_masses(self) -> np.ndarray:
        return np.vstack([b.log_mass for b in self.beliefs])

    def probs(self) -> np.ndarray:
        return np.exp(self.log_masses())


def log_likelihood_table(models: Sequence, batches: Sequence, space: StateSpace) -> np.ndarray:
    """``(n, m)`` array of each agent's log-likelihood at each state."""
    return np.array([[expfam.log_likelihood(mod, b, th) for th in space.values] for mod, b in zip(models, batches)])


def time_zero_belief(model, batch, prior_belief: Belief, space: StateSpace) -> Belief:
    """Posterior over ``space`` from one agent's prior and private samples."""
    _interior(prior_belief)
    if prior_belief.m != space.m:
        raise DomainError("prior and state space differ in size")
    ll = np.array([expfam.log_likelihood(model, batch, th) for th in space.values])
    if not np.any(np.isfinite(ll)):
        raise DegenerateEvidenceError("every state has zero likelihood")
    return Belief(prior_belief.log_mass + ll)


def _check_profile(profile: BeliefProfile, graph: DiGraph, priors: Sequence[Belief]) -> None:
    if profile.n != graph.n or len(priors) != graph.n:
        raise DomainError(f"expected {graph.n} beliefs and priors")
    _interior(*profile.beliefs, *priors)


def update_step(profile: BeliefProfile, graph: DiGraph, priors: Sequence[Belief]) -> BeliefProfile:
    """One round of the log-linear heuristic."""
    _check_profile(profile, graph, priors)
    prior_logs = np.vstack([p.log_mass for p in priors])
    new = graph.closed_adjacency @ profile.log_masses() - graph.adjacency @ prior_logs
    return BeliefProfile.from_log_masses(new, profile.t + 1)


def vectorized_update(profile0: BeliefProfile, graph: DiGraph, priors: Sequence[Belief], t: int) -> BeliefProfile:
    """Beliefs after ``t`` rounds computed from matrix powers of ``I + A``.

    ``L_t = (I+A)^t L_0 - (sum_{tau<t} (I+A)^tau) A log(nu)``.
    Entries of ``(I+A)^t`` grow like ``(1 + rho)^t``; a non-finite result
    raises :class:`NumericalError`.
    """
    if t < 0:
        raise DomainError("t must be non-negative")
    _check_profile(profile0, graph, priors)
    if t == 0:
        return BeliefProfile(profile0.beliefs, profile0.t)
    closed = graph.closed_adjacency.astype(float)
    power = np.eye(graph.n)
    partial = np.zeros((graph.n, graph.n))
    for _ in range(t):
        partial += power
        power = power @ closed
    prior_logs = np.vstack([p.log_mass for p in priors])
    with np.errstate(over="ignore", invalid="ignore"):
        new = power @ profile0.log_masses() - partial @ (graph.adjacency @ prior_logs)
    if not np.all(np.isfinite(new)):
        raise NumericalError(f"log-masses overflowed at t={t}")
    return BeliefProfile.from_log_masses(new, profile0.t + t)


def bayesian_aggregate(models: Sequence, batches: Sequence, space: StateSpace) -> Belief:
    """Uniform-prior posterior given every agent's raw samples."""
    total = log_likelihood_table(models, batches, space).sum(axis=0)
    if not np.any(np.isfinite(total)):
        raise DegenerateEvidenceError("every state has zero joint likelihood")
    return Belief(total)


def _argmax_set(scores: np.ndarray, tie_tol: float) -> frozenset:
    best = np.max(scores)
    slack = tie_tol * max(1.0, abs(best))
    return frozenset(np.flatnonzero(scores >= best - slack).tolist())


def weighted_argmax(loglik: np.ndarray, weights, tie_tol: float = DEFAULT_TIE_TOL) -> frozenset:
    """Maximizers of ``weights @ loglik`` for an ``(n, m)`` log-likelihood table."""
    weights = np.asarray(getattr(weights, "alpha", weights), dtype=float)
    if abs(weights.sum() - 1.0) > 1e-9:
        raise DomainError("weights must sum to one")
    return _argmax_set(weights @ np.asarray(loglik, dtype=float), tie_tol)


def weighted_mle_set(models, batches, alpha, space: StateSpace, tie_tol: float = DEFAULT_TIE_TOL) -> frozenset:
    """Indices of states maximizing the ``alpha``-weighted log-likelihood.

    ``alpha`` may be a :class:`~bayes_heuristics.spectral.Centrality` or a
    weight vector summing to one; pass uniform weights for the global MLE
    set.  Ties are resolved with relative tolerance ``tie_tol``.
    """
    return weighted_argmax(log_likelihood_table(models, batches, space), alpha, tie_tol)


def asymptotic_prediction(theta_diamond, space: StateSpace) -> LimitBelief:
    """Uniform mass on ``theta_diamond`` (state indices), zero elsewhere."""
    members = sorted(theta_diamond)
    if not members:
        raise DomainError("maximizer set is empty")
    probs = np.zeros(space.m)
    probs[members] = 1.0 / len(members)
    return LimitBelief(probs)


def log_ratio_trajectory(history: Sequence[BeliefProfile], pair: tuple[int, int]) -> np.ndarray:
    """``(len(history), n)`` array of ``log(mu_i(hat) / mu_i(check))``."""
    hat, check = pair
    return np.array([p.log_masses()[:, hat] - p.log_masses()[:, check] for p in history])


def total_variation(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


@dataclass
class BeliefRun:
    profile: BeliefProfile
    converged: bool
    history: Optional[list] = None


def run_beliefs(
    profile0: BeliefProfile,
    graph: DiGraph,
    priors: Sequence[Belief],
    max_t: int = 1000,
    tv_tol: float = 1e-12,
    outside_tol: float = 1e-12,
    keep_history: bool = False,
) -> BeliefRun:
    """Iterate :func:`update_step` until beliefs settle or ``max_t`` rounds.

    Stops once every agent moves less than ``tv_tol`` in total variation or
    puts less than ``outside_tol`` mass off its current argmax set.
    """
    profile = profile0
    history = [profile] if keep_history else None
    converged = False
    while profile.t - profile0.t < max_t:
        nxt = update_step(profile, graph, priors)
        probs_prev, probs = profile.probs(), nxt.probs()
        profile = nxt
        if keep_history:
            history.append(profile)
        tv = 0.5 * np.max(np.abs(probs - probs_prev).sum(axis=1))
        outside = max(
            1.0 - probs[i, sorted(_argmax_set(lm, DEFAULT_TIE_TOL))].sum()
            for i, lm in enumerate(profile.log_masses())
        )
        if tv < tv_tol or outside < outside_tol:
            converged = True
            break
    return BeliefRun(profile, converged, history)
