"""Affine action updates derived from the time-one Bayesian response.

An agent that observes its neighbours' time-zero actions can invert them
into sufficient statistics, pool them with its own, and act on the pooled
conjugate posterior.  Reusing that map at every round gives

    a_{t+1} = T a_t + eps

with ``T`` supported on ``I + A``.  This module builds ``(T, eps)``, steps
and classifies the dynamics, and compares consensus against the pooled
minimum-variance estimator.

The model arguments only need ``sigma``, ``delta`` and ``n_samples``
attributes, so :class:`~bayes_heuristics.expfam.SignalModel` or a bare
:class:`Scaling` both work.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import expfam
from .errors import DomainError, NumericalError
from .network import DiGraph, in_neighborhood, is_strongly_connected, out_neighborhood
from .spectral import perron_pair, spectral_radius, stationary_distribution

RHO_TOL = 1e-9
BALANCE_RTOL = 1e-12


class Scaling(NamedTuple):
    """Likelihood scalings of one agent without a concrete family."""

    sigma: float
    delta: float
    n_samples: int = 1


@dataclass(frozen=True, eq=False)
class InfluenceSystem:
    T: np.ndarray
    epsilon: np.ndarray  # shape (n, k)

    def __post_init__(self):
        object.__setattr__(self, "T", np.asarray(self.T, dtype=float))
        eps = np.asarray(self.epsilon, dtype=float)
        if eps.ndim == 1:
            eps = eps[:, None]
        object.__setattr__(self, "epsilon", eps)
        if self.T.shape != (len(eps), len(eps)):
            raise DomainError(f"T has shape {self.T.shape} but epsilon has {len(eps)} rows")

    @property
    def n(self) -> int:
        return self.T.shape[0]


@dataclass(frozen=True, eq=False)
class ActionProfile:
    actions: np.ndarray  # shape (n, k)
    t: int = 0

    def __post_init__(self):
        a = np.asarray(self.actions, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        if not np.all(np.isfinite(a)):
            raise NumericalError(f"non-finite actions at t={self.t}")
        object.__setattr__(self, "actions", a)

    def spread(self) -> float:
        """Largest per-component range across agents."""
        return float(np.max(self.actions.max(axis=0) - self.actions.min(axis=0)))


class Regime(str, enum.Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


@dataclass(frozen=True, eq=False)
class DynamicsClass:
    regime: Regime
    rho: float
    equilibrium: Optional[np.ndarray] = None  # STABLE only
    projector_limit: Optional[np.ndarray] = None  # MARGINAL with a simple Perron root only


def influence_coefficients(graph: DiGraph, models: Sequence, priors: Sequence) -> InfluenceSystem:
    """Social influence matrix and neighbourhood biases.

    Non-informative priors contribute ``alpha = 0, beta = 0``.
    """
    n = graph.n
    if len(models) != n or len(priors) != n:
        raise DomainError(f"expected {n} models and priors, got {len(models)} and {len(priors)}")
    dim = getattr(models[0], "dim", 1)
    params = []
    for m, p in zip(models, priors):
        if isinstance(m, expfam.SignalModel):
            expfam.check_compatible(m, p)
        params.append(p.params(dim))
    T = np.zeros((n, n))
    eps = np.zeros((n, dim))
    for i in range(n):
        nbrs = sorted(in_neighborhood(graph, i))
        mi = models[i]
        denom = mi.sigma * (params[i][1] + sum(models[p].n_samples * models[p].delta for p in nbrs))
        for j in nbrs:
            mj = models[j]
            T[i, j] = mi.delta * mj.sigma * (mj.n_samples + params[j][1] / mj.delta) / denom
            if j != i:
                eps[i] -= mi.delta / denom * params[j][0]
    return InfluenceSystem(T, eps)


def step_affine(profile: ActionProfile, sys: InfluenceSystem) -> ActionProfile:
    return ActionProfile(sys.T @ profile.actions + sys.epsilon, profile.t + 1)


def classify_dynamics(sys: InfluenceSystem, tol: float = RHO_TOL) -> DynamicsClass:
    rho = spectral_radius(sys.T)
    if rho < 1 - tol:
        try:
            eq = np.linalg.solve(np.eye(sys.n) - sys.T, sys.epsilon)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("I - T is singular") from exc
        return DynamicsClass(Regime.STABLE, rho, equilibrium=eq)
    if rho > 1 + tol:
        return DynamicsClass(Regime.UNSTABLE, rho)
    # the rank-one limit needs a simple dominant eigenvalue (irreducible T)
    if np.sum(np.abs(np.linalg.eigvals(sys.T)) > 1 - tol) > 1:
        return DynamicsClass(Regime.MARGINAL, rho)
    return DynamicsClass(Regime.MARGINAL, rho, projector_limit=perron_pair(sys.T).projector)


def check_local_balance(graph: DiGraph, models: Sequence, rtol: float = BALANCE_RTOL) -> bool:
    """``delta_i * sum_N(sigma n) == sigma_i * sum_N(delta n)`` at every agent."""
    for i in range(graph.n):
        nbrs = in_neighborhood(graph, i)
        lhs = models[i].delta * sum(models[j].sigma * models[j].n_samples for j in nbrs)
        rhs = models[i].sigma * sum(models[j].delta * models[j].n_samples for j in nbrs)
        if abs(lhs - rhs) > rtol * max(abs(lhs), abs(rhs)):
            return False
    return True


def check_global_balance(models: Sequence, rtol: float = BALANCE_RTOL) -> bool:
    ratios = np.array([m.delta / m.sigma for m in models])
    return bool(np.all(np.abs(ratios - ratios[0]) <= rtol * np.abs(ratios[0])))


@dataclass
class ConsensusRun:
    """Outcome of :func:`run_to_consensus`.

    ``spreads`` and ``drifts`` hold per-step diagnostics (max range across
    agents, max absolute change since the previous step).
    """

    profile: ActionProfile
    converged: bool
    spreads: list = field(default_factory=list)
    drifts: list = field(default_factory=list)
    history: Optional[list] = None

    def __iter__(self):
        yield self.profile
        yield self.converged


def run_to_consensus(
    profile0: ActionProfile,
    sys: InfluenceSystem,
    tol: float = 1e-10,
    max_t: int = 1_000_000,
    keep_history: bool = False,
) -> ConsensusRun:
    """Iterate :func:`step_affine` until the spread drops below ``tol``.

    Unpacks as ``(profile, converged)``.
    """
    profile = profile0
    run = ConsensusRun(profile, False, [profile.spread()], [0.0], [profile] if keep_history else None)
    while run.spreads[-1] >= tol and profile.t - profile0.t < max_t:
        nxt = step_affine(profile, sys)
        run.drifts.append(float(np.max(np.abs(nxt.actions - profile.actions))))
        run.spreads.append(nxt.spread())
        if keep_history:
            run.history.append(nxt)
        profile = nxt
    run.profile = profile
    run.converged = run.spreads[-1] < tol
    return run


def consensus_prediction(sys: InfluenceSystem, profile0: ActionProfile) -> np.ndarray:
    """``s^T a_0`` with ``s`` the stationary law of the row-stochastic ``T``."""
    s = stationary_distribution(sys.T)
    return s @ profile0.actions


def global_mvue(models: Sequence, priors: Sequence, batches: Sequence) -> np.ndarray:
    """Per-agent Bayes estimate given every agent's raw statistics.

    Row ``i`` pools all samples into agent ``i``'s own prior.
    """
    n = len(models)
    dim = models[0].dim
    pooled_stat = sum(m.sigma * b.stat_sum for m, b in zip(models, batches))
    pooled_prec = sum(m.n_samples * m.delta for m in models)
    out = np.zeros((n, dim))
    for i, (m, p) in enumerate(zip(models, priors)):
        alpha, beta = p.params(dim)
        out[i] = expfam.bayes_estimate(expfam.PosteriorParams(alpha + pooled_stat, beta + pooled_prec), m)
    return out


class Verdict(str, enum.Enum):
    EFFICIENT = "efficient"
    INEFFICIENT = "inefficient"


@dataclass(frozen=True)
class EfficiencyVerdict:
    verdict: Verdict
    reason: Optional[str] = None  # "global balance" or "weight-sum"

    @property
    def efficient(self) -> bool:
        return self.verdict is Verdict.EFFICIENT


def efficiency_check(graph: DiGraph, models: Sequence, rtol: float = BALANCE_RTOL) -> EfficiencyVerdict:
    """Whether non-informative DeGroot consensus equals the global estimator.

    Requires global balance and a single common value for every in- and
    out-neighbourhood sum of ``n_p * delta_p``.
    """
    if not is_strongly_connected(graph):
        raise DomainError("efficiency check requires a strongly connected graph")
    if not check_global_balance(models, rtol):
        return EfficiencyVerdict(Verdict.INEFFICIENT, "global balance")
    w = [m.n_samples * m.delta for m in models]
    sums = [sum(w[p] for p in in_neighborhood(graph, i)) for i in range(graph.n)]
    sums += [sum(w[p] for p in out_neighborhood(graph, j)) for j in range(graph.n)]
    ref = sums[0]
    if any(abs(s - ref) > rtol * max(abs(s), abs(ref)) for s in sums):
        return EfficiencyVerdict(Verdict.INEFFICIENT, "weight-sum")
    return EfficiencyVerdict(Verdict.EFFICIENT)
