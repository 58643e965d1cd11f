"""Deterministic simulation driver producing :class:`RunReport` objects."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import action_dynamics as ad
from .. import belief_dynamics as bd
from .. import expfam
from ..errors import HeuristicsError, NumericalError
from ..network import is_balanced_regular, is_strongly_connected
from ..spectral import centrality
from .scenario import Mode, Scenario

log = logging.getLogger(__name__)

NOT_APPLICABLE = "not_applicable"

ACTION_KEYS = (
    "rho_T", "regime", "equilibrium", "local_balance", "global_balance", "efficiency",
    "efficiency_reason", "time_zero_actions", "consensus_value", "predicted_consensus",
    "consensus_prediction_error", "global_mvue", "efficiency_gap", "converged", "diverged",
    "final_spread", "final_drift",
)
BELIEF_KEYS = (
    "states", "theta_diamond", "theta_star", "mu_star", "limit_belief", "final_beliefs",
    "mass_on_theta_diamond", "mu_star_outside_theta_diamond", "polarization_gap",
    "theta_diamond_equals_theta_star", "belief_converged",
)
SHARED_KEYS = ("n_agents", "strongly_connected", "balanced_regular_degree", "centrality", "steps")


class ScenarioError(HeuristicsError):
    """Module error annotated with the scenario it came from."""

    def __init__(self, scenario: str, cause: Exception):
        self.cause = cause
        super().__init__(f"scenario {scenario!r}: {cause}")


@dataclass
class RunReport:
    """Trajectory records ``(t, agent, component, value)`` plus diagnostics.

    Every diagnostic key of both modes is present; the ones that do not apply
    to the run's mode hold :data:`NOT_APPLICABLE`.
    """

    scenario: str
    mode: str
    seed: int
    trajectory: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


def agent_rngs(seed: int, n: int) -> list:
    """One counter-based stream per agent, keyed by ``(seed, agent)``."""
    return [np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(i,)))) for i in range(n)]


def sample_batches(scenario: Scenario) -> list:
    rngs = agent_rngs(scenario.seed, scenario.n)
    return [expfam.sample_signals(m, scenario.theta, rng) for m, rng in zip(scenario.models(), rngs)]


def _rows(values: np.ndarray) -> list:
    return [[float(x) for x in row] for row in np.atleast_2d(values)]


def _record(trajectory: list, t: int, values: np.ndarray) -> None:
    for agent, row in enumerate(values):
        for comp, v in enumerate(row):
            trajectory.append((t, agent, comp, float(v)))


def _shared(scenario: Scenario, graph) -> dict:
    connected = is_strongly_connected(graph)
    return {
        "n_agents": scenario.n,
        "strongly_connected": connected,
        "balanced_regular_degree": is_balanced_regular(graph),
        "centrality": [float(a) for a in centrality(graph).alpha] if connected else NOT_APPLICABLE,
    }


def _action_diagnostics(scenario: Scenario, graph, batches) -> tuple[dict, ad.InfluenceSystem, np.ndarray]:
    models, priors = scenario.models(), scenario.priors()
    a0 = np.vstack([expfam.time_zero_action(m, p, b) for m, p, b in zip(models, priors, batches)])
    sys = ad.influence_coefficients(graph, models, priors)
    cls = ad.classify_dynamics(sys, scenario.tolerances["rho"])
    diag = {
        "rho_T": cls.rho,
        "regime": cls.regime.value,
        "equilibrium": _rows(cls.equilibrium) if cls.equilibrium is not None else NOT_APPLICABLE,
        "local_balance": ad.check_local_balance(graph, models),
        "global_balance": ad.check_global_balance(models),
        "time_zero_actions": _rows(a0),
        "global_mvue": _rows(ad.global_mvue(models, priors, batches)),
    }
    if is_strongly_connected(graph):
        verdict = ad.efficiency_check(graph, models)
        diag["efficiency"] = verdict.verdict.value
        diag["efficiency_reason"] = verdict.reason
    else:
        diag["efficiency"] = diag["efficiency_reason"] = NOT_APPLICABLE
    stochastic = bool(np.all(sys.epsilon == 0) and np.max(np.abs(sys.T.sum(axis=1) - 1)) <= 1e-12)
    if stochastic and is_strongly_connected(graph):
        diag["predicted_consensus"] = [float(x) for x in ad.consensus_prediction(sys, ad.ActionProfile(a0))]
    else:
        diag["predicted_consensus"] = NOT_APPLICABLE
    return diag, sys, a0


def _run_action(scenario: Scenario, report: RunReport, diag: dict) -> None:
    graph = scenario.graph()
    batches = sample_batches(scenario)
    action_diag, sys, a0 = _action_diagnostics(scenario, graph, batches)
    diag.update(action_diag)
    profile = ad.ActionProfile(a0)
    _record(report.trajectory, 0, profile.actions)
    tol = scenario.tolerances["consensus"]
    spread, drift, diverged = profile.spread(), 0.0, False
    while spread >= tol and profile.t < scenario.horizon:
        new = sys.T @ profile.actions + sys.epsilon
        if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > 1e300:
            diverged = True
            break
        nxt = ad.ActionProfile(new, profile.t + 1)
        drift = float(np.max(np.abs(nxt.actions - profile.actions)))
        profile, spread = nxt, nxt.spread()
        _record(report.trajectory, profile.t, profile.actions)
    converged = spread < tol
    diag.update(
        steps=profile.t,
        converged=converged,
        diverged=diverged,
        final_spread=spread,
        final_drift=drift,
    )
    if converged:
        consensus = profile.actions.mean(axis=0)
        diag["consensus_value"] = [float(x) for x in consensus]
        diag["efficiency_gap"] = float(np.max(np.abs(np.asarray(diag["global_mvue"]) - consensus)))
        if diag["predicted_consensus"] != NOT_APPLICABLE:
            diag["consensus_prediction_error"] = float(np.max(np.abs(consensus - diag["predicted_consensus"])))
        else:
            diag["consensus_prediction_error"] = NOT_APPLICABLE
    else:
        diag["consensus_value"] = diag["efficiency_gap"] = diag["consensus_prediction_error"] = NOT_APPLICABLE


def _belief_diagnostics(scenario: Scenario, graph, batches) -> dict:
    models, space = scenario.models(), scenario.state_space()
    tie = scenario.tolerances["tie"]
    mu_star = bd.bayesian_aggregate(models, batches, space)
    star = bd.weighted_mle_set(models, batches, np.full(scenario.n, 1.0 / scenario.n), space, tie)
    diag = {
        "states": list(space.labels),
        "mu_star": [float(x) for x in mu_star.probs],
        "theta_star": [space.labels[k] for k in sorted(star)],
    }
    if is_strongly_connected(graph):
        diamond = bd.weighted_mle_set(models, batches, centrality(graph), space, tie)
        limit = bd.asymptotic_prediction(diamond, space)
        outside = [k for k in range(space.m) if k not in diamond]
        diag.update(
            theta_diamond=[space.labels[k] for k in sorted(diamond)],
            theta_diamond_equals_theta_star=diamond == star,
            limit_belief=[float(x) for x in limit.probs],
            mu_star_outside_theta_diamond=float(mu_star.probs[outside].sum()),
            polarization_gap=bd.total_variation(limit.probs, mu_star.probs),
        )
    else:
        for key in ("theta_diamond", "theta_diamond_equals_theta_star", "limit_belief",
                    "mu_star_outside_theta_diamond", "polarization_gap"):
            diag[key] = NOT_APPLICABLE
    return diag


def _run_belief(scenario: Scenario, report: RunReport, diag: dict) -> None:
    graph = scenario.graph()
    batches = sample_batches(scenario)
    models, space, priors = scenario.models(), scenario.state_space(), scenario.belief_priors()
    diag.update(_belief_diagnostics(scenario, graph, batches))
    profile0 = bd.BeliefProfile(
        bd.time_zero_belief(m, b, p, space) for m, b, p in zip(models, batches, priors)
    )
    run = bd.run_beliefs(
        profile0, graph, priors, scenario.horizon,
        scenario.tolerances["belief_tv"], scenario.tolerances["belief_outside"], keep_history=True,
    )
    for p in run.history:
        _record(report.trajectory, p.t, p.probs())
    final = run.profile.probs()
    diag.update(steps=run.profile.t, belief_converged=run.converged, final_beliefs=_rows(final))
    if diag["theta_diamond"] != NOT_APPLICABLE:
        members = [space.labels.index(lbl) for lbl in diag["theta_diamond"]]
        diag["mass_on_theta_diamond"] = float(final[:, members].sum(axis=1).min())
    else:
        diag["mass_on_theta_diamond"] = NOT_APPLICABLE


def _fill(diag: dict) -> dict:
    for key in SHARED_KEYS + ACTION_KEYS + BELIEF_KEYS:
        diag.setdefault(key, NOT_APPLICABLE)
    return diag


def run(scenario: Scenario) -> RunReport:
    """Sample signals, simulate to the horizon or convergence, diagnose."""
    report = RunReport(scenario.name, scenario.mode.value, scenario.seed)
    try:
        graph = scenario.graph()
        diag = _shared(scenario, graph)
        if scenario.mode is Mode.ACTION:
            _run_action(scenario, report, diag)
        else:
            _run_belief(scenario, report, diag)
    except HeuristicsError as exc:
        raise ScenarioError(scenario.name, exc) from exc
    report.diagnostics = _fill(diag)
    log.info("%s: %d steps, %d trajectory rows", scenario.name, diag["steps"], len(report.trajectory))
    return report


def diagnose(scenario: Scenario) -> dict:
    """All diagnostics computable without iterating the dynamics."""
    try:
        graph = scenario.graph()
        diag = _shared(scenario, graph)
        batches = sample_batches(scenario)
        if scenario.mode is Mode.ACTION:
            diag.update(_action_diagnostics(scenario, graph, batches)[0])
        else:
            diag.update(_belief_diagnostics(scenario, graph, batches))
    except HeuristicsError as exc:
        raise ScenarioError(scenario.name, exc) from exc
    return diag


def is_numerical(exc: BaseException) -> bool:
    cause = getattr(exc, "cause", exc)
    return isinstance(cause, NumericalError)
