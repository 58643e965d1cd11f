"""Scenario files: a single JSON document describing one experiment.

Example::

    {
      "name": "poisson_cycle3",
      "mode": "action",
      "graph": {"generator": "cycle", "n": 3},
      "agents": {"family": "poisson", "delta": 1.0, "n_samples": 3},
      "theta": 1.5,
      "seed": 7
    }

``graph`` is either a named generator (``cycle``, ``complete``, ``star``,
``path``, ``regular``), an inline ``edges`` list of ``[j, i]`` pairs, or an
``edge_list`` file path resolved relative to the scenario file.  ``agents``
is a list with one entry per agent or a single object applied to all.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

from .. import expfam
from ..belief_dynamics import Belief, StateSpace
from ..errors import DomainError, ValidationError
from ..network import DiGraph

DEFAULT_HORIZON = {"action": 10_000, "belief": 1_000}
DEFAULT_TOLERANCES = {
    "consensus": 1e-10,
    "rho": 1e-9,
    "tie": 1e-9,
    "belief_tv": 1e-12,
    "belief_outside": 1e-12,
}

_TOP_KEYS = {"name", "mode", "graph", "agents", "theta", "theta_grid", "seed", "horizon", "tolerances"}
_AGENT_KEYS = {"family", "sigma", "delta", "precision", "exposure", "n_samples", "prior", "belief_prior"}
_GENERATORS = {"cycle": {"n"}, "complete": {"n"}, "path": {"n"}, "star": {"leaves"}, "regular": {"n", "d"}}


class Mode(str, enum.Enum):
    ACTION = "action"
    BELIEF = "belief"


@dataclass(frozen=True)
class AgentSpec:
    family: str
    sigma: float
    delta: float
    n_samples: int
    prior: Optional[dict]  # None means non-informative
    belief_prior: Optional[tuple]  # None means uniform

    def signal_model(self) -> expfam.SignalModel:
        return expfam.SignalModel(self.family, self.sigma, self.delta, self.n_samples)

    def conjugate_prior(self) -> expfam.ConjugatePrior:
        if self.prior is None:
            return expfam.NonInformative()
        return expfam.Informative(tuple(self.prior["alpha"]), self.prior["beta"])


@dataclass(frozen=True)
class Scenario:
    name: str
    mode: Mode
    graph_spec: dict
    agents: tuple
    theta: float
    theta_grid: Optional[tuple]
    seed: int
    horizon: int
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    base_dir: str = "."

    @property
    def n(self) -> int:
        return len(self.agents)

    def graph(self) -> DiGraph:
        return build_graph(self.graph_spec, Path(self.base_dir))

    def models(self) -> list:
        return [a.signal_model() for a in self.agents]

    def priors(self) -> list:
        return [a.conjugate_prior() for a in self.agents]

    def state_space(self) -> StateSpace:
        return StateSpace(self.theta_grid)

    def belief_priors(self) -> list:
        m = len(self.theta_grid)
        return [Belief.uniform(m) if a.belief_prior is None else Belief.from_probs(a.belief_prior) for a in self.agents]

    def with_seed(self, seed: int) -> "Scenario":
        return Scenario(**{**self.__dict__, "seed": _seed(seed, "seed")})

    def snapshot(self) -> dict:
        """JSON-compatible view used for golden-file comparisons."""
        d = asdict(self)
        d["mode"] = self.mode.value
        d.pop("base_dir")
        return d


def build_graph(spec: dict, base_dir: Path = Path(".")) -> DiGraph:
    if "generator" in spec:
        gen = spec["generator"]
        if gen == "cycle":
            return DiGraph.cycle(spec["n"])
        if gen == "complete":
            return DiGraph.complete(spec["n"])
        if gen == "path":
            return DiGraph.path(spec["n"])
        if gen == "star":
            return DiGraph.star(spec["leaves"])
        return DiGraph.regular(spec["n"], spec["d"])
    if "edges" in spec:
        return DiGraph(spec["n"], [tuple(e) for e in spec["edges"]])
    return DiGraph.read_edge_list(base_dir / spec["edge_list"], spec.get("n"))


# -- validation helpers ---------------------------------------------------


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ValidationError(f"unknown field(s) {', '.join(extra)}", field=f"{where}.{extra[0]}" if where else extra[0])


def _number(value, where: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"expected a number, got {value!r}", field=where)
    if positive and not value > 0:
        raise ValidationError(f"must be > 0, got {value!r}", field=where)
    return float(value)


def _int(value, where: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValidationError(f"expected an integer >= {minimum}, got {value!r}", field=where)
    return value


def _seed(value, where: str) -> int:
    value = _int(value, where, minimum=0)
    if value >= 2**64:
        raise ValidationError("seed must fit in 64 bits", field=where)
    return value


def _graph_spec(raw: Any) -> dict:
    if not isinstance(raw, dict):
        raise ValidationError("expected an object", field="graph")
    if "generator" in raw:
        gen = raw["generator"]
        if gen not in _GENERATORS:
            raise ValidationError(f"unknown generator {gen!r}; choose from {sorted(_GENERATORS)}", field="graph.generator")
        _reject_unknown(raw, {"generator"} | _GENERATORS[gen], "graph")
        spec = {"generator": gen}
        for key in sorted(_GENERATORS[gen]):
            if key not in raw:
                raise ValidationError("missing", field=f"graph.{key}")
            spec[key] = _int(raw[key], f"graph.{key}")
        if gen == "regular" and spec["d"] > spec["n"]:
            raise ValidationError("d must not exceed n", field="graph.d")
        return spec
    if "edges" in raw:
        _reject_unknown(raw, {"edges", "n"}, "graph")
        n = _int(raw.get("n"), "graph.n")
        edges = []
        for k, e in enumerate(raw["edges"]):
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) and 0 <= x < n for x in e)):
                raise ValidationError(f"expected [j, i] with 0 <= j, i < {n}, got {e!r}", field=f"graph.edges[{k}]")
            edges.append(list(e))
        return {"edges": edges, "n": n}
    if "edge_list" in raw:
        _reject_unknown(raw, {"edge_list", "n"}, "graph")
        spec = {"edge_list": str(raw["edge_list"])}
        if "n" in raw:
            spec["n"] = _int(raw["n"], "graph.n")
        return spec
    raise ValidationError("needs one of 'generator', 'edges', 'edge_list'", field="graph")


def _agent(raw: Any, where: str, mode: Mode, m: Optional[int]) -> AgentSpec:
    if not isinstance(raw, dict):
        raise ValidationError("expected an object", field=where)
    _reject_unknown(raw, _AGENT_KEYS, where)
    family = raw.get("family")
    if family not in ("gaussian", "poisson"):
        raise ValidationError(f"expected 'gaussian' or 'poisson', got {family!r}", field=f"{where}.family")
    n_samples = _int(raw.get("n_samples", 1), f"{where}.n_samples")
    if family == "gaussian":
        scale_key = next((k for k in ("precision", "sigma", "delta") if k in raw), None)
        prec = _number(raw[scale_key], f"{where}.{scale_key}", positive=True) if scale_key else 1.0
        for k in ("sigma", "delta", "precision"):
            if k in raw and _number(raw[k], f"{where}.{k}", positive=True) != prec:
                raise ValidationError("Gaussian signals need sigma == delta == precision", field=f"{where}.{k}")
        if "exposure" in raw:
            raise ValidationError("not a Gaussian parameter", field=f"{where}.exposure")
        sigma = delta = prec
    else:
        sigma = _number(raw.get("sigma", 1.0), f"{where}.sigma", positive=True)
        if sigma != 1.0:
            raise ValidationError("Poisson signals need sigma == 1", field=f"{where}.sigma")
        if "precision" in raw:
            raise ValidationError("not a Poisson parameter", field=f"{where}.precision")
        if "delta" in raw and "exposure" in raw:
            raise ValidationError("give either delta or exposure", field=f"{where}.exposure")
        key = "exposure" if "exposure" in raw else "delta"
        delta = _number(raw.get(key, 1.0), f"{where}.{key}", positive=True)

    prior = raw.get("prior", "noninformative")
    if prior == "noninformative":
        prior = None
    elif isinstance(prior, dict):
        _reject_unknown(prior, {"alpha", "beta"}, f"{where}.prior")
        alpha = prior.get("alpha")
        alpha = [alpha] if isinstance(alpha, (int, float)) and not isinstance(alpha, bool) else alpha
        if not isinstance(alpha, list) or len(alpha) != 1:
            raise ValidationError("expected a number or a length-1 list", field=f"{where}.prior.alpha")
        alpha = [_number(a, f"{where}.prior.alpha", positive=family == "poisson") for a in alpha]
        beta = _number(prior.get("beta"), f"{where}.prior.beta", positive=True)
        prior = {"alpha": alpha, "beta": beta}
    else:
        raise ValidationError("expected 'noninformative' or {alpha, beta}", field=f"{where}.prior")

    belief_prior = raw.get("belief_prior")
    if belief_prior is not None:
        if mode is not Mode.BELIEF:
            raise ValidationError("only valid in belief mode", field=f"{where}.belief_prior")
        if not isinstance(belief_prior, list) or len(belief_prior) != m:
            raise ValidationError(f"expected {m} probabilities", field=f"{where}.belief_prior")
        probs = [_number(p, f"{where}.belief_prior", positive=True) for p in belief_prior]
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ValidationError("probabilities must sum to 1", field=f"{where}.belief_prior")
        belief_prior = tuple(probs)
    return AgentSpec(family, sigma, delta, n_samples, prior, belief_prior)


def parse_scenario(raw: Any, base_dir: Path = Path("."), default_name: str = "scenario") -> Scenario:
    """Validate a decoded JSON document into a :class:`Scenario`."""
    if not isinstance(raw, dict):
        raise ValidationError("top level must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "")
    try:
        mode = Mode(raw.get("mode"))
    except ValueError:
        raise ValidationError(f"expected 'action' or 'belief', got {raw.get('mode')!r}", field="mode") from None
    name = raw.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ValidationError("expected a non-empty string", field="name")

    graph_spec = _graph_spec(raw.get("graph"))
    try:
        graph = build_graph(graph_spec, base_dir)
    except (DomainError, OSError) as exc:
        raise ValidationError(str(exc), field="graph") from None

    grid = raw.get("theta_grid")
    if mode is Mode.BELIEF:
        if not isinstance(grid, list) or len(grid) < 2:
            raise ValidationError("belief mode needs a list of at least two states", field="theta_grid")
        grid = tuple(_number(v, f"theta_grid[{k}]") for k, v in enumerate(grid))
        if len(set(grid)) != len(grid):
            raise ValidationError("states must be distinct", field="theta_grid")
    elif grid is not None:
        raise ValidationError("only valid in belief mode", field="theta_grid")

    agents_raw = raw.get("agents")
    if isinstance(agents_raw, dict):
        agents_raw = [agents_raw] * graph.n
    if not isinstance(agents_raw, list):
        raise ValidationError("expected a list or an object", field="agents")
    if len(agents_raw) != graph.n:
        raise ValidationError(f"graph has {graph.n} agents but {len(agents_raw)} given", field="agents")
    m = len(grid) if grid else None
    agents = tuple(_agent(a, f"agents[{k}]", mode, m) for k, a in enumerate(agents_raw))

    if "theta" not in raw:
        raise ValidationError("missing", field="theta")
    theta = _number(raw["theta"], "theta")
    if any(a.family == "poisson" for a in agents):
        if not theta > 0:
            raise ValidationError("Poisson signals need theta > 0", field="theta")
        if grid and min(grid) <= 0:
            raise ValidationError("Poisson signals need positive states", field="theta_grid")
    if "seed" not in raw:
        raise ValidationError("missing", field="seed")
    seed = _seed(raw["seed"], "seed")
    horizon = _int(raw.get("horizon", DEFAULT_HORIZON[mode.value]), "horizon", minimum=0)

    tolerances = dict(DEFAULT_TOLERANCES)
    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        raise ValidationError("expected an object", field="tolerances")
    _reject_unknown(tol_raw, set(DEFAULT_TOLERANCES), "tolerances")
    for k, v in tol_raw.items():
        tolerances[k] = _number(v, f"tolerances.{k}", positive=True)

    return Scenario(name, mode, graph_spec, agents, theta, grid, seed, horizon, tolerances, str(base_dir))


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario: {exc.strerror}", field=str(path)) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc.msg}", field=f"{path}:{exc.lineno}:{exc.colno}") from None
    return parse_scenario(raw, path.parent, path.stem)
