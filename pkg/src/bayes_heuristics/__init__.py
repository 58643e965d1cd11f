"""Bayesian-heuristic group decision dynamics on directed networks."""

from . import action_dynamics, belief_dynamics, expfam, network, spectral
from .errors import (
    DegenerateEvidenceError,
    DegeneratePriorError,
    DomainError,
    HeuristicsError,
    NumericalError,
    PreconditionError,
    ValidationError,
)

__version__ = "0.1.0"
