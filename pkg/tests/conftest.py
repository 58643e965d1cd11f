import numpy as np
import pytest

from bayes_heuristics import expfam
from bayes_heuristics.network import DiGraph, is_strongly_connected


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_strongly_connected(rng, n, p=0.3):
    """Random digraph on ``n`` nodes, resampled until strongly connected."""
    while True:
        mask = rng.random((n, n)) < p
        g = DiGraph(n, [(j, i) for i in range(n) for j in range(n) if mask[i, j]])
        if is_strongly_connected(g):
            return g


def random_model(rng, family=None):
    family = family or rng.choice(["gaussian", "poisson"])
    n = int(rng.integers(1, 6))
    if family == "gaussian":
        return expfam.SignalModel.gaussian(float(rng.uniform(0.2, 5.0)), n)
    return expfam.SignalModel.poisson(float(rng.uniform(0.2, 5.0)), n)


def random_prior(rng, model, informative=None):
    if informative is None:
        informative = rng.random() < 0.5
    if not informative:
        return expfam.NonInformative()
    if model.family is expfam.Family.POISSON:
        return expfam.Informative((float(rng.uniform(0.1, 5.0)),), float(rng.uniform(0.1, 5.0)))
    return expfam.Informative((float(rng.normal(0, 3)),), float(rng.uniform(0.1, 5.0)))
