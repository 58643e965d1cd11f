import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bayes_heuristics import expfam
from bayes_heuristics.errors import DegeneratePriorError, DomainError
from bayes_heuristics.expfam import (
    Informative,
    NonInformative,
    PosteriorParams,
    SampleBatch,
    SignalModel,
)

from conftest import random_model, random_prior


class TestSignalModel:
    def test_family_invariants(self):
        with pytest.raises(DomainError):
            SignalModel("gaussian", 1.0, 2.0)
        with pytest.raises(DomainError):
            SignalModel("poisson", 2.0, 1.0)
        with pytest.raises(DomainError):
            SignalModel.gaussian(0.0)
        with pytest.raises(DomainError):
            SignalModel.poisson(-1.0)
        with pytest.raises(DomainError):
            SignalModel.poisson(1.0, n_samples=0)

    def test_gamma_prior_needs_positive_alpha(self):
        batch = SampleBatch([1.0])
        with pytest.raises(DomainError):
            expfam.posterior_update(Informative((-1.0,), 1.0), SignalModel.poisson(1.0), batch)
        # the same prior is fine for a Gaussian model
        expfam.posterior_update(Informative((-1.0,), 1.0), SignalModel.gaussian(1.0), batch)

    def test_informative_needs_positive_beta(self):
        with pytest.raises(DomainError):
            Informative((1.0,), 0.0)


class TestSampling:
    def test_deterministic_given_seed(self):
        model = SignalModel.gaussian(1.0, 1)
        a = expfam.sample_signals(model, 0.0, 42)
        b = expfam.sample_signals(model, 0.0, 42)
        assert a.values.shape == (1,)
        assert a.values[0] == b.values[0]

    def test_poisson_mean(self):
        model = SignalModel.poisson(2.0, 3)
        rng = np.random.default_rng(7)
        draws = np.concatenate([expfam.sample_signals(model, 1.5, rng).values for _ in range(100_000)])
        assert np.all(draws >= 0) and np.all(draws == np.round(draws))
        assert abs(draws.mean() - 3.0) < 0.05

    def test_gaussian_variance(self):
        batch = expfam.sample_signals(SignalModel.gaussian(4.0, 100_000), 1.0, 3)
        assert abs(batch.values.var(ddof=1) - 0.25) < 0.01

    def test_poisson_theta_domain(self):
        with pytest.raises(DomainError):
            expfam.sample_signals(SignalModel.poisson(1.0), 0.0, 1)


class TestPosterior:
    def test_gamma_update(self):
        post = expfam.posterior_update(Informative((2.0,), 3.0), SignalModel.poisson(1.0, 2), SampleBatch.from_stat(5.0, 2))
        assert post.alpha[0] == 7.0 and post.beta == 5.0

    def test_noninformative_update(self):
        post = expfam.posterior_update(NonInformative(), SignalModel.gaussian(2.0, 1), SampleBatch([0.5]))
        assert post.alpha[0] == 1.0 and post.beta == 2.0

    def test_gaussian_update(self):
        post = expfam.posterior_update(Informative((1.0,), 1.0), SignalModel.gaussian(1.0, 3), SampleBatch([1.0, 2.0, 3.0]))
        assert post.alpha[0] == 7.0 and post.beta == 4.0

    def test_batch_size_must_match(self):
        with pytest.raises(DomainError):
            expfam.posterior_update(NonInformative(), SignalModel.gaussian(1.0, 2), SampleBatch([1.0]))

    def test_conjugacy_closure(self, rng):
        for _ in range(200):
            model = random_model(rng)
            prior = random_prior(rng, model)
            batch = expfam.sample_signals(model, float(rng.uniform(0.5, 3)), rng)
            post = expfam.posterior_update(prior, model, batch)
            assert post.beta > 0 and post.alpha.shape == (1,)
            if model.family is expfam.Family.POISSON and isinstance(prior, Informative):
                assert post.alpha[0] > 0


class TestBayesEstimate:
    @pytest.mark.parametrize(
        "alpha, beta, model, expected",
        [
            (1.0, 2.0, SignalModel.gaussian(1.0), 0.5),
            (0.0, 5.0, SignalModel.gaussian(3.0), 0.0),
            (0.0, 5.0, SignalModel.poisson(0.3), 0.0),
            (7.0, 5.0, SignalModel.poisson(2.0), 2.8),
        ],
    )
    def test_values(self, alpha, beta, model, expected):
        assert expfam.bayes_estimate(PosteriorParams([alpha], beta), model)[0] == pytest.approx(expected, abs=1e-15)

    def test_zero_beta(self):
        with pytest.raises(DegeneratePriorError):
            expfam.bayes_estimate(PosteriorParams([1.0], 0.0), SignalModel.gaussian(1.0))

    @given(
        alpha=st.floats(-1e3, 1e3, allow_nan=False),
        beta=st.floats(1e-3, 1e3),
        scale=st.floats(1e-2, 1e2),
    )
    def test_scale_invariance(self, alpha, beta, scale):
        model = SignalModel.poisson(scale)
        a = expfam.bayes_estimate(PosteriorParams([alpha], beta), model)
        b = expfam.bayes_estimate(PosteriorParams([2 * alpha], 2 * beta), model)
        assert abs(a[0] - b[0]) <= 1e-14 * max(1.0, abs(a[0]))


class TestTimeZeroAction:
    def test_noninformative_is_sample_mean(self):
        a0 = expfam.time_zero_action(SignalModel.gaussian(1.0, 4), NonInformative(), SampleBatch.from_stat(8.0, 4))
        assert a0[0] == 2.0

    def test_gamma_example(self):
        a0 = expfam.time_zero_action(SignalModel.poisson(1.0, 2), Informative((2.0,), 4.0), SampleBatch.from_stat(6.0, 2))
        assert a0[0] == pytest.approx(4 / 3, abs=1e-15)

    def test_matches_closed_form(self, rng):
        # a0 = (stat + alpha/sigma) / (n + beta/delta)
        for _ in range(500):
            model = random_model(rng)
            prior = random_prior(rng, model)
            batch = expfam.sample_signals(model, float(rng.uniform(0.5, 3)), rng)
            alpha, beta = prior.params()
            closed = (batch.stat_sum + alpha / model.sigma) / (model.n_samples + beta / model.delta)
            got = expfam.time_zero_action(model, prior, batch)
            composed = expfam.bayes_estimate(expfam.posterior_update(prior, model, batch), model)
            np.testing.assert_allclose(got, closed, rtol=1e-13, atol=1e-14)
            np.testing.assert_allclose(got, composed, rtol=0, atol=1e-14)

    @pytest.mark.parametrize("family, theta", [("gaussian", 0.7), ("poisson", 1.3)])
    def test_consistency_large_sample(self, family, theta):
        n = 100_000
        model = SignalModel.gaussian(2.0, n) if family == "gaussian" else SignalModel.poisson(1.5, n)
        a0 = expfam.time_zero_action(model, NonInformative(), expfam.sample_signals(model, theta, 99))[0]
        target = model.signal_mean(theta)
        se = math.sqrt(1 / (model.sigma * n)) if family == "gaussian" else math.sqrt(target / n)
        assert abs(a0 - target) < 5 * se


class TestInferNeighborStat:
    def test_examples(self):
        assert expfam.infer_neighbor_stat(2.0, SignalModel.gaussian(1.0, 4), NonInformative())[0] == 8.0
        stat = expfam.infer_neighbor_stat(4 / 3, SignalModel.poisson(1.0, 2), Informative((2.0,), 4.0))[0]
        assert stat == pytest.approx(6.0, abs=1e-14)

    def test_round_trip(self, rng):
        for _ in range(1000):
            model = random_model(rng)
            prior = random_prior(rng, model)
            batch = expfam.sample_signals(model, float(rng.uniform(0.5, 3)), rng)
            back = expfam.infer_neighbor_stat(expfam.time_zero_action(model, prior, batch), model, prior)
            assert abs(back[0] - batch.stat_sum[0]) < 1e-12 * max(1.0, abs(batch.stat_sum[0]))

    @settings(max_examples=200)
    @given(
        stat=st.floats(-50, 50),
        n=st.integers(1, 20),
        prec=st.floats(0.1, 10),
        alpha=st.floats(-5, 5),
        beta=st.floats(0.01, 10),
    )
    def test_round_trip_gaussian(self, stat, n, prec, alpha, beta):
        model = SignalModel.gaussian(prec, n)
        prior = Informative((alpha,), beta)
        batch = SampleBatch.from_stat(stat, n)
        back = expfam.infer_neighbor_stat(expfam.time_zero_action(model, prior, batch), model, prior)
        assert abs(back[0] - stat) < 1e-12 * max(1.0, abs(stat), abs(alpha) / prec)


class TestLogLikelihood:
    def test_gaussian_difference(self):
        model = SignalModel.gaussian(1.0, 1)
        batch = SampleBatch([0.0])
        diff = expfam.log_likelihood(model, batch, 0.0) - expfam.log_likelihood(model, batch, 1.0)
        assert diff == pytest.approx(0.5, abs=1e-15)

    def test_poisson_difference(self):
        model = SignalModel.poisson(1.0, 1)
        batch = SampleBatch([2.0])
        diff = expfam.log_likelihood(model, batch, 2.0) - expfam.log_likelihood(model, batch, 1.0)
        assert diff == pytest.approx(2 * math.log(2) - 1, abs=1e-14)

    def test_poisson_full_log_pmf(self):
        model = SignalModel.poisson(2.0, 2)
        batch = SampleBatch([3.0, 0.0])
        rate = 2.0 * 1.5
        expected = sum(s * math.log(rate) - rate - math.lgamma(s + 1) for s in (3.0, 0.0))
        assert expfam.log_likelihood(model, batch, 1.5) == pytest.approx(expected, abs=1e-13)

    def test_dropped_constant_keeps_ratios(self, rng):
        full = SignalModel.poisson(1.3, 4)
        dropped = SignalModel.poisson(1.3, 4, drop_constants=True)
        batch = expfam.sample_signals(full, 2.0, rng)
        for a, b in [(0.5, 2.0), (1.0, 3.0), (2.5, 0.1)]:
            r_full = expfam.log_likelihood(full, batch, a) - expfam.log_likelihood(full, batch, b)
            r_drop = expfam.log_likelihood(dropped, batch, a) - expfam.log_likelihood(dropped, batch, b)
            assert r_full == pytest.approx(r_drop, abs=1e-12)

    def test_poisson_domain(self):
        with pytest.raises(DomainError):
            expfam.log_likelihood(SignalModel.poisson(1.0), SampleBatch([1.0]), -1.0)
