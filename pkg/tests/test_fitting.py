"""Link-parameter fitting: recovery, separation behavior, diagnostics."""

import math
import warnings

import numpy as np
import pytest

from catmc.errors import InvalidInputError
from catmc.fitting import FitConfig, TrainingPairs, fit_logit, loglik_of_fit
from catmc.links import MultinomialLogitFamily, eval_probs, probs_array


def draw_pairs(family, xs, seed):
    rng = np.random.default_rng(seed)
    P = probs_array(family, xs)
    u = rng.random(xs.shape[0])
    ks = (np.cumsum(P, axis=1) < u[:, None]).sum(axis=1)
    return TrainingPairs(xs=xs, ks=np.clip(ks, 0, family.K - 1), K=family.K)


class TestTrainingPairs:
    def test_single_category_rejected(self):
        with pytest.raises(InvalidInputError):
            TrainingPairs(xs=np.array([0.0, 1.0]), ks=np.array([1, 1]), K=3)

    def test_single_input_rejected(self):
        with pytest.raises(InvalidInputError):
            TrainingPairs(xs=np.array([2.0, 2.0]), ks=np.array([0, 1]), K=2)

    def test_bad_category_index(self):
        with pytest.raises(InvalidInputError):
            TrainingPairs(xs=np.array([0.0, 1.0]), ks=np.array([0, 3]), K=3)


class TestFitLogit:
    def test_input_independent_balanced_data(self):
        # identical category frequencies at both inputs: no slope signal
        xs = np.array([-1.0, -1.0, -1.0, 1.0, 1.0, 1.0] * 50)
        ks = np.array([0, 1, 2, 0, 1, 2] * 50)
        data = TrainingPairs(xs=xs, ks=ks, K=3)
        fam = fit_logit(data, reg=1e-6)
        assert np.max(np.abs(fam.betas)) < 1e-3
        np.testing.assert_allclose(eval_probs(fam, 0.0), [1 / 3] * 3, atol=1e-3)

    def test_parameter_recovery(self):
        true = MultinomialLogitFamily(
            alphas=np.array([0.5, -0.5, 0.0]), betas=np.array([1.0, -1.0, 0.0])
        )
        rng = np.random.default_rng(77)
        xs = rng.uniform(-2, 2, size=100_000)
        data = draw_pairs(true, xs, seed=78)
        fam = fit_logit(data, reg=1e-6)
        assert np.max(np.abs(fam.alphas - true.alphas)) <= 0.05
        assert np.max(np.abs(fam.betas - true.betas)) <= 0.05

    def test_separated_data_warns_without_ridge(self):
        xs = np.concatenate([np.linspace(-2, -0.1, 50), np.linspace(0.1, 2, 50)])
        ks = (xs >= 0).astype(int)
        data = TrainingPairs(xs=xs, ks=ks, K=2)
        with pytest.warns(UserWarning, match="stationarity"):
            fit_logit(data, reg=0.0, config=FitConfig(max_iters=300))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            fam = fit_logit(data, reg=1e-2)
        assert np.all(np.isfinite(fam.alphas)) and np.all(np.isfinite(fam.betas))

    def test_fit_dominates_random_candidates(self):
        true = MultinomialLogitFamily(
            alphas=np.array([0.2, 0.0]), betas=np.array([0.8, 0.0])
        )
        rng = np.random.default_rng(79)
        xs = rng.uniform(-1, 1, size=2000)
        data = draw_pairs(true, xs, seed=80)
        fam = fit_logit(data, reg=0.0)
        fitted = loglik_of_fit(fam, data)
        for _ in range(200):
            cand = MultinomialLogitFamily(
                alphas=np.append(rng.normal(scale=0.5, size=1), 0.0),
                betas=np.append(rng.normal(scale=0.5, size=1), 0.0),
            )
            assert fitted >= loglik_of_fit(cand, data) - 1e-10

    def test_shift_covariance(self):
        true = MultinomialLogitFamily(
            alphas=np.array([0.3, -0.1, 0.0]), betas=np.array([0.7, -0.7, 0.0])
        )
        rng = np.random.default_rng(81)
        xs = rng.uniform(-2, 2, size=50_000)
        data = draw_pairs(true, xs, seed=82)
        fam0 = fit_logit(data, reg=0.0)
        c = 0.8
        shifted = TrainingPairs(xs=data.xs + c, ks=data.ks, K=3)
        fam1 = fit_logit(shifted, reg=0.0)
        np.testing.assert_allclose(fam1.betas, fam0.betas, atol=1e-3)
        np.testing.assert_allclose(
            fam1.alphas, fam0.alphas - fam0.betas * c, atol=1e-3
        )

    def test_negative_ridge_rejected(self):
        data = TrainingPairs(xs=np.array([0.0, 1.0]), ks=np.array([0, 1]), K=2)
        with pytest.raises(InvalidInputError):
            fit_logit(data, reg=-1.0)


class TestLoglikOfFit:
    def test_uniform_family_exact(self):
        fam = MultinomialLogitFamily(alphas=np.zeros(4), betas=np.zeros(4))
        data = TrainingPairs(
            xs=np.array([0.0, 1.0, 2.0]), ks=np.array([0, 3, 1]), K=4
        )
        assert loglik_of_fit(fam, data) == pytest.approx(math.log(0.25), rel=1e-15)

    def test_fitted_beats_uniform(self):
        true = MultinomialLogitFamily(
            alphas=np.array([0.5, 0.0]), betas=np.array([1.2, 0.0])
        )
        rng = np.random.default_rng(83)
        xs = rng.uniform(-1.5, 1.5, size=5000)
        data = draw_pairs(true, xs, seed=84)
        fam = fit_logit(data, reg=1e-6)
        uniform = MultinomialLogitFamily(alphas=np.zeros(2), betas=np.zeros(2))
        assert loglik_of_fit(fam, data) >= loglik_of_fit(uniform, data)

    def test_matches_brute_force_sum(self):
        fam = MultinomialLogitFamily(
            alphas=np.array([0.1, -0.2, 0.0]), betas=np.array([0.4, 0.2, 0.0])
        )
        rng = np.random.default_rng(85)
        xs = rng.uniform(-1, 1, size=200)
        data = draw_pairs(fam, xs, seed=86)
        got = loglik_of_fit(fam, data)
        brute = math.fsum(
            math.log(eval_probs(fam, x)[k]) for x, k in zip(data.xs, data.ks)
        ) / data.n
        np.testing.assert_allclose(got, brute, rtol=1e-10)
