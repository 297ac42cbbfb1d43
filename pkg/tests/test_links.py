"""Link-family construction, evaluation, derivatives, smoothness constants."""

import json

import numpy as np
import pytest

from catmc.errors import (
    DegenerateFamilyError,
    InvalidInputError,
    UnsupportedOperationError,
)
from catmc.links import (
    MultinomialLogitFamily,
    TabularLinkFamily,
    adjacent_confusion_family,
    default_logit_family,
    eval_derivs,
    eval_probs,
    family_from_json,
    family_to_json,
    probs_array,
    smoothness_constants,
)


def random_family(rng, K):
    return MultinomialLogitFamily(
        alphas=rng.normal(size=K), betas=rng.normal(size=K)
    )


class TestEvalProbs:
    def test_all_zero_parameters_uniform(self):
        fam = MultinomialLogitFamily(alphas=np.zeros(4), betas=np.zeros(4))
        np.testing.assert_allclose(eval_probs(fam, 7.3), np.full(4, 0.25), atol=1e-15)

    def test_confusion_table_values(self):
        fam = adjacent_confusion_family(5)
        p1 = eval_probs(fam, 1)
        np.testing.assert_allclose(p1, [0.8, 0.2, 0.0, 0.0, 0.0], atol=1e-15)
        p3 = eval_probs(fam, 3)
        np.testing.assert_allclose(p3, [0.0, 0.2, 0.6, 0.2, 0.0], atol=1e-15)
        p5 = eval_probs(fam, 5)
        np.testing.assert_allclose(p5, [0.0, 0.0, 0.0, 0.2, 0.8], atol=1e-15)

    def test_binary_logistic_value(self):
        fam = MultinomialLogitFamily(alphas=np.zeros(2), betas=np.array([1.0, 0.0]))
        # direct evaluation of e^{0.5} / (e^{0.5} + 1)
        expected = np.exp(0.5) / (np.exp(0.5) + 1.0)
        np.testing.assert_allclose(
            eval_probs(fam, 0.5), [expected, 1.0 - expected], rtol=1e-15
        )

    def test_normalization_many_random_families(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            K = int(rng.integers(2, 8))
            fam = random_family(rng, K)
            x = rng.uniform(-3, 3)
            p = eval_probs(fam, x)
            assert abs(p.sum() - 1.0) <= 1e-12
            assert np.all(p > 0)

    def test_overflow_safety(self):
        fam = MultinomialLogitFamily(alphas=np.zeros(3), betas=np.array([400.0, 0.0, -400.0]))
        p = probs_array(fam, np.array([-5.0, 0.0, 5.0]))
        assert np.all(np.isfinite(p))
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)

    def test_nonfinite_input_rejected(self):
        fam = default_logit_family(3)
        with pytest.raises(InvalidInputError):
            eval_probs(fam, np.nan)
        with pytest.raises(InvalidInputError):
            eval_probs(fam, np.inf)

    def test_tabular_noninteger_input_rejected(self):
        fam = adjacent_confusion_family(4)
        with pytest.raises(InvalidInputError):
            eval_probs(fam, 2.5)
        with pytest.raises(InvalidInputError):
            eval_probs(fam, 0)


class TestEvalDerivs:
    def test_constant_family_zero_derivative(self):
        fam = MultinomialLogitFamily(alphas=np.array([0.3, -0.2, 0.0]), betas=np.zeros(3))
        np.testing.assert_allclose(eval_derivs(fam, 1.7), np.zeros(3), atol=1e-15)

    def test_matches_central_differences(self):
        rng = np.random.default_rng(1)
        h = 1e-6
        for _ in range(100):
            K = int(rng.integers(2, 7))
            fam = random_family(rng, K)
            x = rng.uniform(-2, 2)
            d = eval_derivs(fam, x)
            fd = (eval_probs(fam, x + h) - eval_probs(fam, x - h)) / (2 * h)
            np.testing.assert_allclose(d, fd, rtol=1e-6, atol=1e-9)

    def test_binary_logistic_derivative(self):
        fam = MultinomialLogitFamily(alphas=np.zeros(2), betas=np.array([1.0, 0.0]))
        d = eval_derivs(fam, 0.0)
        np.testing.assert_allclose(d, [0.25, -0.25], rtol=1e-14)

    def test_derivatives_sum_to_zero(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            fam = random_family(rng, 5)
            d = eval_derivs(fam, rng.uniform(-4, 4))
            assert abs(d.sum()) <= 1e-10

    def test_tabular_unsupported(self):
        with pytest.raises(UnsupportedOperationError):
            eval_derivs(adjacent_confusion_family(3), 1)


class TestSmoothnessConstants:
    def test_constant_family_degenerate(self):
        fam = MultinomialLogitFamily(alphas=np.zeros(4), betas=np.zeros(4))
        with pytest.raises(DegenerateFamilyError):
            smoothness_constants(fam, 1.0, 256)

    def test_binary_family_against_finer_grid(self):
        fam = MultinomialLogitFamily(alphas=np.zeros(2), betas=np.array([1.0, 0.0]))
        coarse = smoothness_constants(fam, 1.0, 512)
        fine = smoothness_constants(fam, 1.0, 5120)
        assert abs(coarse.L_alpha - fine.L_alpha) <= 1e-3 * fine.L_alpha
        assert abs(coarse.beta_minus - fine.beta_minus) <= 1e-3 * fine.beta_minus
        assert abs(coarse.beta_plus - fine.beta_plus) <= 1e-3 * fine.beta_plus

    def test_wide_box_family_shape(self):
        # ordered overlapping bumps on a wide box: constants stay sane
        fam = default_logit_family(5)
        rep = smoothness_constants(fam, 10.0)
        assert rep.beta_minus > 0
        assert np.isfinite(rep.beta_plus)
        assert 0 < rep.beta_minus <= rep.beta_plus
        assert rep.L_alpha > 0

    @pytest.mark.parametrize("n", [256, 1024])
    def test_refinement_stability(self, n):
        fam = default_logit_family(5)
        a = smoothness_constants(fam, 1.0, n)
        b = smoothness_constants(fam, 1.0, 2 * n)
        for attr in ("L_alpha", "beta_minus", "beta_plus"):
            va, vb = getattr(a, attr), getattr(b, attr)
            assert abs(va - vb) <= 1e-4 * abs(vb), attr

    def test_grid_size_validated(self):
        with pytest.raises(InvalidInputError):
            smoothness_constants(default_logit_family(3), 1.0, 32)

    def test_binary_constants_match_independent_binary_forms(self):
        # independently coded sigmoid-form evaluation of the same constants
        fam = MultinomialLogitFamily(alphas=np.array([0.4, 0.0]), betas=np.array([1.3, 0.0]))
        alpha = 1.5
        a, b = fam.alphas[0], fam.betas[0]
        grid = np.linspace(-alpha, alpha, 4096)
        f = 1.0 / (1.0 + np.exp(-(a + b * grid)))
        fprime = b * f * (1.0 - f)
        L_bin = max(np.max(np.abs(fprime) / f), np.max(np.abs(fprime) / (1.0 - f)))
        beta_x = np.maximum(fprime**2 / f, fprime**2 / (1.0 - f))
        rep = smoothness_constants(fam, alpha, 4096)
        np.testing.assert_allclose(rep.L_alpha, L_bin, rtol=1e-12)
        np.testing.assert_allclose(rep.beta_minus, beta_x.min(), rtol=1e-12)
        np.testing.assert_allclose(rep.beta_plus, beta_x.max(), rtol=1e-12)


class TestFamilyConstruction:
    def test_reference_category_normalization(self):
        fam = MultinomialLogitFamily(
            alphas=np.array([1.0, 2.0, 3.0]), betas=np.array([-1.0, 0.0, 1.0])
        )
        assert fam.alphas[-1] == 0.0 and fam.betas[-1] == 0.0
        # normalization leaves probabilities unchanged
        raw = np.exp(np.array([1.0, 2.0, 3.0]) + np.array([-1.0, 0.0, 1.0]) * 0.7)
        np.testing.assert_allclose(eval_probs(fam, 0.7), raw / raw.sum(), rtol=1e-12)

    def test_default_family_shape(self):
        fam = default_logit_family(5)
        assert fam.K == 5
        diffs = np.diff(fam.betas)
        np.testing.assert_allclose(diffs, diffs[0])

    def test_too_few_categories(self):
        with pytest.raises(InvalidInputError):
            MultinomialLogitFamily(alphas=np.zeros(1), betas=np.zeros(1))

    def test_tabular_row_sums_validated(self):
        bad = np.array([[0.5, 0.4], [0.5, 0.5]])
        with pytest.raises(InvalidInputError):
            TabularLinkFamily(table=bad)

    def test_families_immutable(self):
        fam = default_logit_family(3)
        with pytest.raises(ValueError):
            fam.betas[0] = 99.0


class TestJsonRoundTrip:
    def test_logit_round_trip(self):
        fam = MultinomialLogitFamily(
            alphas=np.array([0.5, -0.5, 0.0]), betas=np.array([1.0, -1.0, 0.0])
        )
        doc = family_to_json(fam)
        assert doc["kind"] == "logit" and doc["K"] == 3
        back = family_from_json(json.dumps(doc))
        np.testing.assert_array_equal(back.alphas, fam.alphas)
        np.testing.assert_array_equal(back.betas, fam.betas)

    def test_tabular_round_trip(self):
        fam = adjacent_confusion_family(4)
        back = family_from_json(family_to_json(fam))
        np.testing.assert_array_equal(back.table, fam.table)

    def test_k_mismatch_rejected(self):
        doc = family_to_json(default_logit_family(3))
        doc["K"] = 4
        with pytest.raises(InvalidInputError):
            family_from_json(doc)

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidInputError):
            family_from_json({"kind": "spline", "K": 2})
