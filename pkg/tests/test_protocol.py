"""Split mechanics and the end-to-end rating protocol on synthetic data."""

import numpy as np
import pytest

from catmc.errors import InvalidInputError
from catmc.links import adjacent_confusion_family, probs_array
from catmc.protocol import run_protocol, split_observations
from catmc.sampling import ObservationSet, sample_mask
from catmc.solver import SolverConfig


def synth_rating_obs(d1=60, d2=80, n=2500, rank=3, seed=0):
    """Low-rank latent ratings observed through the confusion table."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d1, rank))
    B = rng.standard_normal((d2, rank))
    S = A @ B.T
    S = 3.0 + 1.5 * S / np.std(S)
    R = np.clip(np.rint(S), 1, 5)
    flat = rng.choice(d1 * d2, size=n, replace=False)
    rows, cols = flat // d2, flat % d2
    fam = adjacent_confusion_family(5)
    P = probs_array(fam, R[rows, cols])
    u = rng.random(n)
    cats = np.clip((np.cumsum(P, axis=1) < u[:, None]).sum(axis=1), 0, 4)
    return ObservationSet(
        d1=d1, d2=d2, rows=rows, cols=cols, cats=cats,
        labels=np.arange(1.0, 6.0),
    )


class TestSplit:
    def test_disjoint_and_sized(self):
        obs = synth_rating_obs()
        fit, solve_part, test = split_observations(obs, 300, 400, seed=1)
        assert fit.n_obs == 300 and test.n_obs == 400
        assert solve_part.n_obs == obs.n_obs - 700
        keys = [
            set(zip(part.rows.tolist(), part.cols.tolist()))
            for part in (fit, solve_part, test)
        ]
        assert not (keys[0] & keys[1]) and not (keys[0] & keys[2])
        assert not (keys[1] & keys[2])

    def test_deterministic(self):
        obs = synth_rating_obs()
        a = split_observations(obs, 200, 200, seed=5)
        b = split_observations(obs, 200, 200, seed=5)
        for pa, pb in zip(a, b):
            np.testing.assert_array_equal(pa.rows, pb.rows)

    def test_oversized_split_rejected(self):
        obs = synth_rating_obs(n=500)
        with pytest.raises(InvalidInputError):
            split_observations(obs, 400, 400, seed=0)


class TestProtocol:
    def test_end_to_end_synthetic(self):
        obs = synth_rating_obs()
        res = run_protocol(
            obs, rank=3, seed=2, n_fit=500, n_test=500,
            solver_config=SolverConfig(
                max_iters=40, grad_tol=1e-3, dykstra_tol=1e-5, dykstra_max=20
            ),
        )
        assert res.split_sizes == (500, 1500, 500)
        # sane error levels on a confusion-noise instance
        assert 0.0 < res.categorical.overall < 2.0
        assert 0.0 < res.baseline.overall < 2.0
        assert sum(res.categorical.counts.values()) == 500
        # the fitted link orders categories by slope
        assert np.all(np.diff(res.family.betas) > 0) or np.all(
            np.diff(res.family.betas) < 0
        )
        # estimates live in centered coordinates inside the feasible box
        assert np.max(np.abs(res.categorical_estimate.X)) <= 2.2 + 1e-9

    def test_reports_on_original_label_scale(self):
        obs = synth_rating_obs(n=2000)
        res = run_protocol(
            obs, rank=2, seed=7, n_fit=400, n_test=400,
            solver_config=SolverConfig(
                max_iters=25, grad_tol=1e-3, dykstra_tol=1e-5, dykstra_max=20
            ),
        )
        assert set(res.categorical.per_category) <= {1.0, 2.0, 3.0, 4.0, 5.0}
        assert set(res.baseline.per_category) <= {1.0, 2.0, 3.0, 4.0, 5.0}
