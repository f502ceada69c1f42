"""Least-squares forecaster and bootstrap ensemble."""

import numpy as np
import pytest

from conformal_ts import forecaster as fc


class TestFitLeastSquares:
    def test_recovers_noiseless_recursion(self):
        y = [1.0]
        for _ in range(5):
            y.append(0.5 * y[-1])
        X = np.array(y[:-1]).reshape(-1, 1)
        model = fc.fit_least_squares(X, np.array(y[1:]), intercept=False)
        assert model.coef[0] == pytest.approx(0.5, abs=1e-12)

    def test_exact_line(self):
        model = fc.fit_least_squares([[1.0], [2.0], [3.0]], [2.0, 4.0, 6.0], intercept=False)
        assert model.coef[0] == pytest.approx(2.0, abs=1e-12)

    def test_rank_deficient_minimum_norm(self):
        # duplicated column: compare against an independent pseudo-inverse solve
        rng = np.random.default_rng(0)
        base = rng.standard_normal((20, 1))
        X = np.hstack([base, base])
        y = rng.standard_normal(20)
        model = fc.fit_least_squares(X, y, intercept=False)
        expected = np.linalg.pinv(X) @ y
        np.testing.assert_allclose(model.coef, expected, atol=1e-10)

    def test_empty_and_nonfinite_inputs(self):
        with pytest.raises(ValueError, match="empty"):
            fc.fit_least_squares(np.empty((0, 2)), np.empty(0))
        with pytest.raises(ValueError, match="non-finite"):
            fc.fit_least_squares([[1.0], [np.nan]], [0.0, 1.0])

    def test_least_squares_optimality(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((40, 3))
        y = X @ np.array([0.3, -0.7, 1.1]) + rng.standard_normal(40)
        model = fc.fit_least_squares(X, y, intercept=True)
        A = np.column_stack([np.ones(40), X])
        beta = np.concatenate([[model.intercept], model.coef])
        ssr = np.sum((y - A @ beta) ** 2)
        for i in range(4):
            for delta in (1e-3, -1e-3):
                pert = beta.copy()
                pert[i] += delta
                assert np.sum((y - A @ pert) ** 2) >= ssr


class TestPredict:
    def test_inner_product(self):
        model = fc.LinearForecaster(coef=np.array([2.0]), intercept=0.0, intercept_enabled=False)
        assert model.predict([3.0]) == 6.0

    def test_with_intercept(self):
        model = fc.LinearForecaster(coef=np.array([1.0, 1.0]), intercept=0.5, intercept_enabled=True)
        assert model.predict([1.0, 2.0]) == 3.5

    def test_zero_coefficients(self):
        model = fc.LinearForecaster(coef=np.zeros(3), intercept=0.0, intercept_enabled=False)
        for x in ([1.0, 2.0, 3.0], [-5.0, 0.0, 9.0]):
            assert model.predict(x) == 0.0

    def test_dimension_mismatch(self):
        model = fc.LinearForecaster(coef=np.array([1.0, 2.0]), intercept=0.0, intercept_enabled=False)
        with pytest.raises(ValueError, match="does not match"):
            model.predict([1.0])

    def test_immutability_under_prediction(self):
        rng = np.random.default_rng(1)
        X, y = rng.standard_normal((30, 2)), rng.standard_normal(30)
        model = fc.fit_least_squares(X, y)
        before = model.coef.copy()
        for row in X:
            model.predict(row)
        np.testing.assert_array_equal(model.coef, before)


class TestEnsemble:
    def test_shape_of_benchmark_configuration(self):
        rng = np.random.default_rng(2)
        X, y = rng.standard_normal((40, 2)), rng.standard_normal(40)
        ens = fc.fit_ensemble(X, y, 25, seed=3)
        assert ens.n_models == 25
        assert len(ens.multisets) == 25
        assert all(len(s) == 40 for s in ens.multisets)

    def test_determinism(self):
        rng = np.random.default_rng(5)
        X, y = rng.standard_normal((15, 1)), rng.standard_normal(15)
        a = fc.fit_ensemble(X, y, 6, seed=99)
        b = fc.fit_ensemble(X, y, 6, seed=99)
        for s, t in zip(a.multisets, b.multisets):
            np.testing.assert_array_equal(s, t)

    def test_full_resample_gives_empty_oob(self):
        # single model whose multiset happens to cover every point: fall back to all models
        X = np.array([[1.0], [2.0], [3.0]])
        y = np.array([2.0, 4.0, 6.0])
        model = fc.fit_least_squares(X, y, intercept=False)
        ens = fc.BootstrapEnsemble(
            models=(model,), multisets=(np.array([0, 1, 2]),), in_bag=np.ones((3, 1), dtype=bool)
        )
        assert fc.oob_predict(ens, 0, [1.0]) == pytest.approx(model.predict([1.0]))

    def test_oob_membership_by_inspection(self):
        # multisets {1,1,2}, {2,3,3}, {1,3,3} over training positions 1..3 (1-based);
        # position 1 is out-of-bag for the second model only
        consts = [10.0, 20.0, 30.0]
        models = tuple(
            fc.LinearForecaster(coef=np.zeros(1), intercept=c, intercept_enabled=True) for c in consts
        )
        multisets = (np.array([0, 0, 1]), np.array([1, 2, 2]), np.array([0, 2, 2]))
        in_bag = np.zeros((3, 3), dtype=bool)
        for m, s in enumerate(multisets):
            in_bag[np.unique(s), m] = True
        ens = fc.BootstrapEnsemble(models=models, multisets=multisets, in_bag=in_bag)
        assert fc.oob_predict(ens, 0, [0.0]) == 20.0

    def test_oob_mean_aggregation(self):
        consts = [1.0, 2.0, 3.0]
        models = tuple(
            fc.LinearForecaster(coef=np.zeros(1), intercept=c, intercept_enabled=True) for c in consts
        )
        in_bag = np.zeros((4, 3), dtype=bool)  # every model OOB for every point
        ens = fc.BootstrapEnsemble(models=models, multisets=(np.array([]),) * 3, in_bag=in_bag)
        assert fc.oob_predict(ens, 2, [0.0]) == 2.0

    def test_oob_correctness_invariant(self):
        rng = np.random.default_rng(8)
        X, y = rng.standard_normal((25, 2)), rng.standard_normal(25)
        ens = fc.fit_ensemble(X, y, 10, seed=13)
        for i in range(25):
            oob = [m for m in range(10) if not ens.in_bag[i, m]]
            if oob:
                expected = np.mean([ens.models[m].predict(X[i]) for m in oob])
                assert fc.oob_predict(ens, i, X[i]) == pytest.approx(expected, rel=1e-12)
                for m in oob:
                    assert i not in ens.multisets[m]

    def test_rejects_unknown_aggregator(self):
        X = np.array([[1.0], [2.0]])
        ens = fc.fit_ensemble(X, [1.0, 2.0], 2, seed=0)
        with pytest.raises(ValueError, match="aggregator"):
            fc.oob_predict(ens, 0, [1.0], aggregator="median")
