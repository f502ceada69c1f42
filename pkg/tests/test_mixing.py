"""Finite-sample slack terms for beta-mixing processes."""

import math

import numpy as np
import pytest

from conformal_ts import mixing


class TestMixingModel:
    def test_iid_is_zero(self):
        m = mixing.iid()
        assert all(m.beta(a) == 0.0 for a in (1, 5, 1000))

    def test_geometric_decay(self):
        m = mixing.geometric(c=1.0, rho=0.5)
        assert m.beta(3) == 0.125

    def test_clamped_into_unit_interval(self):
        m = mixing.geometric(c=10.0, rho=0.9)
        assert m.beta(1) == 1.0

    def test_table_extends_by_last_value(self):
        m = mixing.from_table([0.5, 0.2, 0.1])
        assert m.beta(2) == 0.2
        assert m.beta(50) == 0.1

    def test_validation(self):
        with pytest.raises(ValueError):
            mixing.geometric(rho=1.5)
        with pytest.raises(ValueError):
            mixing.from_table([0.1, 0.5])  # increasing
        with pytest.raises(ValueError):
            mixing.polynomial(kappa=0.0)
        with pytest.raises(ValueError):
            mixing.iid().beta(0)


class TestSigmaTilde:
    def test_iid_indicator_bound(self):
        for a in (1, 2, 10, 100):
            assert mixing.sigma_tilde(mixing.iid(), a) == 0.5

    def test_a_equal_one_has_empty_sum(self):
        for model in (mixing.iid(), mixing.geometric(1.0, 0.9), mixing.from_table([1.0])):
            assert mixing.sigma_tilde(model, 1) == 0.5

    def test_geometric_hand_evaluation(self):
        # sqrt(1/4 + (2/3)(2 * 0.5 + 1 * 0.25)) = sqrt(1/4 + 5/6)
        got = mixing.sigma_tilde(mixing.geometric(1.0, 0.5), 3)
        assert got == pytest.approx(math.sqrt(0.25 + 5.0 / 6.0), abs=1e-12)
        assert got == pytest.approx(1.0408329997330663, abs=1e-12)

    def test_dominates_variance_bound(self):
        models = [mixing.iid(), mixing.geometric(1.0, 0.7), mixing.polynomial(0.5, 1.5)]
        for model in models:
            for a in (1, 2, 5, 20):
                s2 = mixing.sigma_tilde(model, a) ** 2
                assert s2 >= 0.25 - 1e-15
                is_degenerate = a == 1 or all(model.beta(k) == 0 for k in range(1, a))
                assert (abs(s2 - 0.25) < 1e-15) == is_degenerate


class TestEpsilonCal:
    def test_iid_frozen_oracle_value(self):
        # independent exhaustive-scan oracle (tools outside the package) gives
        # 0.1190860343135288 at the lexicographically smallest argmin (1, 150, 1)
        b = mixing.epsilon_cal(300, 0.1, mixing.iid())
        assert b.feasible
        assert b.triple == (1, 150, 1)
        assert b.value == pytest.approx(0.1190860343135288, abs=1e-12)

    def test_monotone_in_delta(self):
        lo = mixing.epsilon_cal(300, 0.1, mixing.iid())
        hi = mixing.epsilon_cal(300, 0.2, mixing.iid())
        assert hi.value == pytest.approx(0.1065860287414982, abs=1e-12)
        assert hi.value < lo.value

    def test_degenerate_mixing_is_infeasible(self):
        b = mixing.epsilon_cal(300, 0.1, mixing.from_table([1.0]))
        assert not b.feasible
        assert "beta" in b.reason
        with pytest.raises(ValueError, match="infeasible"):
            float(b)

    def test_triple_reproduces_value(self):
        for model in (mixing.iid(), mixing.geometric(1.0, 0.8), mixing.polynomial(0.8, 2.0)):
            b = mixing.epsilon_cal(300, 0.1, model)
            a, m, r = b.triple
            nprime = 300 - r + 1
            assert 2 * m * a == nprime
            slack = 0.1 - 4 * (m - 1) * model.beta(a) - model.beta(r)
            assert slack > 0
            log_term = math.log(4.0 / slack)
            val = (
                mixing.sigma_tilde(model, a) * math.sqrt(4.0 / nprime * log_term)
                + log_term / (3 * m)
                + (r - 1) / 300
            )
            assert b.value == pytest.approx(val, abs=1e-12)

    def test_monotone_under_pointwise_larger_beta(self):
        weak = mixing.epsilon_cal(300, 0.1, mixing.geometric(1.0, 0.5))
        strong = mixing.epsilon_cal(300, 0.1, mixing.geometric(1.0, 0.6))
        assert strong.value >= weak.value

    def test_input_validation(self):
        with pytest.raises(ValueError):
            mixing.epsilon_cal(3, 0.1, mixing.iid())
        with pytest.raises(ValueError):
            mixing.epsilon_cal(300, 0.0, mixing.iid())


class TestEpsilonTest:
    def test_iid_optimum_has_no_padding(self):
        b = mixing.epsilon_test(300, 300, 0.1, mixing.iid())
        assert b.feasible
        assert b.triple == (1, 150, 0)
        assert b.value == pytest.approx(0.1190860343135288, abs=1e-12)

    def test_infeasible_when_gap_term_dominates(self):
        # beta(n_cal) >= delta_test makes every triple infeasible
        model = mixing.geometric(1.0, 0.999)
        assert model.beta(300) > 0.1
        b = mixing.epsilon_test(300, 300, 0.1, model)
        assert not b.feasible

    def test_forced_padding_never_optimal(self):
        b = mixing.epsilon_test(300, 300, 0.1, mixing.iid())
        # evaluate the (a=1, m=1, s=298) corner directly
        slack = 0.1
        log_term = math.log(4.0 / slack)
        forced = 0.5 * math.sqrt(4.0 / 300 * log_term) + log_term / 3 + 298 / 300
        assert b.value < forced
        assert b.triple[2] != 298


class TestEpsilonTrain:
    def test_iid_is_zero(self):
        assert mixing.epsilon_train(601, 300, mixing.iid()) == 0.0

    def test_geometric_gap(self):
        got = mixing.epsilon_train(601, 300, mixing.geometric(1.0, 0.9))
        assert got == pytest.approx(0.9**301, rel=1e-12)
        assert got == pytest.approx(1.7e-14, rel=0.02)

    def test_table_beyond_range(self):
        assert mixing.epsilon_train(601, 300, mixing.from_table([0.4, 0.3])) == 0.3

    def test_rejects_nonpositive_gap(self):
        with pytest.raises(ValueError, match="after the training block"):
            mixing.epsilon_train(300, 300, mixing.iid())


class TestSlackReport:
    def test_iid_benchmark_sizes(self):
        r = mixing.slack_report(300, 300, 300, 0.1, 0.1, 0.1, mixing.iid())
        assert r.feasible
        assert r.eps_train == 0.0
        assert r.marginal_lower_bound == pytest.approx(1 - 0.1 - 0.1 - 0.1190860343135288, abs=1e-12)
        assert r.empirical_confidence == pytest.approx(0.8)
        assert r.eta_empirical == pytest.approx(2 * 0.1190860343135288, abs=1e-12)

    def test_rejects_degenerate_delta(self):
        with pytest.raises(ValueError):
            mixing.slack_report(300, 300, 300, 0.1, 0.0, 0.1, mixing.iid())

    def test_bound_improves_with_calibration_size(self):
        bounds = [
            mixing.slack_report(300, n_cal, 300, 0.1, 0.1, 0.1, mixing.iid()).marginal_lower_bound
            for n_cal in (300, 1000, 10_000)
        ]
        assert bounds[0] < bounds[1] < bounds[2] < 1 - 0.1 - 0.1

    def test_infeasible_report_carries_reason(self):
        r = mixing.slack_report(300, 300, 300, 0.1, 0.1, 0.1, mixing.from_table([1.0]))
        assert not r.feasible
        assert r.failing_constraint
        assert r.marginal_lower_bound is None
        d = r.to_dict()
        assert d["feasible"] is False

    def test_dict_round_trips_to_json(self):
        import json

        r = mixing.slack_report(300, 300, 300, 0.1, 0.1, 0.1, mixing.geometric(1.0, 0.8))
        json.dumps(r.to_dict())
