import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sdnsched.model import (
    LOCAL,
    Arm,
    ArmStats,
    ArrivalModel,
    AvailabilitySet,
    CostModel,
    Decision,
    QueueState,
    RunConfig,
    ServiceModel,
    Topology,
    ValidationError,
)
from sdnsched.scenarios import Scenario, build_paper_like, load_config, save_config


def small_topology():
    return Topology(2, 3, ((0, 2), (1,)), ((0.9, 0.5), (1.0,)))


class TestTopology:
    def test_valid(self):
        topo = small_topology()
        assert topo.node_count == 5
        assert topo.candidate_mask().tolist() == [[True, False, True], [False, True, False]]
        assert topo.arms() == [Arm(0, LOCAL), Arm(1, LOCAL), Arm(0, 0), Arm(0, 2), Arm(1, 1)]

    def test_empty_candidate_set_rejected(self):
        with pytest.raises(ValidationError):
            Topology(1, 1, ((),), ((),))

    def test_unknown_controller_rejected(self):
        with pytest.raises(ValidationError):
            Topology(1, 1, ((1,),), ((0.5,),))

    def test_bad_probability_rejected(self):
        with pytest.raises(ValidationError):
            Topology(1, 1, ((0,),), ((1.5,),))

    def test_unsorted_candidates_rejected(self):
        with pytest.raises(ValidationError):
            Topology(1, 2, ((1, 0),), ((0.5, 0.5),))


class TestDecisionMatrix:
    def test_every_feasible_matrix_accepted(self):
        # enumerate the full feasible set for one availability draw
        topo = small_topology()
        avail = AvailabilitySet(np.array([[True, False, False], [False, True, False]]))
        options = [[LOCAL, 0], [LOCAL, 1]]
        count = 0
        for k0 in options[0]:
            for k1 in options[1]:
                d = Decision(np.array([k0, k1]))
                m = d.to_matrix(topo)
                got = Decision.from_matrix(m, topo, avail)
                assert got.choices.tolist() == [k0, k1]
                count += 1
        assert count == 4

    def test_row_sum_violations_rejected(self):
        topo = small_topology()
        m = np.zeros((2, 4), dtype=int)
        m[1, 3] = 1  # switch 0 picks nothing
        with pytest.raises(ValidationError):
            Decision.from_matrix(m, topo)
        m = np.zeros((2, 4), dtype=int)
        m[0, 0] = m[0, 3] = 1  # switch 0 picks two targets
        m[1, 3] = 1
        with pytest.raises(ValidationError):
            Decision.from_matrix(m, topo)

    def test_unreachable_and_noncandidate_rejected(self):
        topo = small_topology()
        avail = AvailabilitySet(np.array([[False, False, True], [False, False, False]]))
        m = np.zeros((2, 4), dtype=int)
        m[0, 0] = 1  # candidate but unreachable this slot
        m[1, 3] = 1
        with pytest.raises(ValidationError):
            Decision.from_matrix(m, topo, avail)
        m = np.zeros((2, 4), dtype=int)
        m[0, 1] = 1  # not even a candidate
        m[1, 3] = 1
        with pytest.raises(ValidationError):
            Decision.from_matrix(m, topo)

    @given(st.integers(0, 10 ** 6))
    def test_random_valid_decisions_round_trip(self, seed):
        topo = small_topology()
        rng = np.random.default_rng(seed)
        avail = AvailabilitySet(topo.candidate_mask() & (rng.random((2, 3)) < 0.7))
        choices = []
        for i in range(2):
            opts = [LOCAL] + list(avail.controllers(i))
            choices.append(opts[rng.integers(len(opts))])
        d = Decision(np.array(choices))
        d.validate(topo, avail)
        back = Decision.from_matrix(d.to_matrix(topo), topo, avail)
        assert back.choices.tolist() == d.choices.tolist()


class TestQueueState:
    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            QueueState(np.array([-1]), np.array([0]))

    def test_total_and_lookup(self):
        q = QueueState(np.array([2, 3]), np.array([4]))
        assert q.total() == 9
        assert q.of(Arm(1, LOCAL)) == 3
        assert q.of(Arm(0, 0)) == 4


class TestArmStats:
    def test_initial_counts_zero(self):
        stats = ArmStats(small_topology(), reward_floor=-4.0)
        assert stats.plays_of(Arm(0, 0)) == 0
        assert stats.sample_mean(Arm(0, 0)) == 0.0

    def test_record_and_means(self):
        stats = ArmStats(small_topology(), reward_floor=-4.0)
        stats.record(Arm(0, 2), -1.0)
        stats.record(Arm(0, 2), -3.0)
        assert stats.plays_of(Arm(0, 2)) == 2
        assert stats.sample_mean(Arm(0, 2)) == -2.0
        assert stats.reward_sq_sum[0, 2] == 10.0

    def test_positive_reward_rejected(self):
        stats = ArmStats(small_topology(), reward_floor=-4.0)
        with pytest.raises(ValidationError):
            stats.record(Arm(0, 0), 0.5)

    def test_below_floor_rejected(self):
        stats = ArmStats(small_topology(), reward_floor=-2.0)
        with pytest.raises(ValidationError):
            stats.record(Arm(0, 0), -3.0)


class TestSerialization:
    def test_scenario_round_trip(self, tmp_path):
        sc = build_paper_like()
        run = RunConfig(policy="lasac", horizon=100, v_weight=100.0, seed=7, run_count=3)
        path = tmp_path / "config.json"
        save_config(path, sc, run)
        sc2, run2, sweep2 = load_config(path)
        assert sc2 == sc
        assert run2 == run
        assert sweep2 is None

    def test_model_dicts_round_trip_through_json(self):
        topo = small_topology()
        cost = CostModel(((1.0, 2.5), (3.0,)), (2.0, 1.5), w_max=4.0, m_max=4.0, half_width=0.25)
        arr = ArrivalModel(kind="bursty", lambda_max=6, rate_low=(1.0, 1.0), rate_high=(3.0, 2.0))
        svc = ServiceModel((2.0, 2.0), (3.0, 3.0, 3.0), mu_max=4, jitter=True)
        for obj, cls in [(topo, Topology), (cost, CostModel), (arr, ArrivalModel), (svc, ServiceModel)]:
            assert cls.from_dict(json.loads(json.dumps(obj.to_dict()))) == obj

    def test_run_config_validation(self):
        with pytest.raises(ValidationError):
            RunConfig(policy="nope", horizon=10, v_weight=1.0)
        with pytest.raises(ValidationError):
            RunConfig(policy="lasac", horizon=-1, v_weight=1.0)
        with pytest.raises(ValidationError):
            RunConfig(policy="lasac", horizon=10, v_weight=-1.0)
        with pytest.raises(ValidationError):
            RunConfig(policy="lasac-eps", horizon=10, v_weight=1.0, epsilon=1.5)


class TestCostModel:
    def test_mean_rewards_table(self):
        topo = small_topology()
        cost = CostModel(((1.0, 2.0), (3.0,)), (0.5, 1.5), w_max=4.0, m_max=4.0)
        table = cost.mean_rewards(topo)
        assert table[0, 0] == -1.0 and table[0, 2] == -2.0 and table[0, 3] == -0.5
        assert np.isnan(table[0, 1]) and np.isnan(table[1, 0])
        assert cost.reward_floor() == -4.0

    def test_window_clipping(self):
        cost = CostModel(((0.5,),), (3.9,), w_max=4.0, m_max=4.0, half_width=1.0)
        assert cost.upload_window(0, 0) == (0.0, 1.5)
        assert cost.local_window(0) == (2.9, 4.0)
        assert cost.true_mean_upload(0, 0) == 0.75

    def test_mean_outside_bound_rejected(self):
        with pytest.raises(ValidationError):
            CostModel(((5.0,),), (1.0,), w_max=4.0, m_max=4.0)


class TestArrivalModel:
    def test_mean_rates_constant(self):
        am = ArrivalModel(kind="constant", lambda_max=3, rate=(2.0, 5.0))
        assert am.mean_rates().tolist() == [2.0, 3.0]

    def test_bursty_stationary_probability(self):
        am = ArrivalModel(
            kind="bursty", lambda_max=6, rate_low=(1.0,), rate_high=(4.0,),
            stay_low=0.95, stay_high=0.8,
        )
        # flips: low->high 0.05, high->low 0.2 -> pi_high = 0.05 / 0.25
        assert am.high_state_prob() == pytest.approx(0.2)
