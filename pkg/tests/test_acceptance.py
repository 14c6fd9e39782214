"""End-to-end acceptance checks at desk scale.

One test per criterion; every tolerance is pinned here. Each test prints a
single PASS line (visible with ``pytest -s`` or in the captured output).
The longer scenario-level checks are marked ``slow`` but run by default.
"""

import math

import numpy as np
import pytest

import sdnsched as sd
from sdnsched import harness, metrics
from sdnsched.estimators import ucb1_tuned_estimate
from sdnsched.model import LOCAL, Arm, ArmStats, Decision, QueueState, RunConfig, Topology
from sdnsched.environment import step_queues
from sdnsched.scenarios import build_paper_like, random_enumerable, two_controller_learning

PAPER_LIKE = build_paper_like()


def _scenario_metrics(scenario, policy, horizon, v_weight, beta, runs, seed=42):
    costs, backlogs, variances, rewards = [], [], [], []
    for run in range(runs):
        cfg = RunConfig(policy=policy, horizon=horizon, v_weight=v_weight, beta=beta, seed=seed)
        tr = harness.run_episode(scenario, cfg, run_index=run)
        st = metrics.backlog_stats_from_means(tr.node_backlog_avg)
        costs.append(tr.time_avg_cost())
        backlogs.append(st.time_avg_total)
        variances.append(st.cross_node_variance)
        rewards.append(tr.time_avg_reward())
    return {
        "cost": float(np.mean(costs)),
        "backlog": float(np.mean(backlogs)),
        "variance": float(np.mean(variances)),
        "reward": float(np.mean(rewards)),
        "reward_se": float(np.std(rewards, ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0,
    }


def test_criterion_1_confidence_index_oracle():
    """The variance-aware index matches an independent scalar recomputation."""

    def oracle(samples, t, beta):
        h = len(samples)
        if h == 0:
            return 0.0
        log_term = math.log(t + 1.0)
        mean = math.fsum(samples) / h
        sq_mean = math.fsum(x * x for x in samples) / h
        var_opt = sq_mean - mean * mean + math.sqrt(2.0 * log_term / h)
        u = mean + beta * math.sqrt((log_term / h) * min(0.25, var_opt))
        return min(u, 0.0)

    rng = np.random.default_rng(123)
    topo = Topology(1, 1, ((0,),), ((1.0,),))
    arm = Arm(0, 0)
    cases = 0
    for _ in range(24):
        h = int(rng.integers(1, 40))
        samples = [-float(x) for x in rng.uniform(0.0, 4.0, size=h)]
        t = int(rng.integers(h, 10 ** 6))
        beta = float(rng.choice([0.0, 0.5, 2.0, 3.7, 8.0, 50.0]))
        stats = ArmStats(topo, reward_floor=-4.0)
        for x in samples:
            stats.record(arm, x)
        got = ucb1_tuned_estimate(stats, arm, t, beta)
        want = oracle(samples, t, beta)
        assert abs(got - want) <= 1e-12 * max(1.0, abs(want)), (got, want)
        cases += 1
    # plus the fixed worked example: samples {-1,-3} at log term 2, beta 2
    stats = ArmStats(topo, reward_floor=-4.0)
    stats.record(arm, -1.0)
    stats.record(arm, -3.0)
    got = ucb1_tuned_estimate(stats, arm, math.exp(2.0) - 1.0, 2.0)
    assert abs(got - (-1.0)) <= 1e-12
    print(f"\nACCEPTANCE PASS [1] confidence-index oracle: {cases + 1} cases within 1e-12")


def test_criterion_2_queue_dynamics_brute_force():
    """10^4 randomized slots reproduce a straight-line queue recomputation exactly."""
    topo = Topology(3, 2, ((0,), (0, 1), (1,)), ((1.0,), (1.0, 1.0), (1.0,)))
    rng = np.random.default_rng(7)
    q = QueueState.zeros(topo)
    ref_s = [0, 0, 0]
    ref_c = [0, 0]
    options = [(LOCAL, 0), (LOCAL, 0, 1), (LOCAL, 1)]
    for _ in range(10 ** 4):
        choices = np.array([opts[rng.integers(len(opts))] for opts in options])
        arrivals = rng.integers(0, 6, size=3)
        mu_s = rng.integers(0, 5, size=3)
        mu_c = rng.integers(0, 5, size=2)
        q = step_queues(q, Decision(choices), arrivals, mu_s, mu_c)
        inflow = [0, 0]
        for i, k in enumerate(choices):
            if k == LOCAL:
                ref_s[i] = max(ref_s[i] + int(arrivals[i]) - int(mu_s[i]), 0)
            else:
                ref_s[i] = max(ref_s[i] - int(mu_s[i]), 0)
                inflow[k] += int(arrivals[i])
        for j in range(2):
            ref_c[j] = max(ref_c[j] + inflow[j] - int(mu_c[j]), 0)
        assert q.switches.tolist() == ref_s and q.controllers.tolist() == ref_c
    print("\nACCEPTANCE PASS [2] queue dynamics match brute force on 10^4 slots exactly")


@pytest.mark.slow
def test_criterion_3_oracle_dominance():
    """No policy's simulated reward rate beats the stationary oracle by > 3 SE."""
    runs = 3
    horizon = 10 ** 5
    checked = 0
    for seed in range(100, 110):
        sc = random_enumerable(seed)
        res = metrics.optimal_reward_rate(
            sc.topology, sc.costs.mean_rewards(sc.topology), sc.arrivals.mean_rates(),
            sc.services.switch_means, sc.services.controller_means,
        )
        for policy in sd.POLICY_IDS:
            rates = []
            for run in range(runs):
                cfg = RunConfig(policy=policy, horizon=horizon, v_weight=50.0, beta=2.0,
                                epsilon=0.1, seed=seed)
                rates.append(harness.run_episode(sc, cfg, run_index=run).time_avg_reward())
            mean = float(np.mean(rates))
            se = float(np.std(rates, ddof=1) / math.sqrt(runs))
            assert mean <= res.reward_rate + 3.0 * se + 1e-9, (seed, policy, mean, res.reward_rate, se)
            checked += 1
    print(f"\nACCEPTANCE PASS [3] oracle dominance: {checked} policy/instance pairs within R* + 3 SE")


def test_criterion_4_learning_convergence_on_tiny_instance():
    """Time-averaged regret is small at 10^5 slots and halves from 10^4."""
    sc = two_controller_learning(cheap=1.0, dear=3.0)
    res = metrics.optimal_reward_rate(
        sc.topology, sc.costs.mean_rewards(sc.topology), sc.arrivals.mean_rates(),
        sc.services.switch_means, sc.services.controller_means,
    )
    assert res.reward_rate == pytest.approx(-1.0, abs=1e-9)
    regrets = {}
    for horizon in (10 ** 4, 10 ** 5):
        cfg = RunConfig(policy="lasac", horizon=horizon, v_weight=100.0, beta=2.0, seed=0)
        tr = harness.run_episode(sc, cfg)
        regrets[horizon] = metrics.time_avg_regret(tr.slot_reward, res.reward_rate)
    cost_gap = 3.0 - 1.0
    assert regrets[10 ** 5] <= 0.1 * cost_gap, regrets
    assert regrets[10 ** 5] <= 0.5 * regrets[10 ** 4], regrets
    print(
        f"\nACCEPTANCE PASS [4] regret {regrets[10 ** 5]:.2e} <= 0.2 and "
        f"{regrets[10 ** 5] / regrets[10 ** 4]:.2f} of its 10^4 value"
    )


@pytest.mark.slow
def test_criterion_5_v_tradeoff_trend():
    """Backlog grows with the tradeoff weight, cost falls, and the bound holds."""
    sc = PAPER_LIKE
    horizon, runs = 10 ** 6, 5
    v_values = (1.0, 10.0, 100.0, 500.0, 1000.0)
    slack = metrics.stability_slack(
        sc.topology, sc.arrivals.mean_rates(), sc.services.switch_means, sc.services.controller_means
    )
    assert slack > 0
    b = metrics.drift_constant(
        sc.topology.switch_count, sc.topology.controller_count,
        sc.services.mu_max, sc.arrivals.lambda_max,
    )
    results = {v: _scenario_metrics(sc, "lasac", horizon, v, 2.0, runs) for v in v_values}
    backlogs = [results[v]["backlog"] for v in v_values]
    for lo, hi in zip(backlogs, backlogs[1:]):
        assert hi >= 0.98 * lo, (backlogs, "backlog must be non-decreasing in V (2% noise)")
    assert results[500.0]["cost"] <= 0.9 * results[1.0]["cost"], results
    for v in v_values:
        bound = metrics.backlog_bound(
            b, slack, v, sc.topology.switch_count,
            sc.arrivals.lambda_max, sc.costs.w_max, sc.costs.m_max,
        )
        assert results[v]["backlog"] <= bound, (v, results[v]["backlog"], bound)
    drop = 1.0 - results[500.0]["cost"] / results[1.0]["cost"]
    print(f"\nACCEPTANCE PASS [5] backlog monotone in V, cost drop {drop:.1%} >= 10%, bound holds")


@pytest.mark.slow
def test_criterion_6_baseline_ordering():
    """At V=100 mean cost orders GS <= learner < min(JSQ, Random) with a 10% gap."""
    sc = PAPER_LIKE
    horizon, runs = 10 ** 5, 20
    cost = {p: _scenario_metrics(sc, p, horizon, 100.0, 2.0, runs)["cost"]
            for p in ("gs", "lasac", "jsq", "random")}
    cheaper_baseline = min(cost["jsq"], cost["random"])
    assert cost["gs"] <= cost["lasac"], cost
    assert cost["lasac"] < cheaper_baseline, cost
    assert cost["lasac"] <= 0.9 * cheaper_baseline, cost
    gap = 1.0 - cost["lasac"] / cheaper_baseline
    print(f"\nACCEPTANCE PASS [6] ordering GS<=LASAC<min(JSQ,Random), gap {gap:.1%} >= 10%")


@pytest.mark.slow
def test_criterion_7_beta_behavior():
    """More exploration weight: cost up, cross-node backlog variance down; beta=0 comparable."""
    sc = PAPER_LIKE
    horizon, runs = 10 ** 5, 8
    res = {b: _scenario_metrics(sc, "lasac", horizon, 100.0, b, runs) for b in (0.0, 2.0, 100.0, 1000.0)}
    assert res[100.0]["cost"] >= 0.98 * res[2.0]["cost"], res
    assert res[1000.0]["cost"] >= 0.98 * res[100.0]["cost"], res
    assert res[100.0]["variance"] <= 1.02 * res[2.0]["variance"], res
    assert res[1000.0]["variance"] <= 1.02 * res[100.0]["variance"], res
    assert abs(res[0.0]["cost"] - res[2.0]["cost"]) <= 0.15 * res[2.0]["cost"], res
    print("\nACCEPTANCE PASS [7] cost non-decreasing and variance non-increasing in beta; beta=0 comparable")


def test_criterion_8_bound_calculators():
    """Closed-form evaluators match hand-derived values; divergence is reported."""
    assert metrics.drift_constant(2, 1, 3.0, 2.0) == pytest.approx(17.5, abs=1e-12)
    assert metrics.exploration_series(2.0, tol=1e-7) == pytest.approx(math.pi ** 2 / 6, abs=1e-6)
    assert metrics.exploration_series(2.0 * math.sqrt(2.0), tol=1e-7) == pytest.approx(
        math.pi ** 4 / 90, abs=1e-6
    )
    got = metrics.regret_bound(1.0, 1.0, 2.0, math.e, 1, 1, 1.0, 1.0)
    assert got == pytest.approx(9.008553861147927, abs=1e-6)
    b = metrics.drift_constant(10, 4, 12.0, 6.0)
    slope = (
        metrics.backlog_bound(b, 1.0, 1.0, 10, 6.0, 4.0, 3.0)
        - metrics.backlog_bound(b, 1.0, 0.0, 10, 6.0, 4.0, 3.0)
    )
    assert slope == pytest.approx(240.0, abs=1e-9)
    assert metrics.regret_bound(5.0, 2.0, 2.0, 1e18, 2, 2, 1.0, 1.0) == pytest.approx(2.5, abs=1e-6)
    for beta in (math.sqrt(2.0), 1.0, 0.5):
        with pytest.raises(metrics.SeriesDiverges):
            metrics.exploration_series(beta)
        with pytest.raises(metrics.SeriesDiverges):
            metrics.regret_bound(1.0, 1.0, beta, 100.0, 1, 1, 1.0, 1.0)
    print("\nACCEPTANCE PASS [8] bound calculators match hand values; divergence raised for beta <= sqrt(2)")


def _sweep_csv_without_wallclock(tmp_path, name, jobs):
    sc = random_enumerable(51)
    base = RunConfig(policy="lasac", horizon=2000, v_weight=1.0, seed=77)
    rows = harness.sweep(sc, base, "V", [1.0, 10.0], ["lasac", "jsq"], run_count=3, jobs=jobs)
    path = tmp_path / name
    harness.emit_results(rows, "csv", path)
    lines = path.read_text().strip().split("\n")
    # wallclock_s (the final column) is measurement, not simulation output
    return "\n".join(",".join(line.split(",")[:-1]) for line in lines).encode()


def test_criterion_9_byte_identical_sweeps(tmp_path):
    """Identical config and seed give byte-identical CSV data; parallelism is invisible."""
    a = _sweep_csv_without_wallclock(tmp_path, "a.csv", jobs=1)
    b = _sweep_csv_without_wallclock(tmp_path, "b.csv", jobs=1)
    c = _sweep_csv_without_wallclock(tmp_path, "c.csv", jobs=3)
    assert a == b
    assert a == c
    print("\nACCEPTANCE PASS [9] sweep CSV rows byte-identical across reruns and parallelism")
