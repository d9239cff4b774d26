"""World stepping, path resolution, slot accounting, and policy behavior."""
import numpy as np
import pytest

from crancache.cache import CacheState
from crancache.config import ExperimentConfig
from crancache.data import MobilitySchedule
from crancache.errors import InstanceTooLargeError
from crancache.qos import PATH_CLOUD, PATH_LOCAL, PATH_REMOTE, PATH_SERVER
from crancache.sim import (POLICY_ORACLE, POLICY_PROPOSED,
                           POLICY_RANDOM_CLUSTERED, POLICY_RANDOM_UNCLUSTERED,
                           Simulation, check_oracle_guard, enumerate_best_subset,
                           nearest_rrh, oracle_search_space,
                           resolve_delivery_path, run_episode)


def tiny_config(**overrides):
    base = dict(N=6, R=3, U=4, C_c=2, C_r=1, T=60, T_tau=30, N_w=24,
                n_mc=24, archetypes=2, v_B=6e8, v_F=1.2e9)
    base.update(overrides)
    return ExperimentConfig.default(**base)


# ---- mobility stepping ------------------------------------------------------

def test_zero_speed_position_unchanged():
    sched = MobilitySchedule(waypoints=np.array([[10.0, 20.0], [50.0, 60.0]]),
                             dwell_slots=np.array([0, 0]), speed=0.0)
    pos = sched.positions(5)
    assert np.allclose(pos, [10.0, 20.0])


def test_unit_vector_advance():
    sched = MobilitySchedule(waypoints=np.array([[0.0, 0.0], [30.0, 40.0]]),
                             dwell_slots=np.array([0, 0]), speed=5.0)
    pos = sched.positions(1)
    np.testing.assert_allclose(pos[0], [3.0, 4.0])


def test_waypoint_cycle_periodicity():
    sched = MobilitySchedule(waypoints=np.array([[0.0, 0.0], [100.0, 0.0],
                                                 [0.0, 80.0]]),
                             dwell_slots=np.array([1, 0, 2]), speed=30.0)
    p = sched.period()
    pos = sched.positions(4 * p)
    np.testing.assert_allclose(pos[:p], pos[p:2 * p])
    np.testing.assert_allclose(pos[:p], pos[3 * p:4 * p])


def test_nearest_rrh_resolution():
    rrhs = np.array([[0.0, 0.0], [100.0, 0.0]])
    assert nearest_rrh(np.array([[10.0, 0.0]]), rrhs)[0] == 0
    assert nearest_rrh(np.array([[90.0, 0.0]]), rrhs)[0] == 1


# ---- delivery-path table ----------------------------------------------------

def _state(cloud=(), local=(), remote=()):
    return CacheState(cloud_capacity=6, rrh_capacity=3, n_contents=6,
                      cloud=frozenset(cloud),
                      rrh={0: frozenset(local), 1: frozenset(remote)})


def test_path_priority_local_beats_cloud():
    st = _state(cloud=[3], local=[3])
    assert resolve_delivery_path(3, 0, st) == PATH_LOCAL


def test_path_uncached_goes_to_server():
    assert resolve_delivery_path(5, 0, _state()) == PATH_SERVER


def test_path_remote_only():
    st = _state(remote=[4])
    assert resolve_delivery_path(4, 0, st) == PATH_REMOTE


def test_path_table_enumeration():
    for in_local in (False, True):
        for in_cloud in (False, True):
            for in_remote in (False, True):
                st = _state(cloud=[2] if in_cloud else [],
                            local=[2] if in_local else [],
                            remote=[2] if in_remote else [])
                path = resolve_delivery_path(2, 0, st)
                if in_local:
                    assert path == PATH_LOCAL
                elif in_cloud:
                    assert path == PATH_CLOUD
                elif in_remote:
                    assert path == PATH_REMOTE
                else:
                    assert path == PATH_SERVER


# ---- slot accounting --------------------------------------------------------

def test_slot_accounting_no_caches_all_server():
    sim = Simulation(tiny_config(C_c=1, C_r=1), POLICY_PROPOSED, seed=2)
    sim.caches.rrh = {}
    sim.caches.cloud = frozenset()
    # peek at one slot without letting the policy place anything
    sim._update_rrh_caches = lambda *a, **k: None
    metrics = sim.run_slot(1)
    assert metrics.miss_server == 1.0
    assert metrics.n_backhaul == sim.cfg["U"]
    assert metrics.n_fronthaul == sim.cfg["U"]


def test_slot_accounting_fronthaul_counts_non_local_paths():
    cfg = tiny_config()
    for seed in range(3):
        report = run_episode(cfg, POLICY_PROPOSED, seed)
        for m in report.slots:
            u = cfg["U"]
            assert m.n_backhaul == round(m.miss_server * u)
            assert m.n_fronthaul == round((m.miss_server + m.hit_cloud
                                           + m.hit_remote) * u)
            assert m.hit_local + m.hit_cloud + m.hit_remote + m.miss_server == pytest.approx(1.0)


def test_all_local_hits_zero_wired_load():
    # single content catalog makes every cache hold the only content
    cfg = tiny_config(N=2, C_r=2, C_c=2, T=30, T_tau=30)
    report = run_episode(cfg, POLICY_PROPOSED, seed=1)
    late = report.slots[5:]
    assert all(m.n_backhaul == 0 for m in late)
    assert all(m.hit_local == 1.0 for m in late)


def test_run_is_deterministic():
    cfg = tiny_config()
    a = run_episode(cfg, POLICY_PROPOSED, seed=7)
    b = run_episode(cfg, POLICY_PROPOSED, seed=7)
    assert a.slot_csv() == b.slot_csv()
    assert a.summary_text() == b.summary_text()
    assert a.cloud_trace == b.cloud_trace
    c = run_episode(cfg, POLICY_PROPOSED, seed=8)
    assert a.slot_csv() != c.slot_csv()


# ---- policies ---------------------------------------------------------------

def test_random_unclustered_uses_singleton_cooperation():
    sim = Simulation(tiny_config(), POLICY_RANDOM_UNCLUSTERED, seed=1)
    sim.run_slot(1)
    assert sim.cluster_set is None
    assert sim._cooperating(2) == {2}
    for cached in sim.caches.rrh.values():
        assert len(cached) == sim.cfg["C_r"]


def test_random_clustered_runs_cluster_procedure():
    sim = Simulation(tiny_config(), POLICY_RANDOM_CLUSTERED, seed=1)
    sim.run_slot(1)
    assert sim.cluster_set is not None
    assert sim.cluster_set.coverage() == set(range(sim.cfg["R"]))


def test_cache_invariants_hold_through_episode():
    cfg = tiny_config(T=30, T_tau=30)
    sim = Simulation(cfg, POLICY_PROPOSED, seed=4)
    for k in range(1, 31):
        sim.run_slot(k)
        sim.caches.validate()
        assert len(sim.caches.cloud) <= cfg["C_c"]
        for cached in sim.caches.rrh.values():
            assert len(cached) <= cfg["C_r"]


def test_theorem2_equality_on_tiny_instances():
    for seed in range(3):
        cfg = tiny_config()
        proposed = run_episode(cfg, POLICY_PROPOSED, seed, oracle_predictions=True)
        oracle = run_episode(cfg, POLICY_ORACLE, seed)
        assert abs(proposed.effective_capacity_avg
                   - oracle.effective_capacity_avg) <= 1e-9


def test_oracle_dominates_other_policies():
    # The oracle maximizes the expected per-slot objective; scored on sampled
    # requests, a converged competitor can edge it by realization noise, so
    # per-seed dominance carries a 0.1% tolerance and the means are strict.
    by_policy = {p: [] for p in (POLICY_PROPOSED, POLICY_RANDOM_CLUSTERED,
                                 POLICY_RANDOM_UNCLUSTERED)}
    oracle_vals = []
    for seed in range(5):
        cfg = tiny_config()
        oracle = run_episode(cfg, POLICY_ORACLE, seed).effective_capacity_avg
        oracle_vals.append(oracle)
        for policy in by_policy:
            other = run_episode(cfg, policy, seed).effective_capacity_avg
            by_policy[policy].append(other)
            assert oracle >= other * (1 - 1e-3), (seed, policy)
    for policy, vals in by_policy.items():
        assert np.mean(oracle_vals) >= np.mean(vals) - 1e-9, policy


def test_oracle_caches_modal_content_single_user():
    cfg = tiny_config(U=1, R=1, C_r=1, C_c=1, T=30, T_tau=30)
    sim = Simulation(cfg, POLICY_ORACLE, seed=3)
    sim.run_slot(1)
    dist = sim.workload.distribution(0, 1)
    assert sim.caches.rrh[0] == frozenset([int(np.argmax(dist)) + 1])


def test_full_rrh_capacity_caches_everything():
    cfg = tiny_config(N=4, C_r=4, C_c=2, T=30, T_tau=30)
    report = run_episode(cfg, POLICY_ORACLE, seed=1)
    assert all(m.hit_local == 1.0 for m in report.slots[2:])


def test_oracle_guard_blocks_large_instances():
    assert oracle_search_space(6, 2, 1, 3) == pytest.approx(np.log10(15 * 6 ** 3))
    check_oracle_guard(6, 2, 1, 3)
    with pytest.raises(InstanceTooLargeError):
        check_oracle_guard(50, 6, 3, 16)
    with pytest.raises(InstanceTooLargeError):
        Simulation(ExperimentConfig.default(), POLICY_ORACLE, seed=0)


def test_enumerate_best_subset_tie_breaks_low_ids():
    assert enumerate_best_subset(np.array([0.5, 0.5, 0.5]), 2) == frozenset([1, 2])
    assert enumerate_best_subset(np.array([0.1, 0.9, 0.2]), 1) == frozenset([2])


def test_proposed_beats_random_in_expectation():
    gaps_pc, gaps_cu = [], []
    cfg = ExperimentConfig.default(N=24, R=10, U=12, C_c=6, C_r=3, T=60,
                                   T_tau=30, N_w=32, n_mc=32, archetypes=4,
                                   v_B=6e8, v_F=1.2e9)
    for seed in range(5):
        p = run_episode(cfg, POLICY_PROPOSED, seed).effective_capacity_avg
        c = run_episode(cfg, POLICY_RANDOM_CLUSTERED, seed).effective_capacity_avg
        u = run_episode(cfg, POLICY_RANDOM_UNCLUSTERED, seed).effective_capacity_avg
        gaps_pc.append(p - c)
        gaps_cu.append(c - u)
    assert np.mean(gaps_pc) > 0
    assert np.mean(gaps_cu) > 0
