"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run `pytest -s tests/test_acceptance.py` to see the per-criterion lines as
they complete. Episode-level criteria run at desk scale (R <= 64, U <= 128,
N <= 50).
"""
import filecmp
import math
from contextlib import contextmanager
from itertools import combinations

import numpy as np
import pytest

from crancache.cache import (SamplingPlan, estimate_popularity,
                             hoeffding_sample_size, select_cloud_cache,
                             select_rrh_cache)
from crancache.cli import main
from crancache.config import ExperimentConfig
from crancache.errors import InfeasibleLinkError
from crancache.esn import (ContentEsn, MobilityEsn, WeightDistribution,
                           empirical_memory_capacity, memory_capacity,
                           memory_capacity_bounds)
from crancache.qos import (HOP_COUNTS, PATH_CLOUD, PATH_REMOTE, PATH_SERVER,
                           WiredParams, delay_violation_prob,
                           effective_capacity_from_samples, map_qos_exponents)
from crancache.seeding import rng_for
from crancache.sim import (POLICY_ORACLE, POLICY_PROPOSED,
                           POLICY_RANDOM_CLUSTERED, POLICY_RANDOM_UNCLUSTERED,
                           run_episode)


@contextmanager
def criterion(number, name):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {number:2d} FAIL: {name}")
        raise
    print(f"ACCEPTANCE {number:2d} PASS: {name}")


def desk_config(**overrides):
    base = dict(N=24, R=12, U=16, C_c=6, C_r=3, T=120, T_tau=30, N_w=48,
                n_mc=48, archetypes=4, zipf_alpha=1.0, v_B=6e8, v_F=1.2e9)
    base.update(overrides)
    return ExperimentConfig.default(**base)


def tiny_config(**overrides):
    base = dict(N=6, R=3, U=4, C_c=2, C_r=1, T=60, T_tau=30, N_w=16,
                n_mc=24, archetypes=2, v_B=6e8, v_F=1.2e9)
    base.update(overrides)
    return ExperimentConfig.default(**base)


def test_criterion_01_memory_capacity_closed_forms():
    with criterion(1, "memory-capacity closed forms to 1e-10"):
        for a in np.arange(0.1, 0.95, 0.1):
            for W in range(1, 21):
                pm = memory_capacity(WeightDistribution("pointmass", a=a), W)
                assert abs(pm - (W - 1 + a ** (2 * W))) < 1e-10
                sb = memory_capacity(WeightDistribution("symbinary", a=a), W)
                assert abs(sb - (W // 2 + a ** (2 * W))) < 1e-10


def test_criterion_02_bound_containment():
    with criterion(2, "Prop.-3 bound containment on 200 random specs"):
        rng = np.random.default_rng(202)
        for _ in range(200):
            kind = rng.choice(["pointmass", "symbinary", "zmu", "posu"])
            if kind == "pointmass":
                spec = WeightDistribution("pointmass", a=float(rng.uniform(0.05, 0.95)))
            elif kind == "symbinary":
                spec = WeightDistribution("symbinary", a=float(rng.uniform(0.05, 0.95)))
            elif kind == "zmu":
                b = float(rng.uniform(0.1, 0.95))
                spec = WeightDistribution("uniform", lo=-b, hi=b)
            else:
                lo = float(rng.uniform(0.05, 0.5))
                spec = WeightDistribution("uniform", lo=lo,
                                          hi=float(rng.uniform(lo + 0.05, 0.95)))
            W = int(rng.integers(1, 21))
            value = memory_capacity(spec, W)
            lo_b, hi_b = memory_capacity_bounds(spec, W)
            assert lo_b <= value < hi_b, (spec, W, value)


def test_criterion_03_empirical_memory_capacity():
    with criterion(3, "empirical capacity within 0.15 of analytic (pointmass 0.8, W=5)"):
        spec = WeightDistribution("pointmass", a=0.8)
        analytic = memory_capacity(spec, 5)
        for seed in range(3):
            esn = MobilityEsn(5, spec, 4, seed=rng_for(seed, "memcap", 5))
            measured = empirical_memory_capacity(esn, 5, 20000,
                                                 rng_for(seed, "memcap", 5, 1))
            assert abs(measured - analytic) <= 0.15, (seed, measured, analytic)


def test_criterion_04_hoeffding_size_and_coverage():
    with criterion(4, "Hoeffding size 600 at (0.05, 0.05); coverage <= delta+0.02"):
        assert hoeffding_sample_size(0.05, 0.05) == 600
        plan = SamplingPlan(epsilon=0.05, delta=0.05)
        rng = np.random.default_rng(404)
        population = (rng.random(4000) < 0.35).astype(float)[:, None]
        weights = np.ones(population.shape[0])
        truth = population.mean()
        failures = 0
        for t in range(1000):
            est = estimate_popularity(population, weights, plan, seed=9000 + t)
            failures += abs(est[0] - truth) > plan.epsilon
        assert failures / 1000 <= plan.delta + 0.02, failures


def test_criterion_05_prop1_consistency():
    with criterion(5, "Prop.-1 exponents equalize delay-violation probs to 1e-9"):
        rng = np.random.default_rng(505)
        for _ in range(100):
            theta_O = float(rng.uniform(0.01, 0.5))
            L = float(rng.uniform(1e6, 2e7))
            D = float(rng.uniform(0.5, 3.0))
            v_BU = float(rng.uniform(2.5 * L / D, 25 * L / D))
            v_FU = float(rng.uniform(2.5 * L / D, 25 * L / D))
            wired = WiredParams(content_size=L, delay_bound=D)
            link = map_qos_exponents(theta_O, wired, v_BU, v_FU)
            reference = math.exp(-theta_O * D)  # local path, no wired hop
            probs = (
                delay_violation_prob(link.theta_S, D, HOP_COUNTS[PATH_SERVER], v_BU, L),
                delay_violation_prob(link.theta_A, D, HOP_COUNTS[PATH_CLOUD], v_FU, L),
                delay_violation_prob(link.theta_G, D, HOP_COUNTS[PATH_REMOTE], v_FU, L),
            )
            for p in probs:
                assert abs(p - reference) < 1e-9


def test_criterion_06_effective_capacity_properties():
    with criterion(6, "effective capacity: monotone, theta->0 limit, two-point form"):
        rng = np.random.default_rng(606)
        samples = rng.exponential(4.0, 3000)
        thetas = np.linspace(1e-3, 6.0, 40)
        values = [effective_capacity_from_samples(t, samples) for t in thetas]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        # theta -> 0 limit equals the mean within 3 MC standard errors
        se = samples.std() / math.sqrt(samples.size)
        assert abs(effective_capacity_from_samples(1e-9, samples)
                   - samples.mean()) <= 3 * se
        # two-point closed form
        c, theta, n = 5.0, 0.7, 50000
        draws = rng.choice([0.0, c], size=n)
        closed = -math.log2(0.5 * (1 + 2 ** (-theta * c))) / theta
        mgf = 2.0 ** (-theta * draws)
        slack = 3 * (mgf.std() / math.sqrt(n)) / (mgf.mean() * math.log(2) * theta)
        assert abs(effective_capacity_from_samples(theta, draws) - closed) <= slack


def _exhaustive(scores, k):
    best_val, best = -np.inf, None
    for combo in combinations(range(len(scores)), k):
        val = sum(scores[i] for i in combo)
        if val > best_val:
            best_val, best = val, frozenset(c + 1 for c in combo)
    return best, best_val


def test_criterion_07_topk_equals_exhaustive():
    with criterion(7, "greedy selections equal exhaustive maxima on 500 instances"):
        rng = np.random.default_rng(707)
        for _ in range(500):
            n = int(rng.integers(2, 13))
            k = int(rng.integers(1, n + 1))
            n_users = int(rng.integers(1, 4))
            dists = rng.dirichlet(np.ones(n), size=n_users)
            wts = rng.uniform(0.1, 3.0, n_users)
            picked = select_rrh_cache(list(dists), list(wts), k, n)
            scores = (dists * wts[:, None]).sum(axis=0) / n_users
            best, best_val = _exhaustive(scores, k)
            assert picked == best
            pop = rng.uniform(0, 1, n)
            cloud = select_cloud_cache(pop, k)
            best_c, _ = _exhaustive(pop, k)
            assert cloud == best_c


def test_criterion_08_theorem2_equality():
    with criterion(8, "Proposed with oracle predictions equals exhaustive oracle (50 seeds)"):
        for seed in range(50):
            cfg = tiny_config()
            proposed = run_episode(cfg, POLICY_PROPOSED, seed,
                                   oracle_predictions=True)
            oracle = run_episode(cfg, POLICY_ORACLE, seed)
            assert abs(proposed.effective_capacity_avg
                       - oracle.effective_capacity_avg) <= 1e-9, seed


def _sign_test_p(wins, n):
    """One-sided exact binomial tail P(X >= wins | p = 1/2)."""
    return sum(math.comb(n, k) for k in range(wins, n + 1)) / 2.0 ** n


def test_criterion_09_comparative_gains_and_trends():
    with criterion(9, "Proposed beats random baselines (sign test) and sweep trends"):
        n_seeds = 20
        proposed, rand_c, rand_u = [], [], []
        for seed in range(n_seeds):
            cfg = desk_config()
            proposed.append(run_episode(cfg, POLICY_PROPOSED, seed).effective_capacity_avg)
            rand_c.append(run_episode(cfg, POLICY_RANDOM_CLUSTERED, seed).effective_capacity_avg)
            rand_u.append(run_episode(cfg, POLICY_RANDOM_UNCLUSTERED, seed).effective_capacity_avg)
        assert np.mean(proposed) > np.mean(rand_c)
        assert np.mean(proposed) > np.mean(rand_u)
        wins_c = sum(p > c for p, c in zip(proposed, rand_c))
        wins_u = sum(p > u for p, u in zip(proposed, rand_u))
        assert _sign_test_p(wins_c, n_seeds) < 0.05, wins_c
        assert _sign_test_p(wins_u, n_seeds) < 0.05, wins_u

        cache_axis = {6: list(proposed)}
        for value in (1, 3):
            cache_axis[value] = [
                run_episode(desk_config(C_c=value), POLICY_PROPOSED, s).effective_capacity_avg
                for s in range(n_seeds)]
        means = [np.mean(cache_axis[v]) for v in (1, 3, 6)]
        assert means[0] <= means[1] <= means[2], ("C_c", means)

        rrh_axis = {12: list(proposed)}
        for value in (6, 18):
            rrh_axis[value] = [
                run_episode(desk_config(R=value), POLICY_PROPOSED, s).effective_capacity_avg
                for s in range(n_seeds)]
        means = [np.mean(rrh_axis[v]) for v in (6, 12, 18)]
        assert means[0] <= means[1] <= means[2], ("R", means)

        user_axis = {16: list(proposed)}
        for value in (8, 24):
            user_axis[value] = [
                run_episode(desk_config(U=value), POLICY_PROPOSED, s).effective_capacity_avg
                for s in range(n_seeds)]
        means = [np.mean(user_axis[v]) for v in (8, 16, 24)]
        assert means[0] <= means[1] <= means[2], ("U", means)


def test_criterion_10_training_error_decays():
    with criterion(10, "content-ESN error over iters 40-50 below iters 1-10"):
        for lr in (0.001, 0.01, 0.03):
            for seed in range(3):
                esn = ContentEsn(n_contents=10, n_reservoir=50,
                                 learning_rate=lr, seed=seed)
                rng = np.random.default_rng(1000 + seed)
                x = rng.uniform(0, 1, 7)
                target = rng.dirichlet(np.ones(10))
                errs = []
                for _ in range(50):
                    esn.state_update(x)
                    errs.append(esn.train_step(x, target))
                assert np.mean(errs[39:50]) < np.mean(errs[0:10]), (lr, seed)


TINY_OVERRIDES = ["N=6", "R=3", "U=4", "C_c=2", "C_r=1", "T=30", "T_tau=30",
                  "N_w=16", "n_mc=16", "archetypes=2", "v_B=6e8", "v_F=1.2e9"]


def _run_cli(out_dir, extra):
    args = ["--out-dir", str(out_dir), "--seed", "11"]
    for item in TINY_OVERRIDES:
        args += ["--override", item]
    assert main(args + extra) == 0


def test_criterion_11_determinism_across_subcommands(tmp_path, capsys):
    with criterion(11, "byte-identical outputs across all subcommands"):
        pairs = []
        for tag in ("x", "y"):
            sim_dir = tmp_path / f"sim_{tag}"
            _run_cli(sim_dir, ["simulate"])
            sweep_dir = tmp_path / f"sweep_{tag}"
            _run_cli(sweep_dir, ["sweep", "--axis", "C_c", "--values", "1", "2",
                                 "--reps", "2"])
            eps_dir = tmp_path / f"eps_{tag}"
            _run_cli(eps_dir, ["sweep", "--axis", "epsilon",
                               "--values", "0.05", "0.1", "--reps", "1"])
            mem_dir = tmp_path / f"mem_{tag}"
            _run_cli(mem_dir, ["memcap", "--dist", "pointmass", "--a", "0.8",
                               "--W-range", "2:4", "--trace-len", "4000"])
            gen_dir = tmp_path / f"gen_{tag}"
            _run_cli(gen_dir, ["gen-data"])
            assert main(["sample-size", "0.05", "0.05"]) == 0
            stdout = capsys.readouterr().out
            path_free = [ln for ln in stdout.splitlines() if "/" not in ln]
            pairs.append((sim_dir, sweep_dir, eps_dir, mem_dir, gen_dir,
                          path_free))
        first, second = pairs
        assert first[5] == second[5]  # path-free stdout, incl. sample-size
        for dir_a, dir_b in zip(first[:5], second[:5]):
            names = sorted(p.name for p in dir_a.iterdir())
            assert names == sorted(p.name for p in dir_b.iterdir())
            match, mismatch, errors = filecmp.cmpfiles(dir_a, dir_b, names,
                                                       shallow=False)
            assert not mismatch and not errors, (mismatch, errors)
