"""Slot-by-slot episode execution for the caching policies.

Per slot: advance mobility, refresh per-user predictions, update RRH caches
and clusters, realize one request per user, resolve delivery paths, split the
wired pipes over the realized load, and score per-user effective capacities.
Every cloud-update period: retrain the mobility readouts, estimate the
fronthaul-demand popularity from a bounded sample, and refresh the cloud
cache.

Policies: "proposed" (prediction-driven greedy selections), two random
baselines (with/without clustering), and "optimal_oracle" (per-decision
exhaustive subset search fed with ground-truth knowledge, gated by instance
size). All request and channel randomness derives from (seed, purpose, slot,
user) so different policies replay identical realizations.

Effective capacities are scored with slot service measured in Mbit so the
default exponent theta = 0.05 sits in the discriminating regime of the
log-MGF (see qos module notes); reported sums are in Mbit per slot.
"""
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..cache import (CacheState, SamplingPlan, cluster_rrhs, estimate_popularity,
                     select_cloud_cache, select_rrh_cache, update_distribution)
from ..config import ExperimentConfig
from ..data import generate_mobility, generate_workload
from ..errors import ConfigurationError, InstanceTooLargeError
from ..esn import ContentEsn, LocationGrid, MobilityEsn
from ..qos import (PATH_CLOUD, PATH_LOCAL, PATH_REMOTE, PATH_SERVER, RadioParams,
                   WiredParams, effective_capacity_from_samples,
                   map_qos_exponents_lenient, per_content_rate,
                   segment_capacity_samples, sum_effective_capacity)
from ..seeding import rng_for
from .world import build_topology, nearest_rrh, resolve_delivery_path

POLICY_PROPOSED = "proposed"
POLICY_RANDOM_CLUSTERED = "random_clustered"
POLICY_RANDOM_UNCLUSTERED = "random_unclustered"
POLICY_ORACLE = "optimal_oracle"

ORACLE_SEARCH_LIMIT = 10 ** 6
CAPACITY_UNIT = 1e-6  # slot service scored in Mbit


@dataclass
class SlotMetrics:
    slot: int
    effective_sum: float
    hit_local: float
    hit_cloud: float
    hit_remote: float
    miss_server: float
    n_backhaul: int
    n_fronthaul: int
    infeasible: int


@dataclass
class EpisodeReport:
    policy: str
    seed: int
    effective_capacity_avg: float
    slots: list
    cloud_trace: list            # (slot, sorted content ids) at each refresh
    final_rrh_caches: dict

    def slot_csv(self):
        lines = ["k,E_k,hit_O,hit_A,hit_G,miss_S,N_B,N_F"]
        for m in self.slots:
            lines.append(
                f"{m.slot},{m.effective_sum:.10g},{m.hit_local:.6g},{m.hit_cloud:.6g},"
                f"{m.hit_remote:.6g},{m.miss_server:.6g},{m.n_backhaul},{m.n_fronthaul}"
            )
        return "\n".join(lines) + "\n"

    def summary_text(self):
        n = max(len(self.slots), 1)
        lines = [
            f"policy = {self.policy}",
            f"seed = {self.seed}",
            f"E_bar = {self.effective_capacity_avg:.10g}",
            f"slots = {len(self.slots)}",
            f"hit_O = {sum(m.hit_local for m in self.slots) / n:.6g}",
            f"hit_A = {sum(m.hit_cloud for m in self.slots) / n:.6g}",
            f"hit_G = {sum(m.hit_remote for m in self.slots) / n:.6g}",
            f"miss_S = {sum(m.miss_server for m in self.slots) / n:.6g}",
            f"infeasible = {sum(m.infeasible for m in self.slots)}",
        ]
        return "\n".join(lines) + "\n"


def oracle_search_space(n_contents, cloud_slots, rrh_slots, n_rrhs):
    """log10 of the joint subset space C(N,C_c) * C(N,C_r)^R."""
    return (math.log10(math.comb(n_contents, cloud_slots))
            + n_rrhs * math.log10(math.comb(n_contents, rrh_slots)))


def check_oracle_guard(n_contents, cloud_slots, rrh_slots, n_rrhs):
    log_space = oracle_search_space(n_contents, cloud_slots, rrh_slots, n_rrhs)
    if log_space > math.log10(ORACLE_SEARCH_LIMIT):
        raise InstanceTooLargeError(
            f"oracle search space ~1e{log_space:.0f} exceeds {ORACLE_SEARCH_LIMIT}"
        )


def enumerate_best_subset(scores, k):
    """Exhaustive argmax of sum(scores) over k-subsets; first max wins.

    combinations() yields subsets in lexicographic order, so ties resolve to
    the lowest content ids, matching the greedy selections.
    """
    n = len(scores)
    best_val, best = -math.inf, frozenset()
    for combo in combinations(range(n), k):
        val = sum(scores[i] for i in combo)
        if val > best_val:
            best_val, best = val, frozenset(c + 1 for c in combo)
    return best


class _MobilityTracker:
    """Collects sampled location codes and completed training pairs per user."""

    def __init__(self, esn, grid, horizon):
        self.esn = esn
        self.grid = grid
        self.horizon = horizon
        self.codes = []
        self.states = []
        self.latest_prediction = None

    def observe(self, position):
        code = self.grid.encode(position[0], position[1])
        self.codes.append(float(code))
        self.states.append(self.esn.state_update(code).copy())
        if self.esn.output_weights.any():
            self.latest_prediction = self.esn.predict()

    def training_window(self, max_pairs):
        n_complete = len(self.codes) - self.horizon
        if n_complete < 1:
            return None
        lo = max(0, n_complete - max_pairs)
        states = np.stack(self.states[lo:n_complete], axis=1)
        targets = np.stack(
            [self.codes[j + 1: j + 1 + self.horizon] for j in range(lo, n_complete)],
            axis=1,
        )
        return states, targets

    def predicted_position(self):
        if self.latest_prediction is None:
            return None
        return self.grid.decode(self.latest_prediction[0])


class Simulation:
    """One seeded episode of one policy over T slots."""

    def __init__(self, config: ExperimentConfig, policy, seed,
                 oracle_predictions=False):
        if policy not in (POLICY_PROPOSED, POLICY_RANDOM_CLUSTERED,
                          POLICY_RANDOM_UNCLUSTERED, POLICY_ORACLE):
            raise ConfigurationError(f"unknown policy {policy!r}")
        if config["K"] != 7:
            raise ConfigurationError("the context schema is fixed at K = 7 features")
        self.cfg = config
        self.policy = policy
        self.seed = int(seed)
        self.oracle_like = policy == POLICY_ORACLE or oracle_predictions
        if policy == POLICY_ORACLE:
            check_oracle_guard(config["N"], config["C_c"], config["C_r"], config["R"])

        self.radio = RadioParams(tx_power_dbm=config["P"],
                                 pathloss_exponent=config["beta"],
                                 noise_dbm=config["sigma2"],
                                 bandwidth_hz=config["B"],
                                 cell_radius_m=config["r"])
        self.wired = WiredParams(backhaul_rate=config["v_B"],
                                 fronthaul_rate=config["v_F"],
                                 content_size=config["L"],
                                 delay_bound=config["D_max"])
        self.theta_O = config["theta_s_O"]
        self.n_mc = config["n_mc"]
        self.plan = SamplingPlan(epsilon=config["epsilon"], delta=config["delta"])

        self.workload = generate_workload(config["U"], config["N"],
                                          config["zipf_alpha"],
                                          config["archetypes"], self.seed)
        schedules = generate_mobility(config["U"], config["r"],
                                      config["waypoints"], config["S"], self.seed)
        self.topology = build_topology(config["R"], schedules, config["T"],
                                       config["r"], self.seed)
        self.grid = LocationGrid(config["r"])

        self.content_esns = None
        if not self.oracle_like:
            self.content_esns = [
                ContentEsn(n_contents=config["N"], n_features=config["K"],
                           n_reservoir=config["N_w"],
                           learning_rate=config["lambda_alpha"],
                           seed=rng_for(self.seed, "content_esn", u))
                for u in range(config["U"])
            ]
        spec = config.weight_spec()
        self.mobility = [
            _MobilityTracker(
                MobilityEsn(config["W"], spec, config["N_s"],
                            ridge_lambda=config["lambda"],
                            seed=rng_for(self.seed, "mobility_esn", u)),
                self.grid, config["N_s"])
            for u in range(config["U"])
        ]

        self.caches = CacheState(cloud_capacity=config["C_c"],
                                 rrh_capacity=config["C_r"],
                                 n_contents=config["N"])
        self.cluster_set = None  # slot 1 runs with singleton cooperation
        self.prev_link = None    # previous slot's mapped exponents
        self.demand_stream = []  # (slot, demand vector, weight) since last refresh
        self.cloud_trace = []

    # ----- per-slot pieces -------------------------------------------------

    def _cooperating(self, serving):
        if self.policy == POLICY_RANDOM_UNCLUSTERED or self.cluster_set is None:
            return {serving}
        return self.cluster_set.cooperating_set(serving)

    def _capacity_samples(self, slot, user, serving, active_rrhs):
        # idle RRHs transmit nothing: interference comes from RRHs that are
        # actively serving users and sit outside the cooperating set
        start, end = self.topology.segment(slot, user)
        coop = self._cooperating(serving)
        interferers = [i for i in sorted(active_rrhs) if i not in coop]
        rng = rng_for(self.seed, "channel", slot, user)
        return segment_capacity_samples(
            start, end, self.topology.rrh_positions[serving],
            self.topology.rrh_positions[interferers], self.radio,
            self.n_mc, rng, unit_scale=CAPACITY_UNIT)

    def _predictions(self, slot):
        """Per-user request-distribution predictions (BBU view)."""
        if self.oracle_like:
            return [self.workload.distribution(u, slot)
                    for u in range(self.cfg["U"])]
        preds = []
        for u, esn in enumerate(self.content_esns):
            x = self.workload.context(u, slot)
            esn.state_update(x)
            preds.append(esn.predict(x))
        return preds

    def _assoc_for_caching(self, slot, serving):
        """Predicted serving RRH per user at the cache-decision instant."""
        if self.oracle_like:
            return serving.copy()
        assoc = serving.copy()
        for u, tracker in enumerate(self.mobility):
            pos = tracker.predicted_position()
            if pos is not None:
                assoc[u] = int(nearest_rrh(np.asarray([pos]),
                                           self.topology.rrh_positions)[0])
        return assoc

    def _update_rrh_caches(self, slot, assoc, predictions, weights):
        cfg = self.cfg
        new = {}
        if self.policy in (POLICY_RANDOM_CLUSTERED, POLICY_RANDOM_UNCLUSTERED):
            for r in range(cfg["R"]):
                rng = rng_for(self.seed, "random_cache", slot, r + 1)
                picks = rng.choice(cfg["N"], size=cfg["C_r"], replace=False)
                new[r] = frozenset(int(c) + 1 for c in picks)
        else:
            by_rrh = {}
            for u in range(cfg["U"]):
                by_rrh.setdefault(assoc[u], []).append(u)
            for r, users in by_rrh.items():
                dists = [predictions[u] for u in users]
                wts = [weights[u] for u in users]
                if self.policy == POLICY_ORACLE:
                    scores = (np.stack(dists) * np.asarray(wts)[:, None]).sum(axis=0) / len(users)
                    new[r] = enumerate_best_subset(scores, cfg["C_r"])
                else:
                    new[r] = select_rrh_cache(dists, wts, cfg["C_r"], cfg["N"])
        self.caches.rrh = new
        self.caches.validate()

    def _update_clusters(self, assoc, predictions):
        if self.policy == POLICY_RANDOM_UNCLUSTERED:
            self.cluster_set = None
            return
        grouped = {r: [] for r in range(self.cfg["R"])}
        for u in range(self.cfg["U"]):
            grouped[assoc[u]].append(predictions[u])
        self.cluster_set = cluster_rrhs(grouped, self.cfg["chi"])

    def _realize_requests(self, slot):
        rng = rng_for(self.seed, "requests", slot)
        uniforms = rng.random(self.cfg["U"])
        requests = []
        for u in range(self.cfg["U"]):
            cdf = np.cumsum(self.workload.distribution(u, slot))
            requests.append(int(np.searchsorted(cdf, uniforms[u], side="right")) + 1)
        return requests

    def _refresh_cloud(self, slot):
        if not self.demand_stream:
            return
        slots = np.array([s for s, _, _ in self.demand_stream])
        dists = np.stack([d for _, d, _ in self.demand_stream])
        weights = np.array([w for _, _, w in self.demand_stream])
        window = slot // self.cfg["T_tau"]
        if self.policy == POLICY_ORACLE:
            popularity = (dists * weights[:, None]).mean(axis=0)
            cloud = enumerate_best_subset(popularity, self.cfg["C_c"])
        elif self.policy in (POLICY_RANDOM_CLUSTERED, POLICY_RANDOM_UNCLUSTERED):
            rng = rng_for(self.seed, "random_cache", slot, 0)
            picks = rng.choice(self.cfg["N"], size=self.cfg["C_c"], replace=False)
            cloud = frozenset(int(c) + 1 for c in picks)
        else:
            rng = rng_for(self.seed, "sampling", window)
            popularity = estimate_popularity(dists, weights, self.plan, rng,
                                             strata=slots)
            cloud = select_cloud_cache(popularity, self.cfg["C_c"])
        self.caches.cloud = cloud
        self.caches.validate()
        self.cloud_trace.append((slot, tuple(sorted(cloud))))
        self.demand_stream = []

    def _retrain_mobility(self):
        for tracker in self.mobility:
            window = tracker.training_window(self.cfg["N_tr"])
            if window is not None:
                tracker.esn.train(*window)

    # ----- main loop -------------------------------------------------------

    def run_slot(self, slot):
        cfg = self.cfg
        U = cfg["U"]
        positions = self.topology.user_tracks[slot - 1]
        serving = nearest_rrh(positions, self.topology.rrh_positions)

        if (slot - 1) % cfg["H"] == 0:
            for u, tracker in enumerate(self.mobility):
                tracker.observe(positions[u])

        samples = [self._capacity_samples(slot, u, serving[u]) for u in range(U)]
        predictions = self._predictions(slot)
        weights_O = np.array([
            effective_capacity_from_samples(self.theta_O, samples[u])
            for u in range(U)
        ])

        assoc = self._assoc_for_caching(slot, serving)
        self._update_rrh_caches(slot, assoc, predictions, weights_O)
        self._update_clusters(assoc, predictions)

        requests = self._realize_requests(slot)
        paths = [resolve_delivery_path(requests[u], int(serving[u]), self.caches)
                 for u in range(U)]
        n_backhaul = sum(1 for p in paths if p == PATH_SERVER)
        n_fronthaul = sum(1 for p in paths if p in (PATH_SERVER, PATH_CLOUD, PATH_REMOTE))

        v_BU = per_content_rate(self.wired.backhaul_rate, n_backhaul)
        v_FU = per_content_rate(self.wired.fronthaul_rate, n_fronthaul)
        link = map_qos_exponents_lenient(self.theta_O, self.wired, v_BU, v_FU)

        energies = np.empty(U)
        infeasible = 0
        for u in range(U):
            theta = link.for_path(paths[u])
            if math.isinf(theta):
                energies[u] = 0.0
                infeasible += 1
            else:
                energies[u] = effective_capacity_from_samples(theta, samples[u])

        for u in range(U):
            demand = update_distribution(predictions[u],
                                         self.caches.rrh.get(int(assoc[u]), frozenset()))
            weight = (0.0 if math.isinf(link.theta_A)
                      else effective_capacity_from_samples(link.theta_A, samples[u]))
            self.demand_stream.append((slot, demand, weight))

        if not self.oracle_like:
            for u, esn in enumerate(self.content_esns):
                onehot = np.zeros(cfg["N"])
                onehot[requests[u] - 1] = 1.0
                esn.train_step(self.workload.context(u, slot), onehot)

        if slot % cfg["T_tau"] == 0:
            self._retrain_mobility()
            self._refresh_cloud(slot)

        self.prev_link = link
        counts = {p: paths.count(p) for p in (PATH_LOCAL, PATH_CLOUD,
                                              PATH_REMOTE, PATH_SERVER)}
        return SlotMetrics(
            slot=slot,
            effective_sum=sum_effective_capacity(energies),
            hit_local=counts[PATH_LOCAL] / U,
            hit_cloud=counts[PATH_CLOUD] / U,
            hit_remote=counts[PATH_REMOTE] / U,
            miss_server=counts[PATH_SERVER] / U,
            n_backhaul=n_backhaul,
            n_fronthaul=n_fronthaul,
            infeasible=infeasible,
        )

    def run(self):
        slots = [self.run_slot(k) for k in range(1, self.cfg["T"] + 1)]
        e_bar = float(np.mean([m.effective_sum for m in slots]))
        return EpisodeReport(policy=self.policy, seed=self.seed,
                             effective_capacity_avg=e_bar, slots=slots,
                             cloud_trace=self.cloud_trace,
                             final_rrh_caches=dict(self.caches.rrh))


def run_episode(config, policy, seed, oracle_predictions=False):
    """Execute one episode; see Simulation for the slot structure."""
    return Simulation(config, policy, seed,
                      oracle_predictions=oracle_predictions).run()
