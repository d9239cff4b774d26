"""Radio and wired-link model: SINR, slot capacity, QoS exponents, effective capacity.

Content can reach a user over four delivery paths, named by their source:
  O - local RRH cache (no wired hop),
  A - cloud cache (one fronthaul hop),
  G - remote RRH cache (two fronthaul hops),
  S - content server (two hops with the backhaul as the external rate).
Given the base exponent theta_O of the cache-local path, the other three are
scaled so that all four paths meet the same delay-violation probability
exp(-theta_O * D_max). Effective capacity is the log-MGF rate of the cumulative
slot service; base-2 logs are paired with base-2 exponents throughout so the
theta -> 0 limit returns the mean capacity.

dBm values are converted to linear scale once, in RadioParams; all math here
is linear-scale and unit-agnostic.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GeometryError, InfeasibleLinkError

SLOT_SUBSTEPS = 10  # channel sub-draws per slot along the user's segment

PATH_LOCAL = "O"
PATH_CLOUD = "A"
PATH_SERVER = "S"
PATH_REMOTE = "G"
PATHS = (PATH_LOCAL, PATH_CLOUD, PATH_SERVER, PATH_REMOTE)

# wired hop counts per path: S counts BBU->RRH plus RRH->user with the
# backhaul as external rate, A one fronthaul hop, G two, O none
HOP_COUNTS = {PATH_SERVER: 2, PATH_CLOUD: 1, PATH_REMOTE: 2, PATH_LOCAL: 0}


def dbm_to_watts(dbm):
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class RadioParams:
    """Downlink radio constants (stored linear-scale)."""
    tx_power_dbm: float = 20.0
    pathloss_exponent: float = 4.0
    noise_dbm: float = -95.0
    bandwidth_hz: float = 1e6
    cell_radius_m: float = 1000.0
    tx_power_w: float = field(init=False)
    noise_w: float = field(init=False)

    def __post_init__(self):
        if self.pathloss_exponent <= 2.0:
            raise ConfigurationError("pathloss exponent must exceed 2")
        if self.bandwidth_hz <= 0 or self.cell_radius_m <= 0:
            raise ConfigurationError("bandwidth and cell radius must be positive")
        object.__setattr__(self, "tx_power_w", dbm_to_watts(self.tx_power_dbm))
        object.__setattr__(self, "noise_w", dbm_to_watts(self.noise_dbm))


@dataclass(frozen=True)
class WiredParams:
    """Backhaul/fronthaul pipes and the delivery contract."""
    backhaul_rate: float = 1e9       # bit/s
    fronthaul_rate: float = 2e9      # bit/s
    content_size: float = 1e7        # bits
    delay_bound: float = 1.0         # seconds

    def __post_init__(self):
        if min(self.backhaul_rate, self.fronthaul_rate,
               self.content_size, self.delay_bound) <= 0:
            raise ConfigurationError("wired parameters must all be positive")


@dataclass(frozen=True)
class LinkQos:
    """QoS exponents of the four delivery paths for one (rate split) instant."""
    theta_O: float
    theta_A: float
    theta_S: float
    theta_G: float

    def for_path(self, path):
        return {PATH_LOCAL: self.theta_O, PATH_CLOUD: self.theta_A,
                PATH_SERVER: self.theta_S, PATH_REMOTE: self.theta_G}[path]


def per_content_rate(pipe_rate, n_users):
    """Even split of a wired pipe across the users it currently carries.

    An idle pipe (n = 0) returns the full rate: it constrains nothing and the
    division-by-zero case is meaningless.
    """
    if n_users < 0:
        raise ConfigurationError("user count cannot be negative")
    return pipe_rate if n_users == 0 else pipe_rate / n_users


def sinr(distance, fading, interferer_distances, interferer_fadings, radio):
    """Received SINR: P d^-beta |h|^2 over out-of-cluster interference plus noise.

    Accepts scalars or broadcastable arrays; distances in metres, result in
    linear scale.
    """
    distance = np.asarray(distance, dtype=np.float64)
    if np.any(distance <= 0.0):
        raise GeometryError("RRH-user distance must be positive")
    signal = radio.tx_power_w * distance ** (-radio.pathloss_exponent) * np.asarray(fading)
    interference = 0.0
    if interferer_distances is not None and len(np.atleast_1d(interferer_distances)):
        d_i = np.asarray(interferer_distances, dtype=np.float64)
        if np.any(d_i <= 0.0):
            raise GeometryError("interferer distance must be positive")
        powers = radio.tx_power_w * d_i ** (-radio.pathloss_exponent) * np.asarray(interferer_fadings)
        interference = powers.sum(axis=-1)
    return signal / (interference + radio.noise_w)


def slot_capacity(gamma_samples, bandwidth_hz):
    """Cumulative slot capacity: sum of B log2(1+gamma) over the sub-steps."""
    gamma_samples = np.atleast_1d(np.asarray(gamma_samples, dtype=np.float64))
    if gamma_samples.size < 1:
        raise ConfigurationError("need at least one SINR sample")
    return float(bandwidth_hz * np.log2(1.0 + gamma_samples).sum())


def map_qos_exponents(theta_O, wired, v_BU, v_FU):
    """Scale the local-path exponent onto the other three delivery paths.

    theta_S = theta_O / (1 - 2L/(v_BU D)), theta_A = theta_O / (1 - L/(v_FU D)),
    theta_G = theta_O / (1 - 2L/(v_FU D)). A non-positive denominator means the
    content cannot meet the delay bound over that path.
    """
    if theta_O <= 0:
        raise ConfigurationError("theta_O must be positive")
    L, D = wired.content_size, wired.delay_bound
    dens = {
        PATH_SERVER: 1.0 - 2.0 * L / (v_BU * D),
        PATH_CLOUD: 1.0 - L / (v_FU * D),
        PATH_REMOTE: 1.0 - 2.0 * L / (v_FU * D),
    }
    for path, den in dens.items():
        if den <= 0.0:
            raise InfeasibleLinkError(
                f"path {path} cannot meet the delay bound (denominator {den:.4g})"
            )
    return LinkQos(theta_O=theta_O,
                   theta_A=theta_O / dens[PATH_CLOUD],
                   theta_S=theta_O / dens[PATH_SERVER],
                   theta_G=theta_O / dens[PATH_REMOTE])


def map_qos_exponents_lenient(theta_O, wired, v_BU, v_FU):
    """Like map_qos_exponents but marks infeasible paths with +inf exponents."""
    L, D = wired.content_size, wired.delay_bound
    def scaled(den):
        return theta_O / den if den > 0.0 else math.inf
    return LinkQos(theta_O=theta_O,
                   theta_A=scaled(1.0 - L / (v_FU * D)),
                   theta_S=scaled(1.0 - 2.0 * L / (v_BU * D)),
                   theta_G=scaled(1.0 - 2.0 * L / (v_FU * D)))


def delay_violation_prob(theta, delay_bound, hop_count, wired_rate, content_size):
    """P(D > D_max) = exp(-theta (D_max - N_h L / v))."""
    slack = delay_bound - hop_count * content_size / wired_rate if hop_count else delay_bound
    if slack <= 0.0:
        raise InfeasibleLinkError("delay bound below the fixed wired transfer time")
    return math.exp(-theta * slack)


def effective_capacity_from_samples(theta, capacity_samples, tau=1.0):
    """Log-MGF effective rate of pre-drawn cumulative-capacity samples.

    E = -(1/(theta tau)) log2 mean(2^(-theta C)). theta <= 0 falls back to the
    theta->0 limit mean(C)/tau; theta = +inf scores zero (infeasible path).
    """
    samples = np.atleast_1d(np.asarray(capacity_samples, dtype=np.float64))
    if samples.size < 1:
        raise ConfigurationError("need at least one capacity sample")
    if theta <= 0.0:
        return float(samples.mean() / tau)
    if math.isinf(theta):
        return 0.0
    exponents = -theta * samples * math.log(2.0)
    peak = exponents.max()
    log2_mean = (peak + math.log(np.exp(exponents - peak).mean())) / math.log(2.0)
    return float(-log2_mean / (theta * tau))


def effective_capacity(theta, capacity_sampler, tau, n_mc, seed):
    """Seeded Monte-Carlo effective capacity; `capacity_sampler(rng, n)` draws C."""
    if n_mc < 1:
        raise ConfigurationError("n_mc must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    samples = np.asarray(capacity_sampler(rng, n_mc), dtype=np.float64)
    return effective_capacity_from_samples(theta, samples, tau)


def sum_effective_capacity(values):
    """Sum of per-user effective capacities for one slot."""
    return float(np.asarray(values, dtype=np.float64).sum())


def long_term_average(slot_sums):
    """Time average of per-slot sums over the horizon."""
    slot_sums = np.asarray(slot_sums, dtype=np.float64)
    return float(slot_sums.mean()) if slot_sums.size else 0.0


def segment_capacity_samples(start, end, serving_pos, interferer_positions,
                             radio, n_mc, rng, unit_scale=1.0):
    """Monte-Carlo draws of the cumulative slot capacity along a movement segment.

    The user slides from `start` to `end` over SLOT_SUBSTEPS equally spaced
    positions; every sub-step redraws unit-mean exponential fading for the
    serving RRH and each out-of-cluster interferer. Returns (n_mc,) samples,
    multiplied by `unit_scale` (the simulator scores in Mbit: scale 1e-6).
    """
    start = np.asarray(start, dtype=np.float64)
    end = np.asarray(end, dtype=np.float64)
    frac = (np.arange(SLOT_SUBSTEPS) + 0.5) / SLOT_SUBSTEPS
    points = start[None, :] + frac[:, None] * (end - start)[None, :]
    d_serv = np.linalg.norm(points - np.asarray(serving_pos)[None, :], axis=1)
    if np.any(d_serv <= 0.0):
        raise GeometryError("user crosses the serving RRH location")
    h_serv = rng.exponential(1.0, size=(n_mc, SLOT_SUBSTEPS))
    signal = radio.tx_power_w * d_serv[None, :] ** (-radio.pathloss_exponent) * h_serv
    interference = 0.0
    interferer_positions = np.asarray(interferer_positions, dtype=np.float64)
    if interferer_positions.size:
        d_int = np.linalg.norm(points[:, None, :] - interferer_positions[None, :, :], axis=2)
        if np.any(d_int <= 0.0):
            raise GeometryError("user crosses an interfering RRH location")
        h_int = rng.exponential(1.0, size=(n_mc, SLOT_SUBSTEPS, d_int.shape[1]))
        powers = radio.tx_power_w * d_int[None, :, :] ** (-radio.pathloss_exponent) * h_int
        interference = powers.sum(axis=2)
    gamma = signal / (interference + radio.noise_w)
    per_step = radio.bandwidth_hz * np.log2(1.0 + gamma)
    return per_step.sum(axis=1) * unit_scale
