"""Topology, per-slot world state, and delivery-path resolution."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..qos import PATH_CLOUD, PATH_LOCAL, PATH_REMOTE, PATH_SERVER
from ..seeding import rng_for


def scatter_in_disk(n_points, radius, rng):
    """Uniform points in the disk (area-uniform radial law)."""
    radii = radius * np.sqrt(rng.random(n_points))
    angles = rng.uniform(0.0, 2.0 * np.pi, n_points)
    return np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)


def nearest_rrh(positions, rrh_positions):
    """Index of the closest RRH for each user position (row-wise)."""
    positions = np.atleast_2d(positions)
    d2 = ((positions[:, None, :] - rrh_positions[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


@dataclass
class Topology:
    """RRH layout plus the per-user mobility tracks for a whole episode."""
    rrh_positions: np.ndarray        # (R, 2)
    user_tracks: np.ndarray          # (T, U, 2) positions at slots 1..T
    start_positions: np.ndarray      # (U, 2) positions before slot 1

    @property
    def n_rrhs(self):
        return self.rrh_positions.shape[0]

    @property
    def n_users(self):
        return self.user_tracks.shape[1]

    def segment(self, slot, user):
        """(start, end) of the user's movement during 1-based `slot`."""
        end = self.user_tracks[slot - 1, user]
        start = self.start_positions[user] if slot == 1 else self.user_tracks[slot - 2, user]
        return start, end


def build_topology(n_rrhs, schedules, n_slots, disk_radius, seed):
    if n_rrhs < 1 or not schedules:
        raise ConfigurationError("topology needs RRHs and users")
    rng = rng_for(seed, "topology")
    rrh_positions = scatter_in_disk(n_rrhs, disk_radius, rng)
    tracks = np.stack([sched.positions(n_slots) for sched in schedules], axis=1)
    starts = np.stack([sched.waypoints[0] for sched in schedules])
    return Topology(rrh_positions=rrh_positions, user_tracks=tracks,
                    start_positions=starts)


def resolve_delivery_path(content, serving_rrh, cache_state):
    """Source priority when several hold the content: local > cloud > remote > server.

    The priority is effective-capacity greedy: the mapped exponents satisfy
    theta_O <= theta_A <= theta_G <= theta_S whenever the paths are feasible.
    """
    if content in cache_state.rrh.get(serving_rrh, frozenset()):
        return PATH_LOCAL
    if content in cache_state.cloud:
        return PATH_CLOUD
    for rrh, cached in cache_state.rrh.items():
        if rrh != serving_rrh and content in cached:
            return PATH_REMOTE
    return PATH_SERVER
