"""Minimum-complexity cycle-reservoir predictor for periodic user positions.

State updates are linear (no nonlinearity): v <- W v + W_in m, where W is a
weighted cyclic permutation (row i carries its weight in column (i-1) mod W).
The readout is trained offline by ridge regression on a window of collected
states; positions enter and leave as scalar location codes (indices into a
discretized grid over the coverage disk).
"""
from dataclasses import dataclass

import numpy as np

from .._kernels import cycle_drive
from ..errors import ConfigurationError, NumericalRankError


@dataclass(frozen=True)
class WeightDistribution:
    """Distribution of the cycle weights; support must lie inside (-1, 1).

    kind: "pointmass" (constant a), "symbinary" (+/- a equiprobable), or
    "uniform" (on [lo, hi]).
    """
    kind: str
    a: float = 0.0
    lo: float = 0.0
    hi: float = 0.0

    def __post_init__(self):
        if self.kind == "pointmass":
            if not abs(self.a) < 1.0:
                raise ConfigurationError("pointmass weight must satisfy |a| < 1")
        elif self.kind == "symbinary":
            if not abs(self.a) < 1.0:
                raise ConfigurationError("symbinary weight must satisfy |a| < 1")
        elif self.kind == "uniform":
            if not (self.lo < self.hi and abs(self.lo) < 1.0 and abs(self.hi) < 1.0):
                raise ConfigurationError("uniform support must satisfy -1 < lo < hi < 1")
        else:
            raise ConfigurationError(f"unknown weight distribution kind {self.kind!r}")

    def sample(self, rng, n):
        if self.kind == "pointmass":
            return np.full(n, self.a)
        if self.kind == "symbinary":
            return self.a * rng.choice([-1.0, 1.0], size=n)
        return rng.uniform(self.lo, self.hi, size=n)

    def moment(self, order):
        """E[w^order] in closed form."""
        if order == 0:
            return 1.0
        if self.kind == "pointmass":
            return self.a ** order
        if self.kind == "symbinary":
            return self.a ** order if order % 2 == 0 else 0.0
        num = self.hi ** (order + 1) - self.lo ** (order + 1)
        return num / ((order + 1) * (self.hi - self.lo))

    @property
    def max_abs(self):
        if self.kind == "uniform":
            return max(abs(self.lo), abs(self.hi))
        return abs(self.a)

    @property
    def is_zero_mean(self):
        if self.kind == "symbinary":
            return True
        if self.kind == "uniform":
            return self.lo == -self.hi
        return self.a == 0.0

    @property
    def is_strictly_positive(self):
        if self.kind == "pointmass":
            return self.a > 0.0
        if self.kind == "uniform":
            return self.lo > 0.0
        return False


def build_cycle_reservoir(n_units, spec, seed):
    """Cycle matrix with weights drawn from `spec`; deterministic per seed."""
    if n_units < 1:
        raise ConfigurationError("reservoir needs at least one unit")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    weights = spec.sample(rng, n_units)
    mat = np.zeros((n_units, n_units))
    rows = np.arange(n_units)
    mat[rows, (rows - 1) % n_units] = weights
    return mat


def ridge_train(states, targets, ridge_lambda):
    """Ridge readout: W_out = S V^T (V V^T + lambda^2 I)^-1, solved by factorization.

    `states` is W x N_tr (columns are per-step reservoir states), `targets` is
    N_s x N_tr. At lambda = 0 a rank-deficient state matrix raises
    NumericalRankError instead of returning a garbage solve.
    """
    states = np.atleast_2d(np.asarray(states, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if states.shape[1] != targets.shape[1]:
        raise ConfigurationError("states and targets must share the window length")
    if states.shape[1] < 1:
        raise ConfigurationError("training window is empty")
    n_units = states.shape[0]
    gram = states @ states.T + (ridge_lambda ** 2) * np.eye(n_units)
    if ridge_lambda == 0.0 and np.linalg.matrix_rank(states) < n_units:
        raise NumericalRankError("state matrix is rank-deficient and lambda = 0")
    rhs = states @ targets.T
    try:
        solution = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalRankError(str(exc)) from exc
    return solution.T


class MobilityEsn:
    """Cycle-reservoir ESN predicting the next `horizon` location codes."""

    def __init__(self, n_units, weight_spec, horizon, ridge_lambda=0.5, seed=0):
        if n_units < 1 or horizon < 1:
            raise ConfigurationError("n_units and horizon must be >= 1")
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.n_units = n_units
        self.horizon = horizon
        self.ridge_lambda = float(ridge_lambda)
        self.cycle_weight_spec = weight_spec
        self.reservoir_weights = build_cycle_reservoir(n_units, weight_spec, rng)
        self.input_weights = rng.uniform(-1.0, 1.0, n_units)
        self.output_weights = np.zeros((horizon, n_units))
        self.state = np.zeros(n_units)

    @property
    def cycle_weights(self):
        rows = np.arange(self.n_units)
        return self.reservoir_weights[rows, (rows - 1) % self.n_units]

    def state_update(self, code):
        """Linear state advance for one observed location code."""
        self.state = self.cycle_weights * np.roll(self.state, 1) + self.input_weights * float(code)
        return self.state

    def drive(self, codes):
        """Feed a whole code sequence; returns the (T, W) state trajectory."""
        codes = np.asarray(codes, dtype=np.float64)
        states = cycle_drive(self.cycle_weights, self.input_weights, codes, self.state)
        if len(codes):
            self.state = states[-1].copy()
        return states

    def predict(self):
        """Next `horizon` location codes; zeros while the readout is untrained."""
        return self.output_weights @ self.state

    def train(self, states, targets):
        """Ridge-fit the readout on a collected window (states W x N_tr)."""
        self.output_weights = ridge_train(states, targets, self.ridge_lambda)
        return self.output_weights


class LocationGrid:
    """Row-major discretization of the coverage disk into square cells.

    The mobility ESN consumes scalar inputs, so positions are encoded as the
    index of their grid cell (pitch defaults to 50 m on a radius-r disk).
    """

    def __init__(self, radius, pitch=50.0):
        if radius <= 0 or pitch <= 0:
            raise ConfigurationError("radius and pitch must be positive")
        self.radius = float(radius)
        self.pitch = float(pitch)
        self.n_cols = int(np.ceil(2.0 * radius / pitch))
        self.n_cells = self.n_cols * self.n_cols

    def encode(self, x, y):
        col = int(np.clip((x + self.radius) // self.pitch, 0, self.n_cols - 1))
        row = int(np.clip((y + self.radius) // self.pitch, 0, self.n_cols - 1))
        return row * self.n_cols + col

    def decode(self, code):
        code = int(np.clip(round(float(code)), 0, self.n_cells - 1))
        row, col = divmod(code, self.n_cols)
        x = -self.radius + (col + 0.5) * self.pitch
        y = -self.radius + (row + 0.5) * self.pitch
        return x, y
