"""Pure-numpy implementations of the hot sequence kernels.

Selected automatically when the compiled extension is absent (or when
CRANCACHE_PURE_PYTHON is set). Semantics must match `_core.pyx` exactly;
tests assert numerical parity between the two backends.
"""
import numpy as np

BACKEND = "python"


def cycle_drive(cycle_w, w_in, inputs, state0):
    """Drive a linear cycle reservoir over a scalar input sequence.

    Row i of the cycle matrix holds cycle_w[i] in column (i-1) mod W, so one
    step is v[i] <- cycle_w[i]*v[(i-1) mod W] + w_in[i]*m_t.

    Returns the (T, W) array of post-update states.
    """
    cycle_w = np.asarray(cycle_w, dtype=np.float64)
    w_in = np.asarray(w_in, dtype=np.float64)
    inputs = np.asarray(inputs, dtype=np.float64)
    W = cycle_w.shape[0]
    T = inputs.shape[0]
    shift = np.arange(W) - 1  # index (i-1) mod W
    states = np.empty((T, W))
    v = np.array(state0, dtype=np.float64, copy=True)
    for t in range(T):
        v = cycle_w * v[shift] + w_in * inputs[t]
        states[t] = v
    return states


def lms_run(reservoir, w_in, w_out, xs, targets, learning_rate, state0):
    """Run the tanh-reservoir online training loop over a (x, target) sequence.

    Per step: v <- tanh(reservoir @ v + w_in @ x); z = [v; x]; y = w_out @ z;
    w_out += lr * outer(target - y, z). `w_out` is updated in place.

    Returns (raw_outputs (T, N), final_state (Nw,)).
    """
    xs = np.asarray(xs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    T = xs.shape[0]
    n_out = w_out.shape[0]
    v = np.array(state0, dtype=np.float64, copy=True)
    raw = np.empty((T, n_out))
    for t in range(T):
        v = np.tanh(reservoir @ v + w_in @ xs[t])
        z = np.concatenate([v, xs[t]])
        y = w_out @ z
        raw[t] = y
        w_out += learning_rate * np.outer(targets[t] - y, z)
    return raw, v
