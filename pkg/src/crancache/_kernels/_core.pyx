# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sequence kernels: cycle-reservoir drive and online LMS training.

Must mirror `_fallback.py`; operation order is kept identical so the two
backends agree to floating-point noise.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport tanh

cnp.import_array()

BACKEND = "compiled"


def cycle_drive(cycle_w, w_in, inputs, state0):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.ascontiguousarray(cycle_w, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wi = np.ascontiguousarray(w_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] m = np.ascontiguousarray(inputs, dtype=np.float64)
    cdef Py_ssize_t W = w.shape[0]
    cdef Py_ssize_t T = m.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] states = np.empty((T, W), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.array(state0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nv = np.empty(W, dtype=np.float64)
    cdef Py_ssize_t t, i, prev
    cdef double mt
    for t in range(T):
        mt = m[t]
        for i in range(W):
            prev = i - 1 if i > 0 else W - 1
            nv[i] = w[i] * v[prev] + wi[i] * mt
        for i in range(W):
            v[i] = nv[i]
            states[t, i] = nv[i]
    return states


def lms_run(reservoir, w_in, w_out, xs, targets, double learning_rate, state0):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.ascontiguousarray(reservoir, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Win = np.ascontiguousarray(w_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Wout = w_out  # updated in place
    cdef cnp.ndarray[cnp.float64_t, ndim=2] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] E = np.ascontiguousarray(targets, dtype=np.float64)
    cdef Py_ssize_t Nw = A.shape[0]
    cdef Py_ssize_t K = Win.shape[1]
    cdef Py_ssize_t T = X.shape[0]
    cdef Py_ssize_t N = Wout.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] raw = np.empty((T, N), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.array(state0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nv = np.empty(Nw, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.empty(Nw + K, dtype=np.float64)
    cdef Py_ssize_t t, i, j
    cdef double acc, y, resid
    for t in range(T):
        for i in range(Nw):
            acc = 0.0
            for j in range(Nw):
                acc += A[i, j] * v[j]
            for j in range(K):
                acc += Win[i, j] * X[t, j]
            nv[i] = tanh(acc)
        for i in range(Nw):
            v[i] = nv[i]
            z[i] = nv[i]
        for j in range(K):
            z[Nw + j] = X[t, j]
        for i in range(N):
            y = 0.0
            for j in range(Nw + K):
                y += Wout[i, j] * z[j]
            raw[t, i] = y
            resid = learning_rate * (E[t, i] - y)
            for j in range(Nw + K):
                Wout[i, j] += resid * z[j]
    return raw, np.asarray(v)
