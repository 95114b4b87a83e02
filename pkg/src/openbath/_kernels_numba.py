"""Numba-jitted hot kernels (complex partial-fraction and exponential sums)."""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def sum_pole_terms(weights, positions, omegas):
    out = np.empty(omegas.shape[0], dtype=np.complex128)
    for i in prange(omegas.shape[0]):
        acc = 0.0 + 0.0j
        w = omegas[i]
        for j in range(positions.shape[0]):
            acc += weights[j] / (w - positions[j])
        out[i] = acc
    return out


@njit(cache=True, parallel=True)
def exp_sum_terms(weights, positions, times):
    out = np.empty(times.shape[0], dtype=np.complex128)
    for i in prange(times.shape[0]):
        acc = 0.0 + 0.0j
        t = times[i]
        for j in range(positions.shape[0]):
            acc += weights[j] * np.exp(-1j * positions[j] * t)
        out[i] = acc
    return out


@njit(cache=True, parallel=True)
def band_resolvent_sum(omegas, band):
    out = np.empty(omegas.shape[0], dtype=np.complex128)
    n = band.shape[0]
    for i in prange(omegas.shape[0]):
        acc = 0.0 + 0.0j
        w = omegas[i]
        for j in range(n):
            acc += 1.0 / (w - band[j])
        out[i] = acc / n
    return out


@njit(cache=True, parallel=True)
def pair_convolution_grid(weights, positions, omegas):
    n = positions.shape[0]
    out = np.empty(omegas.shape[0], dtype=np.complex128)
    for i in prange(omegas.shape[0]):
        acc = 0.0 + 0.0j
        w = omegas[i]
        for a in range(n):
            wa = weights[a]
            pa = positions[a]
            for b in range(n):
                acc += wa * weights[b] / (w - pa - positions[b])
        out[i] = acc
    return out
