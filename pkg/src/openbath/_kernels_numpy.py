"""Pure-numpy reference implementations of the hot kernels.

Selected at import time by ``OPENBATH_BACKEND=numpy`` (see ``kernels``).
Kept semantically identical to the jitted versions; the benchmark suite
compares both.
"""

import numpy as np

_CHUNK = 512


def sum_pole_terms(weights, positions, omegas):
    """sum_j weights[j] / (omega - positions[j]) for each omega."""
    out = np.empty(omegas.shape[0], dtype=np.complex128)
    for start in range(0, omegas.shape[0], _CHUNK):
        blk = omegas[start:start + _CHUNK, None]
        out[start:start + _CHUNK] = np.sum(weights[None, :] / (blk - positions[None, :]), axis=1)
    return out


def exp_sum_terms(weights, positions, times):
    """sum_j weights[j] * exp(-1j * positions[j] * t) for each t."""
    out = np.empty(times.shape[0], dtype=np.complex128)
    for start in range(0, times.shape[0], _CHUNK):
        blk = times[start:start + _CHUNK, None]
        out[start:start + _CHUNK] = np.sum(weights[None, :] * np.exp(-1j * positions[None, :] * blk), axis=1)
    return out


def band_resolvent_sum(omegas, band):
    """mean_k 1 / (omega - band[k]) for each omega (trapezoid over a period)."""
    out = np.empty(omegas.shape[0], dtype=np.complex128)
    for start in range(0, omegas.shape[0], _CHUNK):
        blk = omegas[start:start + _CHUNK, None]
        out[start:start + _CHUNK] = np.mean(1.0 / (blk - band[None, :]), axis=1)
    return out


def pair_convolution_grid(weights, positions, omegas):
    """Pairwise partial-fraction convolution on an omega grid.

    Computes sum_{a,b} w_a w_b / (omega - p_a - p_b); the input arrays hold
    the single-particle spectral terms (poles first, then cut nodes).
    """
    n = positions.shape[0]
    psum = (positions[:, None] + positions[None, :]).ravel()
    wprod = (weights[:, None] * weights[None, :]).ravel()
    return sum_pole_terms(wprod, psum, omegas)
