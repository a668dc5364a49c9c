"""Compiled collapsed-Gibbs sweeps.

Random numbers are drawn by the caller (one uniform per token per sweep) so
results depend only on the numpy Generator, never on the compiled kernel.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _draw(p, r):
    k = 0
    last = p.shape[0] - 1
    while k < last and p[k] <= r:
        k += 1
    return k


@njit(cache=True, nogil=True)
def train_sweep(words, docs, z, ndk, nkw, nk, alpha, beta, vbeta, u):
    """One sweep over every token, resampling its topic from the full conditional."""
    K = nk.shape[0]
    p = np.empty(K)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        ndk[d, k] -= 1
        nkw[k, w] -= 1
        nk[k] -= 1
        total = 0.0
        for t in range(K):
            total += (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + vbeta)
            p[t] = total
        k = _draw(p, u[i] * total)
        z[i] = k
        ndk[d, k] += 1
        nkw[k, w] += 1
        nk[k] += 1


@njit(cache=True, nogil=True)
def fixed_phi_sweep(words, z, nk, phi, alpha, u):
    """Resample the tokens of a single document against a frozen topic-word matrix."""
    K = nk.shape[0]
    p = np.empty(K)
    for i in range(words.shape[0]):
        w = words[i]
        nk[z[i]] -= 1
        total = 0.0
        for t in range(K):
            total += (nk[t] + alpha) * phi[t, w]
            p[t] = total
        k = _draw(p, u[i] * total)
        z[i] = k
        nk[k] += 1
