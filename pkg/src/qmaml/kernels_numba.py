"""Numba-compiled statevector kernels (default backend).

Same contracts as :mod:`qmaml.kernels_numpy`; bit-twiddling enumeration of
amplitude groups instead of reshaped views.  ``pauli_matvec`` is the only
parallel kernel: output elements are independent, so the result does not
depend on thread scheduling.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def apply_1q(state, m, t):
    k = 1 << t
    for g in range(state.shape[0] >> 1):
        i0 = ((g >> t) << (t + 1)) | (g & (k - 1))
        i1 = i0 | k
        a0 = state[i0]
        a1 = state[i1]
        state[i0] = m[0, 0] * a0 + m[0, 1] * a1
        state[i1] = m[1, 0] * a0 + m[1, 1] * a1
    return state


@njit(cache=True)
def apply_2q(state, m, ta, tb):
    if ta > tb:
        u, l = ta, tb
    else:
        u, l = tb, ta
    ka = 1 << ta
    kb = 1 << tb
    ku = 1 << u
    kl = 1 << l
    for g in range(state.shape[0] >> 2):
        i0 = ((g >> l) << (l + 1)) | (g & (kl - 1))
        i0 = ((i0 >> u) << (u + 1)) | (i0 & (ku - 1))
        i1 = i0 | kb
        i2 = i0 | ka
        i3 = i0 | ka | kb
        a0, a1, a2, a3 = state[i0], state[i1], state[i2], state[i3]
        state[i0] = m[0, 0] * a0 + m[0, 1] * a1 + m[0, 2] * a2 + m[0, 3] * a3
        state[i1] = m[1, 0] * a0 + m[1, 1] * a1 + m[1, 2] * a2 + m[1, 3] * a3
        state[i2] = m[2, 0] * a0 + m[2, 1] * a1 + m[2, 2] * a2 + m[2, 3] * a3
        state[i3] = m[3, 0] * a0 + m[3, 1] * a1 + m[3, 2] * a2 + m[3, 3] * a3
    return state


@njit(cache=True)
def apply_cnot(state, tc, tt):
    if tc > tt:
        u, l = tc, tt
    else:
        u, l = tt, tc
    kc = 1 << tc
    kt = 1 << tt
    ku = 1 << u
    kl = 1 << l
    for g in range(state.shape[0] >> 2):
        i0 = ((g >> l) << (l + 1)) | (g & (kl - 1))
        i0 = ((i0 >> u) << (u + 1)) | (i0 & (ku - 1))
        i1 = i0 | kc
        i2 = i0 | kc | kt
        state[i1], state[i2] = state[i2], state[i1]
    return state


@njit(cache=True)
def apply_cz(state, t1, t2):
    if t1 > t2:
        u, l = t1, t2
    else:
        u, l = t2, t1
    ku = 1 << u
    kl = 1 << l
    for g in range(state.shape[0] >> 2):
        i0 = ((g >> l) << (l + 1)) | (g & (kl - 1))
        i0 = ((i0 >> u) << (u + 1)) | (i0 & (ku - 1))
        state[i0 | ku | kl] = -state[i0 | ku | kl]
    return state


@njit(cache=True)
def apply_pauli(psi, out, x_mask, z_mask, phase):
    for j in range(psi.shape[0]):
        src = j ^ x_mask
        v = src & z_mask
        v ^= v >> 32
        v ^= v >> 16
        v ^= v >> 8
        v ^= v >> 4
        v ^= v >> 2
        v ^= v >> 1
        sign = 1.0 - 2.0 * (v & 1)
        out[j] = phase * sign * psi[src]
    return out


@njit(cache=True, parallel=True)
def pauli_matvec(coeffs, phases, x_masks, z_masks, psi, out):
    nt = coeffs.shape[0]
    for j in prange(psi.shape[0]):
        acc = 0.0j
        for t in range(nt):
            src = j ^ x_masks[t]
            v = src & z_masks[t]
            v ^= v >> 32
            v ^= v >> 16
            v ^= v >> 8
            v ^= v >> 4
            v ^= v >> 2
            v ^= v >> 1
            sign = 1.0 - 2.0 * (v & 1)
            acc += coeffs[t] * phases[t] * sign * psi[src]
        out[j] = acc
    return out
