"""Pure-numpy statevector kernels (fallback backend).

All kernels mutate ``state`` in place and return it.  Qubit positions are
bit positions counted from the least significant bit of the basis index;
callers translate wire numbers to bit positions.
"""

import numpy as np


def _parity(v):
    v = v.astype(np.int64, copy=True)
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return (v & 1).astype(np.int64)


def apply_1q(state, m, t):
    psi = state.reshape(-1, 2, 1 << t)
    a0 = psi[:, 0, :].copy()
    a1 = psi[:, 1, :]
    psi[:, 0, :] = m[0, 0] * a0 + m[0, 1] * a1
    psi[:, 1, :] = m[1, 0] * a0 + m[1, 1] * a1
    return state


def _view_2bits(state, u, l):
    # axes: (high blocks, bit u, middle, bit l, low)
    return state.reshape(-1, 2, 1 << (u - l - 1) if u - l > 1 else 1, 2, 1 << l)


def apply_2q(state, m, ta, tb):
    """Apply a 4x4 matrix on bits (ta, tb); row index is 2*bit(ta) + bit(tb)."""
    u, l = (ta, tb) if ta > tb else (tb, ta)
    psi = state.reshape(-1, 2, 1 << max(u - l - 1, 0), 2, 1 << l)

    def block(va, vb):
        vu, vl = (va, vb) if ta > tb else (vb, va)
        return psi[:, vu, :, vl, :]

    a0 = block(0, 0).copy()
    a1 = block(0, 1).copy()
    a2 = block(1, 0).copy()
    a3 = block(1, 1).copy()
    block(0, 0)[...] = m[0, 0] * a0 + m[0, 1] * a1 + m[0, 2] * a2 + m[0, 3] * a3
    block(0, 1)[...] = m[1, 0] * a0 + m[1, 1] * a1 + m[1, 2] * a2 + m[1, 3] * a3
    block(1, 0)[...] = m[2, 0] * a0 + m[2, 1] * a1 + m[2, 2] * a2 + m[2, 3] * a3
    block(1, 1)[...] = m[3, 0] * a0 + m[3, 1] * a1 + m[3, 2] * a2 + m[3, 3] * a3
    return state


def apply_cnot(state, tc, tt):
    u, l = (tc, tt) if tc > tt else (tt, tc)
    psi = state.reshape(-1, 2, 1 << max(u - l - 1, 0), 2, 1 << l)

    def block(vc, vt):
        vu, vl = (vc, vt) if tc > tt else (vt, vc)
        return psi[:, vu, :, vl, :]

    tmp = block(1, 0).copy()
    block(1, 0)[...] = block(1, 1)
    block(1, 1)[...] = tmp
    return state


def apply_cz(state, t1, t2):
    u, l = (t1, t2) if t1 > t2 else (t2, t1)
    psi = state.reshape(-1, 2, 1 << max(u - l - 1, 0), 2, 1 << l)
    psi[:, 1, :, 1, :] *= -1.0
    return state


def apply_pauli(psi, out, x_mask, z_mask, phase):
    """out = phase * X^x Z^z |psi>  (phase carries the i-per-Y factor)."""
    dim = psi.shape[0]
    src = np.arange(dim, dtype=np.int64) ^ x_mask
    sign = 1.0 - 2.0 * _parity(src & z_mask)
    np.multiply(psi[src], phase * sign, out=out)
    return out


def pauli_matvec(coeffs, phases, x_masks, z_masks, psi, out):
    """out = sum_t coeffs[t] * phases[t] * P_t |psi>."""
    dim = psi.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    out[:] = 0.0
    for t in range(coeffs.shape[0]):
        src = idx ^ x_masks[t]
        sign = 1.0 - 2.0 * _parity(src & z_masks[t])
        out += (coeffs[t] * phases[t]) * sign * psi[src]
    return out
