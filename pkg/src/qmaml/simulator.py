"""Statevector execution: run circuits, expectation values, exact gradients.

Statevectors are plain complex128 arrays of length 2^n; basis index bit
(n-1-q) holds qubit q, so |0...0> is index 0.  Gradients come in two flavors
that must agree: an adjoint sweep (one forward pass, one backward pass) and
the two-point shift rule evaluated at +-pi/2, which serves as the slower
independent route.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .backend import get_kernels
from .circuits import AnsatzCircuit
from .hamiltonian import PauliHamiltonian

ADJOINT = "adjoint"
PARAMETER_SHIFT = "parameter-shift"


class _Prim(NamedTuple):
    kind: str               # RX RY RZ XX YY ZZ CNOT CZ
    bits: tuple[int, ...]   # bit positions, matching the gate's qubit order
    slot: int               # parameter slot, -1 for fixed gates
    x_mask: int             # generator Pauli masks (rotations only)
    z_mask: int
    phase: complex


_GEN_1Q = {"RX": ("X",), "RY": ("Y",), "RZ": ("Z",)}
_GEN_2Q = {"XX": "X", "YY": "Y", "ZZ": "Z"}


def _generator_masks(axes: dict[int, str]) -> tuple[int, int, complex]:
    x_mask = 0
    z_mask = 0
    phase = 1 + 0j
    for bit, axis in axes.items():
        if axis in ("X", "Y"):
            x_mask |= 1 << bit
        if axis in ("Z", "Y"):
            z_mask |= 1 << bit
        if axis == "Y":
            phase *= 1j
    return x_mask, z_mask, phase


@lru_cache(maxsize=128)
def _compile(circuit: AnsatzCircuit) -> tuple[_Prim, ...]:
    n = circuit.n
    prims: list[_Prim] = []
    for gate in circuit.gates:
        bits = tuple(n - 1 - q for q in gate.qubits)
        if gate.kind == "ROT":
            # RZ(a), RY(b), RZ(g) applied in that order to the state
            for kind, slot in zip(("RZ", "RY", "RZ"), gate.slots):
                axis = _GEN_1Q[kind][0]
                x, z, ph = _generator_masks({bits[0]: axis})
                prims.append(_Prim(kind, bits, slot, x, z, ph))
        elif gate.kind in _GEN_1Q:
            axis = _GEN_1Q[gate.kind][0]
            x, z, ph = _generator_masks({bits[0]: axis})
            prims.append(_Prim(gate.kind, bits, gate.slots[0], x, z, ph))
        elif gate.kind in _GEN_2Q:
            axis = _GEN_2Q[gate.kind]
            x, z, ph = _generator_masks({bits[0]: axis, bits[1]: axis})
            prims.append(_Prim(gate.kind, bits, gate.slots[0], x, z, ph))
        else:  # CNOT, CZ
            prims.append(_Prim(gate.kind, bits, -1, 0, 0, 1 + 0j))
    return tuple(prims)


def _rotation_1q(kind: str, theta: float) -> np.ndarray:
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    # RZ
    return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=np.complex128)


def _rotation_2q(kind: str, theta: float) -> np.ndarray:
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    if kind == "XX":
        return np.array([
            [c, 0, 0, -1j * s],
            [0, c, -1j * s, 0],
            [0, -1j * s, c, 0],
            [-1j * s, 0, 0, c],
        ], dtype=np.complex128)
    if kind == "YY":
        return np.array([
            [c, 0, 0, 1j * s],
            [0, c, -1j * s, 0],
            [0, -1j * s, c, 0],
            [1j * s, 0, 0, c],
        ], dtype=np.complex128)
    # ZZ (diagonal)
    e_m = c - 1j * s
    e_p = c + 1j * s
    return np.diag([e_m, e_p, e_p, e_m]).astype(np.complex128)


def _apply_prim(state: np.ndarray, prim: _Prim, theta: np.ndarray,
                dagger: bool = False) -> None:
    kernels = get_kernels()
    if prim.kind == "CNOT":
        kernels.apply_cnot(state, prim.bits[0], prim.bits[1])
        return
    if prim.kind == "CZ":
        kernels.apply_cz(state, prim.bits[0], prim.bits[1])
        return
    angle = float(theta[prim.slot])
    if dagger:
        angle = -angle
    if prim.kind in _GEN_1Q:
        kernels.apply_1q(state, _rotation_1q(prim.kind, angle), prim.bits[0])
    else:
        kernels.apply_2q(state, _rotation_2q(prim.kind, angle),
                         prim.bits[0], prim.bits[1])


def zero_state(n: int) -> np.ndarray:
    state = np.zeros(2 ** n, dtype=np.complex128)
    state[0] = 1.0
    return state


def run(circuit: AnsatzCircuit, theta: np.ndarray,
        initial: np.ndarray | None = None) -> np.ndarray:
    """Apply the circuit at parameters ``theta``; returns a fresh statevector."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (circuit.num_params,):
        raise ValueError(
            f"theta has shape {theta.shape}, circuit expects ({circuit.num_params},)")
    if initial is None:
        state = zero_state(circuit.n)
    else:
        if initial.shape != (2 ** circuit.n,):
            raise ValueError(
                f"initial state has length {initial.shape[0]}, expected {2 ** circuit.n}")
        state = np.array(initial, dtype=np.complex128)
    for prim in _compile(circuit):
        _apply_prim(state, prim, theta)
    return state


def expectation(circuit: AnsatzCircuit, theta: np.ndarray,
                h: PauliHamiltonian) -> float:
    """<psi(theta)| H |psi(theta)> with |psi(theta)> = circuit applied to |0...0>."""
    if circuit.n != h.n:
        raise ValueError(f"circuit acts on {circuit.n} qubits, H on {h.n}")
    return h.expectation(run(circuit, theta))


def measure_distribution(circuit: AnsatzCircuit, theta: np.ndarray) -> np.ndarray:
    """Computational-basis probabilities |amplitude|^2."""
    state = run(circuit, theta)
    return np.abs(state) ** 2


def adjoint_gradient_states(circuit: AnsatzCircuit, theta: np.ndarray,
                            psi: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Backward sweep given the final state and the cost's adjoint state.

    ``lam`` must be d(cost)/d(psi*) evaluated at the final state ``psi``; for
    an energy cost that is H|psi>.  Both arrays are consumed (mutated).
    """
    theta = np.asarray(theta, dtype=np.float64)
    kernels = get_kernels()
    grads = np.zeros(circuit.num_params, dtype=np.float64)
    scratch = np.empty_like(psi)
    for prim in reversed(_compile(circuit)):
        if prim.slot >= 0:
            # d/dtheta exp(-i theta/2 G) => gradient Im <lam| G |psi>
            kernels.apply_pauli(psi, scratch, prim.x_mask, prim.z_mask, prim.phase)
            grads[prim.slot] = np.vdot(lam, scratch).imag
        _apply_prim(psi, prim, theta, dagger=True)
        _apply_prim(lam, prim, theta, dagger=True)
    return grads


def gradient(circuit: AnsatzCircuit, theta: np.ndarray, h: PauliHamiltonian,
             method: str = ADJOINT) -> np.ndarray:
    """d<H>/d(theta), exact, via the chosen method."""
    if circuit.n != h.n:
        raise ValueError(f"circuit acts on {circuit.n} qubits, H on {h.n}")
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (circuit.num_params,):
        raise ValueError(
            f"theta has shape {theta.shape}, circuit expects ({circuit.num_params},)")
    if circuit.num_params == 0:
        return np.zeros(0, dtype=np.float64)
    if method == ADJOINT:
        psi = run(circuit, theta)
        lam = h.apply(psi)
        return adjoint_gradient_states(circuit, theta, psi, lam)
    if method == PARAMETER_SHIFT:
        return _parameter_shift(circuit, theta, h)
    raise ValueError(f"unknown gradient method {method!r}")


def _parameter_shift(circuit: AnsatzCircuit, theta: np.ndarray,
                     h: PauliHamiltonian) -> np.ndarray:
    for prim in _compile(circuit):
        if prim.slot >= 0 and prim.kind not in _GEN_1Q and prim.kind not in _GEN_2Q:
            raise ValueError(f"no shift rule for gate kind {prim.kind!r}")
    grads = np.empty(circuit.num_params, dtype=np.float64)
    shifted = theta.copy()
    for s in range(circuit.num_params):
        original = shifted[s]
        shifted[s] = original + math.pi / 2.0
        e_plus = expectation(circuit, shifted, h)
        shifted[s] = original - math.pi / 2.0
        e_minus = expectation(circuit, shifted, h)
        shifted[s] = original
        grads[s] = 0.5 * (e_plus - e_minus)
    return grads


def expectation_and_gradient(circuit: AnsatzCircuit, theta: np.ndarray,
                             h: PauliHamiltonian,
                             method: str = ADJOINT) -> tuple[float, np.ndarray]:
    """One forward pass shared between cost and adjoint gradient."""
    if circuit.n != h.n:
        raise ValueError(f"circuit acts on {circuit.n} qubits, H on {h.n}")
    if method != ADJOINT:
        return expectation(circuit, theta, h), gradient(circuit, theta, h, method)
    psi = run(circuit, theta)
    lam = h.apply(psi)
    cost = float(np.real(np.vdot(psi, lam)))
    return cost, adjoint_gradient_states(circuit, theta, psi, lam)
