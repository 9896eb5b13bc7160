"""Shared brute-force oracles, independent of the package's execution paths.

Everything here goes through dense matrices: Pauli strings via Kronecker
products, gate unitaries via expm of the generator, circuits via explicit
matrix products.  Slow and simple on purpose.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from qmaml.circuits import AnsatzCircuit

PAULI_2X2 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_dense(ops: str) -> np.ndarray:
    """Dense matrix of a Pauli string; qubit 0 is the most significant factor."""
    mat = PAULI_2X2[ops[0]]
    for ch in ops[1:]:
        mat = np.kron(mat, PAULI_2X2[ch])
    return mat


def hamiltonian_dense(h) -> np.ndarray:
    dim = 2 ** h.n
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, ps in h.terms:
        mat += coeff * pauli_dense(ps.ops)
    return mat


def _embed_pauli(n: int, axes: dict[int, str]) -> np.ndarray:
    ops = "".join(axes.get(q, "I") for q in range(n))
    return pauli_dense(ops)


def gate_unitary_dense(gate, theta, n: int) -> np.ndarray:
    """Full-space unitary of one gate via expm(-i angle/2 G) or index maps."""
    dim = 2 ** n
    if gate.kind == "CNOT":
        control, target = gate.qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for b in range(dim):
            if (b >> (n - 1 - control)) & 1:
                mat[b ^ (1 << (n - 1 - target)), b] = 1.0
            else:
                mat[b, b] = 1.0
        return mat
    if gate.kind == "CZ":
        q1, q2 = gate.qubits
        diag = np.ones(dim, dtype=complex)
        for b in range(dim):
            if (b >> (n - 1 - q1)) & 1 and (b >> (n - 1 - q2)) & 1:
                diag[b] = -1.0
        return np.diag(diag)
    if gate.kind == "ROT":
        a, b_ang, g = (float(theta[s]) for s in gate.slots)
        q = gate.qubits[0]
        u = expm(-0.5j * g * _embed_pauli(n, {q: "Z"}))
        u = u @ expm(-0.5j * b_ang * _embed_pauli(n, {q: "Y"}))
        u = u @ expm(-0.5j * a * _embed_pauli(n, {q: "Z"}))
        return u
    angle = float(theta[gate.slots[0]])
    if gate.kind in ("RX", "RY", "RZ"):
        axis = gate.kind[1]
        gen = _embed_pauli(n, {gate.qubits[0]: axis})
    else:  # XX, YY, ZZ
        axis = gate.kind[0]
        gen = _embed_pauli(n, {gate.qubits[0]: axis, gate.qubits[1]: axis})
    return expm(-0.5j * angle * gen)


def circuit_unitary_dense(circuit: AnsatzCircuit, theta) -> np.ndarray:
    u = np.eye(2 ** circuit.n, dtype=complex)
    for gate in circuit.gates:
        u = gate_unitary_dense(gate, theta, circuit.n) @ u
    return u


def random_pauli_hamiltonian(n: int, num_terms: int, rng: np.random.Generator,
                             coeff_scale: float = 1.0):
    from qmaml.hamiltonian import PauliHamiltonian

    terms = []
    for _ in range(num_terms):
        ops = "".join(rng.choice(list("IXYZ")) for _ in range(n))
        if ops == "I" * n:
            ops = "Z" + ops[1:]
        terms.append((coeff_scale * rng.uniform(-1.0, 1.0), ops))
    return PauliHamiltonian.from_terms(n, terms)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return v / np.linalg.norm(v)


def finite_difference_gradient(cost_fn, theta, step: float = 1e-4) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    grads = np.empty_like(theta)
    for i in range(theta.size):
        shifted = theta.copy()
        shifted[i] = theta[i] + step
        plus = cost_fn(shifted)
        shifted[i] = theta[i] - step
        minus = cost_fn(shifted)
        grads[i] = (plus - minus) / (2.0 * step)
    return grads


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
