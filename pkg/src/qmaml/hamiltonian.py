"""Pauli-string Hamiltonians: construction, algebra, exact solvers, file I/O.

A Hamiltonian is a weighted sum of Pauli strings

    H = sum_j c_j * P_j,    P_j = tensor product over {I, X, Y, Z}

with real coefficients, which makes H Hermitian by construction.  Qubit 0 is
the leftmost character of a string and the most significant bit of a basis
index.  All operator algebra is symbolic (phase tables and bit masks); dense
matrices appear only in the exact diagonalizer and in test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .backend import get_kernels
from .rng import PortableRNG

PAULI_CHARS = "IXYZ"

# Coefficients below this are dropped after canonicalization / simplification.
COEFF_EPS = 1e-12

# Largest qubit count for which a dense 2^n x 2^n matrix is materialized.
DENSE_MAX_QUBITS = 12

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (a*b, phase)
_PAULI_MULT = {
    ("I", "I"): ("I", 1), ("I", "X"): ("X", 1), ("I", "Y"): ("Y", 1), ("I", "Z"): ("Z", 1),
    ("X", "I"): ("X", 1), ("X", "X"): ("I", 1), ("X", "Y"): ("Z", 1j), ("X", "Z"): ("Y", -1j),
    ("Y", "I"): ("Y", 1), ("Y", "X"): ("Z", -1j), ("Y", "Y"): ("I", 1), ("Y", "Z"): ("X", 1j),
    ("Z", "I"): ("Z", 1), ("Z", "X"): ("Y", 1j), ("Z", "Y"): ("X", -1j), ("Z", "Z"): ("I", 1),
}


class ConvergenceError(RuntimeError):
    """Iterative eigensolver failed; carries the best residual reached."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Paulis, e.g. ``"XXI"``."""

    ops: str

    def __post_init__(self):
        if len(self.ops) < 1:
            raise ValueError("Pauli string must act on at least one qubit")
        for ch in self.ops:
            if ch not in PAULI_CHARS:
                raise ValueError(f"invalid Pauli character {ch!r} in {self.ops!r}")

    def __len__(self) -> int:
        return len(self.ops)

    def __str__(self) -> str:
        return self.ops

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return sum(1 for ch in self.ops if ch != "I")


def multiply_pauli_strings(a: str, b: str) -> tuple[str, complex]:
    """Symbolic product of two equal-length Pauli strings -> (string, phase)."""
    out = []
    phase = 1 + 0j
    for ca, cb in zip(a, b):
        r, p = _PAULI_MULT[(ca, cb)]
        out.append(r)
        phase *= p
    return "".join(out), phase


def _pauli_masks(ops: str) -> tuple[int, int, complex]:
    """Decompose P = phase * X^x_mask Z^z_mask with phase = i^(#Y)."""
    n = len(ops)
    x_mask = 0
    z_mask = 0
    n_y = 0
    for q, ch in enumerate(ops):
        bit = 1 << (n - 1 - q)
        if ch in ("X", "Y"):
            x_mask |= bit
        if ch in ("Z", "Y"):
            z_mask |= bit
        if ch == "Y":
            n_y += 1
    return x_mask, z_mask, 1j ** (n_y % 4)


@dataclass(frozen=True)
class PauliHamiltonian:
    """Immutable weighted sum of Pauli strings on ``n`` qubits."""

    n: int
    terms: tuple[tuple[float, PauliString], ...]

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[float, str | PauliString]],
                   eps: float = COEFF_EPS) -> "PauliHamiltonian":
        """Canonicalize: validate, merge duplicate strings, drop tiny coefficients."""
        if n < 1:
            raise ValueError(f"qubit count must be >= 1, got {n}")
        merged: dict[str, float] = {}
        order: list[str] = []
        for coeff, string in terms:
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff!r}")
            ops = string.ops if isinstance(string, PauliString) else str(string)
            if len(ops) != n:
                raise ValueError(
                    f"Pauli string {ops!r} has length {len(ops)}, expected {n}")
            if ops not in merged:
                merged[ops] = 0.0
                order.append(ops)
            merged[ops] += coeff
        kept = tuple((merged[s], PauliString(s)) for s in order if abs(merged[s]) > eps)
        return cls(n=n, terms=kept)

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def coefficients(self) -> dict[str, float]:
        return {ps.ops: c for c, ps in self.terms}

    @cached_property
    def _compiled(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        nt = len(self.terms)
        coeffs = np.empty(nt, dtype=np.float64)
        phases = np.empty(nt, dtype=np.complex128)
        x_masks = np.empty(nt, dtype=np.int64)
        z_masks = np.empty(nt, dtype=np.int64)
        for t, (c, ps) in enumerate(self.terms):
            x, z, ph = _pauli_masks(ps.ops)
            coeffs[t] = c
            phases[t] = ph
            x_masks[t] = x
            z_masks[t] = z
        return coeffs, phases, x_masks, z_masks

    def apply(self, state: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """Matrix-free H |psi>, term-wise over the statevector."""
        if state.shape[0] != 2 ** self.n:
            raise ValueError(
                f"state dimension {state.shape[0]} does not match {self.n} qubits")
        if out is None:
            out = np.empty_like(state)
        if not self.terms:
            out[:] = 0.0
            return out
        coeffs, phases, x_masks, z_masks = self._compiled
        return get_kernels().pauli_matvec(coeffs, phases, x_masks, z_masks, state, out)

    def expectation(self, state: np.ndarray) -> float:
        """<psi|H|psi> (real part; imaginary residue is machine noise)."""
        return float(np.real(np.vdot(state, self.apply(state))))

    def norm_bound(self) -> float:
        """Upper bound on the operator norm: sum of |coefficients|."""
        return float(sum(abs(c) for c, _ in self.terms))

    def to_matrix(self) -> np.ndarray:
        """Dense realization; guarded to small systems."""
        if self.n > DENSE_MAX_QUBITS:
            raise ValueError(
                f"dense matrix for n={self.n} exceeds the n<={DENSE_MAX_QUBITS} guard")
        dim = 2 ** self.n
        mat = np.zeros((dim, dim), dtype=complex)
        eye = np.eye(dim, dtype=complex)
        out = np.empty(dim, dtype=complex)
        for k in range(dim):
            mat[:, k] = self.apply(eye[:, k], out)
        return mat


@dataclass(frozen=True)
class FermionTerm:
    """Product of creation/annihilation operators with a real prefactor.

    ``factors`` is an ordered sequence of (mode index, kind) with kind in
    {"create", "annihilate"}; an empty sequence is the identity.
    """

    coefficient: float
    factors: tuple[tuple[int, str], ...] = field(default=())

    def __post_init__(self):
        for mode, kind in self.factors:
            if mode < 0:
                raise ValueError(f"negative mode index {mode}")
            if kind not in ("create", "annihilate"):
                raise ValueError(f"unknown operator kind {kind!r}")


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues ascending; eigenvectors as orthonormal matrix columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.eigenvectors[:, 0]


def heisenberg_xyz(n: int, coupling: Sequence[float], field_z: float = 0.0) -> PauliHamiltonian:
    """Open-chain anisotropic spin Hamiltonian.

    H = - sum_{k=0}^{n-2} (Jx X_k X_{k+1} + Jy Y_k Y_{k+1} + Jz Z_k Z_{k+1}
                           + field_z * Z_k)

    ``coupling`` is the (Jx, Jy, Jz) triple; the on-site field term runs over
    the same bond index range as the couplings and is omitted when zero.
    """
    if n < 2:
        raise ValueError(f"chain needs at least 2 sites, got n={n}")
    jx, jy, jz = (float(j) for j in coupling)
    terms: list[tuple[float, str]] = []
    for k in range(n - 1):
        for j, axis in ((jx, "X"), (jy, "Y"), (jz, "Z")):
            ops = ["I"] * n
            ops[k] = axis
            ops[k + 1] = axis
            terms.append((-j, "".join(ops)))
        if field_z != 0.0:
            ops = ["I"] * n
            ops[k] = "Z"
            terms.append((-field_z, "".join(ops)))
    return PauliHamiltonian.from_terms(n, terms)


def _jw_ladder(mode: int, n: int, kind: str) -> dict[str, complex]:
    """Pauli polynomial for one ladder operator under the parity-chain mapping.

    create:      (prod_{k<p} Z_k) (X_p - i Y_p) / 2
    annihilate:  (prod_{k<p} Z_k) (X_p + i Y_p) / 2
    """
    x_part = ["Z"] * mode + ["X"] + ["I"] * (n - mode - 1)
    y_part = ["Z"] * mode + ["Y"] + ["I"] * (n - mode - 1)
    sign = -0.5j if kind == "create" else 0.5j
    return {"".join(x_part): 0.5, "".join(y_part): sign}


def jordan_wigner(terms: Iterable[FermionTerm], n: int) -> PauliHamiltonian:
    """Map fermionic operators to a Pauli Hamiltonian via parity chains.

    The input must be Hermitian as a whole (each non-Hermitian product
    accompanied by its conjugate); otherwise the surviving imaginary parts
    trip the residue check.
    """
    total: dict[str, complex] = {}
    for term in terms:
        for mode, _ in term.factors:
            if mode >= n:
                raise ValueError(f"mode index {mode} out of range for n={n}")
        poly: dict[str, complex] = {"I" * n: complex(term.coefficient)}
        for mode, kind in term.factors:
            ladder = _jw_ladder(mode, n, kind)
            product: dict[str, complex] = {}
            for ops_a, ca in poly.items():
                for ops_b, cb in ladder.items():
                    ops, phase = multiply_pauli_strings(ops_a, ops_b)
                    product[ops] = product.get(ops, 0j) + ca * cb * phase
            poly = product
        for ops, c in poly.items():
            total[ops] = total.get(ops, 0j) + c

    real_terms: list[tuple[float, str]] = []
    for ops, c in total.items():
        if abs(c) <= COEFF_EPS:
            continue
        if abs(c.imag) >= 1e-12:
            raise ValueError(
                f"term {ops} has imaginary coefficient {c.imag:.3e}; the fermionic "
                "input is not Hermitian (supply each product with its conjugate)")
        real_terms.append((c.real, ops))
    return PauliHamiltonian.from_terms(n, real_terms)


def eigensolve_dense(h: PauliHamiltonian) -> EigenDecomposition:
    """Full spectrum by dense Hermitian diagonalization (n <= 12)."""
    if h.n > DENSE_MAX_QUBITS:
        raise ValueError(
            f"n={h.n} too large for dense diagonalization (max {DENSE_MAX_QUBITS}); "
            "use eigensolve_lanczos")
    vals, vecs = np.linalg.eigh(h.to_matrix())
    return EigenDecomposition(eigenvalues=vals, eigenvectors=vecs)


def eigensolve_lanczos(h: PauliHamiltonian, k: int = 1, tol: float = 1e-9,
                       max_iter: int | None = None, seed: int = 0) -> EigenDecomposition:
    """Lowest-k eigenpairs via Lanczos iteration on the matrix-free matvec."""
    from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

    if k < 1:
        raise ValueError("k must be >= 1")
    dim = 2 ** h.n
    if k >= dim:
        raise ValueError(f"k={k} must be below the space dimension {dim}")

    def matvec(v):
        return h.apply(np.ascontiguousarray(v, dtype=np.complex128))

    op = LinearOperator((dim, dim), matvec=matvec, dtype=np.complex128)
    rng = PortableRNG(seed)
    v0 = np.array([rng.normal() for _ in range(dim)])
    try:
        vals, vecs = eigsh(op, k=k, which="SA", v0=v0, tol=tol, maxiter=max_iter)
    except ArpackNoConvergence as exc:
        residual = float("inf")
        if len(exc.eigenvalues):
            v = exc.eigenvectors[:, 0]
            residual = float(np.linalg.norm(h.apply(v.astype(complex)) - exc.eigenvalues[0] * v))
        raise ConvergenceError(
            f"Lanczos did not converge ({len(exc.eigenvalues)}/{k} eigenpairs); "
            f"best residual {residual:.3e}", residual) from exc

    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order].astype(np.complex128)
    bound = max(h.norm_bound(), 1.0)
    for i in range(k):
        residual = float(np.linalg.norm(h.apply(vecs[:, i]) - vals[i] * vecs[:, i]))
        if residual > max(tol, 1e-12) * bound:
            raise ConvergenceError(
                f"eigenpair {i} residual {residual:.3e} exceeds tolerance", residual)
    return EigenDecomposition(eigenvalues=vals, eigenvectors=vecs)


def ground_state_energy(h: PauliHamiltonian, tol: float = 1e-9) -> float:
    """Exact ground energy: dense when small, Lanczos otherwise."""
    if h.n <= DENSE_MAX_QUBITS:
        return eigensolve_dense(h).ground_energy
    return eigensolve_lanczos(h, k=1, tol=tol).ground_energy


def save_hamiltonian(h: PauliHamiltonian, path) -> None:
    """Write the line-oriented text format (17 significant digits)."""
    lines = [str(h.n)]
    for coeff, ps in h.terms:
        lines.append(f"{coeff:.17g} {ps.ops}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def load_hamiltonian(path) -> PauliHamiltonian:
    """Parse the text format: qubit count line, then `coeff pauli-string` lines."""
    n: int | None = None
    terms: list[tuple[float, str]] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if n is None:
                try:
                    n = int(line)
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: expected qubit count, got {line!r}") from None
                if n < 1:
                    raise ValueError(f"{path}:{lineno}: qubit count must be >= 1")
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected '<coefficient> <pauli-string>', got {line!r}")
            try:
                coeff = float(fields[0])
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: bad coefficient {fields[0]!r}") from None
            ops = fields[1]
            for ch in ops:
                if ch not in PAULI_CHARS:
                    raise ValueError(
                        f"{path}:{lineno}: invalid Pauli character {ch!r} in {ops!r}")
            if len(ops) != n:
                raise ValueError(
                    f"{path}:{lineno}: string {ops!r} has length {len(ops)}, expected {n}")
            terms.append((coeff, ops))
    if n is None:
        raise ValueError(f"{path}: empty file, expected qubit count line")
    return PauliHamiltonian.from_terms(n, terms)
