"""Parameterized circuit descriptions and the three ansatz families.

A circuit is an ordered gate list over n qubits with P parameter slots; each
slot feeds exactly one gate argument.  Rotation-like gates follow the
exp(-i theta/2 * G) convention with generator G, and a composite rotation
ROT(a, b, g) means RZ(g) RY(b) RZ(a) acting right-to-left on the state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

# Parameterized kinds carry one slot, except ROT which carries three.
PARAM_KINDS = ("RX", "RY", "RZ", "ROT", "XX", "YY", "ZZ")
FIXED_KINDS = ("CNOT", "CZ")

FAMILY_XYZ = "xyz-blocks"
FAMILY_ENTANGLING = "strongly-entangling"
FAMILY_TWO_DESIGN = "simplified-two-design"


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    slots: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind in PARAM_KINDS:
            want = 3 if self.kind == "ROT" else 1
            if len(self.slots) != want:
                raise ValueError(f"{self.kind} needs {want} slot(s), got {len(self.slots)}")
        elif self.kind in FIXED_KINDS:
            if self.slots:
                raise ValueError(f"{self.kind} takes no parameter slots")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        want_q = 1 if self.kind in ("RX", "RY", "RZ", "ROT") else 2
        if len(self.qubits) != want_q:
            raise ValueError(f"{self.kind} acts on {want_q} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit in {self.qubits}")


@dataclass(frozen=True)
class AnsatzCircuit:
    n: int
    gates: tuple[Gate, ...]
    num_params: int
    family: str = "custom"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("circuit needs at least one qubit")
        seen: set[int] = set()
        for gate in self.gates:
            for q in gate.qubits:
                if not 0 <= q < self.n:
                    raise ValueError(f"qubit {q} out of range for n={self.n}")
            for s in gate.slots:
                if not 0 <= s < self.num_params:
                    raise ValueError(f"slot {s} out of range for P={self.num_params}")
                if s in seen:
                    raise ValueError(f"parameter slot {s} used more than once")
                seen.add(s)
        if len(seen) != self.num_params:
            raise ValueError(
                f"{self.num_params} slots declared but {len(seen)} used")

    def gate_count(self) -> int:
        return len(self.gates)


def build_xyz_ansatz(n: int, layers: int) -> AnsatzCircuit:
    """Blocks of two-qubit XX/YY/ZZ rotations on every adjacent pair.

    Each block walks the bonds (0,1), (1,2), ... in order and spends three
    fresh slots per bond, so P = 3 (n-1) layers.
    """
    if n < 2:
        raise ValueError("xyz ansatz needs n >= 2")
    if layers < 1:
        raise ValueError("layers must be >= 1")
    gates: list[Gate] = []
    slot = 0
    for _ in range(layers):
        for k in range(n - 1):
            for kind in ("XX", "YY", "ZZ"):
                gates.append(Gate(kind, (k, k + 1), (slot,)))
                slot += 1
    return AnsatzCircuit(n=n, gates=tuple(gates), num_params=slot, family=FAMILY_XYZ)


def build_strongly_entangling(n: int, layers: int,
                              ranges: Sequence[int] | None = None) -> AnsatzCircuit:
    """Per layer: a general rotation on every qubit, then a CNOT ring.

    The ring connects k -> (k + offset) mod n; offsets default to the cycle
    1, 2, ..., n-1, 1, ...  P = 3 n layers.
    """
    if n < 2:
        raise ValueError("strongly-entangling ansatz needs n >= 2")
    if layers < 1:
        raise ValueError("layers must be >= 1")
    if ranges is None:
        ranges = [(layer % (n - 1)) + 1 for layer in range(layers)]
    elif len(ranges) != layers:
        raise ValueError(f"need {layers} offsets, got {len(ranges)}")
    gates: list[Gate] = []
    slot = 0
    for layer in range(layers):
        for q in range(n):
            gates.append(Gate("ROT", (q,), (slot, slot + 1, slot + 2)))
            slot += 3
        offset = ranges[layer] % n
        if offset == 0:
            raise ValueError("entangling offset must be nonzero mod n")
        for q in range(n):
            gates.append(Gate("CNOT", (q, (q + offset) % n)))
    return AnsatzCircuit(n=n, gates=tuple(gates), num_params=slot,
                         family=FAMILY_ENTANGLING)


def build_simplified_two_design(n: int, layers: int) -> AnsatzCircuit:
    """Initial RY on every qubit, then brickwork CZ + RY pair layers.

    Per layer the even bonds (0,1), (2,3), ... then the odd bonds (1,2),
    (3,4), ... each get a CZ followed by an RY on both endpoints.  Gate count
    is n + 3 (n-1) layers and P = n + 2 (n-1) layers.
    """
    if n < 2:
        raise ValueError("simplified-two-design ansatz needs n >= 2")
    if layers < 1:
        raise ValueError("layers must be >= 1")
    gates: list[Gate] = []
    slot = 0
    for q in range(n):
        gates.append(Gate("RY", (q,), (slot,)))
        slot += 1
    for _ in range(layers):
        for start in (0, 1):
            for k in range(start, n - 1, 2):
                gates.append(Gate("CZ", (k, k + 1)))
                gates.append(Gate("RY", (k,), (slot,)))
                gates.append(Gate("RY", (k + 1,), (slot + 1,)))
                slot += 2
    return AnsatzCircuit(n=n, gates=tuple(gates), num_params=slot,
                         family=FAMILY_TWO_DESIGN)


def gate_count(circuit: AnsatzCircuit) -> int:
    """Number of gate entries (a composite rotation counts once)."""
    return circuit.gate_count()


def mottonen_gate_count(n: int) -> int:
    """Gate cost of exact amplitude embedding on n qubits: 2^(n+1) - 3."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2 ** (n + 1) - 3


def build_ansatz(family: str, n: int, layers: int,
                 ranges: Iterable[int] | None = None) -> AnsatzCircuit:
    """Dispatch on family tag; used by config-driven entry points."""
    if family == FAMILY_XYZ:
        return build_xyz_ansatz(n, layers)
    if family == FAMILY_ENTANGLING:
        return build_strongly_entangling(n, layers,
                                         list(ranges) if ranges is not None else None)
    if family == FAMILY_TWO_DESIGN:
        return build_simplified_two_design(n, layers)
    raise ValueError(f"unknown ansatz family {family!r}")
