"""Task vectors, task sampling, distances, and the continuity probe.

A task is a Hamiltonian (or target distribution) together with the real
vector that indexes it: the coupling triple for spin chains, the padded
coefficient vector for ingested molecule Hamiltonians, the probability
vector itself for distribution-matching tasks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hamiltonian import PauliHamiltonian, heisenberg_xyz, load_hamiltonian
from .rng import PortableRNG

KIND_HEISENBERG = "heisenberg-J"
KIND_MOLECULE = "molecule-C"
KIND_DISTRIBUTION = "distribution-target"

MANIFEST_HEADER = "QMAML-TASKSET v1"


@dataclass(frozen=True)
class TaskVector:
    phi: np.ndarray
    kind: str
    hamiltonian: PauliHamiltonian | None = None
    target: np.ndarray | None = None
    source: str | None = None

    def __post_init__(self):
        if self.kind not in (KIND_HEISENBERG, KIND_MOLECULE, KIND_DISTRIBUTION):
            raise ValueError(f"unknown task kind {self.kind!r}")
        if self.kind == KIND_HEISENBERG and self.phi.shape != (3,):
            raise ValueError("spin-chain task vector must be a coupling triple")
        if self.kind == KIND_DISTRIBUTION:
            if self.target is None:
                raise ValueError("distribution task needs a target vector")
            if abs(float(np.sum(self.target)) - 1.0) > 1e-9:
                raise ValueError("target distribution must sum to 1")


@dataclass(frozen=True)
class TaskSet:
    tasks: tuple[TaskVector, ...]
    split: tuple[str, ...]
    n: int
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.tasks:
            raise ValueError("task set is empty")
        if len(self.split) != len(self.tasks):
            raise ValueError("split tags must align with tasks")
        kinds = {t.kind for t in self.tasks}
        if len(kinds) != 1:
            raise ValueError(f"mixed task kinds {kinds}")
        for tag in self.split:
            if tag not in ("train", "test"):
                raise ValueError(f"unknown split tag {tag!r}")

    @property
    def kind(self) -> str:
        return self.tasks[0].kind

    @property
    def phi_length(self) -> int:
        return int(self.tasks[0].phi.shape[0])

    @property
    def train(self) -> tuple[TaskVector, ...]:
        return tuple(t for t, s in zip(self.tasks, self.split) if s == "train")

    @property
    def test(self) -> tuple[TaskVector, ...]:
        return tuple(t for t, s in zip(self.tasks, self.split) if s == "test")


def _split_tags(count: int, test_count: int, rng: PortableRNG) -> list[str]:
    if not 0 <= test_count <= count:
        raise ValueError(f"test_count {test_count} out of range for {count} tasks")
    indices = list(range(count))
    rng.shuffle(indices)
    test_idx = set(indices[:test_count])
    return ["test" if i in test_idx else "train" for i in range(count)]


def sample_heisenberg_tasks(count: int, n: int, seed: int, lo: float = -3.0,
                            hi: float = 3.0, step: float = 0.1,
                            test_count: int = 0) -> TaskSet:
    """Draw coupling triples uniformly from the lattice {lo, lo+step, ..., hi}.

    Duplicates are allowed; every component lands exactly on the lattice.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if step <= 0:
        raise ValueError("step must be positive")
    points = (hi - lo) / step
    if abs(points - round(points)) > 1e-9:
        raise ValueError(f"step {step} does not divide the range [{lo}, {hi}]")
    num_points = int(round(points)) + 1

    rng = PortableRNG(seed)
    tasks = []
    for _ in range(count):
        coupling = np.array([lo + step * rng.integer(num_points) for _ in range(3)])
        tasks.append(TaskVector(phi=coupling, kind=KIND_HEISENBERG,
                                hamiltonian=heisenberg_xyz(n, coupling)))
    tags = _split_tags(count, test_count, rng.spawn("split"))
    meta = {"seed": str(seed), "lo": repr(lo), "hi": repr(hi), "step": repr(step),
            "count": str(count), "test_count": str(test_count)}
    return TaskSet(tasks=tuple(tasks), split=tuple(tags), n=n, meta=meta)


def molecule_tasks_from_files(paths, max_len: int | None = None,
                              test_fraction: float = 0.0, seed: int = 0) -> TaskSet:
    """Ingest Hamiltonian files; phi is the coefficient vector zero-padded on
    the right to the longest term list (or to ``max_len``)."""
    paths = [Path(p) for p in paths]
    if not paths:
        raise ValueError("no Hamiltonian files given")
    hams = [load_hamiltonian(p) for p in paths]
    n = hams[0].n
    for p, h in zip(paths, hams):
        if h.n != n:
            raise ValueError(f"{p}: qubit count {h.n} differs from {n}")
    longest = max(h.num_terms for h in hams)
    if max_len is None:
        max_len = longest
    elif longest > max_len:
        raise ValueError(
            f"a file has {longest} terms, exceeding declared max_len {max_len}")

    tasks = []
    for p, h in zip(paths, hams):
        phi = np.zeros(max_len)
        phi[:h.num_terms] = [c for c, _ in h.terms]
        tasks.append(TaskVector(phi=phi, kind=KIND_MOLECULE, hamiltonian=h,
                                source=str(p)))
    test_count = int(round(test_fraction * len(paths)))
    tags = _split_tags(len(paths), test_count, PortableRNG(seed).spawn("split"))
    meta = {"seed": str(seed), "test_fraction": repr(test_fraction),
            "max_len": str(max_len)}
    return TaskSet(tasks=tuple(tasks), split=tuple(tags), n=n, meta=meta)


def distribution_taskset(targets, n: int, seed: int = 0, test_count: int = 0,
                         meta: dict[str, str] | None = None) -> TaskSet:
    """Wrap probability vectors (or objects exposing ``.p``) as tasks."""
    vectors = [np.asarray(getattr(t, "p", t), dtype=float) for t in targets]
    tasks = tuple(TaskVector(phi=v, kind=KIND_DISTRIBUTION, target=v)
                  for v in vectors)
    tags = _split_tags(len(tasks), test_count, PortableRNG(seed).spawn("split"))
    return TaskSet(tasks=tasks, split=tuple(tags), n=n, meta=dict(meta or {}))


# ---------------------------------------------------------------------------
# distances

def hilbert_schmidt_overlap(h1: PauliHamiltonian, h2: PauliHamiltonian,
                            normalized: bool = True) -> float:
    """Re Tr(H1^dag H2), term-wise via Pauli orthogonality Tr(Pa Pb) = 2^n d_ab.

    Normalized form divides by the Hilbert-Schmidt norms, giving a scale-free
    overlap in [-1, 1]; the raw form keeps the 2^n trace factor.
    """
    if h1.n != h2.n:
        raise ValueError(f"qubit counts differ: {h1.n} vs {h2.n}")
    c1 = h1.coefficients()
    c2 = h2.coefficients()
    dot = sum(c1[s] * c2[s] for s in c1.keys() & c2.keys())
    if not normalized:
        return float(dot * 2 ** h1.n)
    norm1 = math.sqrt(sum(c * c for c in c1.values()))
    norm2 = math.sqrt(sum(c * c for c in c2.values()))
    if norm1 == 0.0 or norm2 == 0.0:
        raise ValueError("normalized overlap undefined for a zero Hamiltonian")
    return float(dot / (norm1 * norm2))


# Backwards-friendly alias matching the operation name used elsewhere.
hamiltonian_distance = hilbert_schmidt_overlap


def hilbert_schmidt_metric(h1: PauliHamiltonian, h2: PauliHamiltonian) -> float:
    """||H1 - H2||_HS / 2^(n/2): the actual metric induced by the overlap.

    Term-wise this is the l2 norm of the coefficient difference vector.
    """
    if h1.n != h2.n:
        raise ValueError(f"qubit counts differ: {h1.n} vs {h2.n}")
    c1 = h1.coefficients()
    c2 = h2.coefficients()
    return math.sqrt(sum((c1.get(s, 0.0) - c2.get(s, 0.0)) ** 2
                         for s in c1.keys() | c2.keys()))


PAPER_SUM = "paper-sum"
L2 = "l2"


def parameter_distance(phi1, phi2, variant: str = PAPER_SUM) -> float:
    """Task-vector distance.

    ``paper-sum`` is the signed elementwise sum of differences, kept verbatim
    for figure reproduction; it is not a metric (it can vanish for distinct
    vectors).  ``l2`` is the Euclidean norm, used wherever monotonicity
    matters.
    """
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    if phi1.shape != phi2.shape:
        raise ValueError(f"length mismatch: {phi1.shape} vs {phi2.shape}")
    if variant == PAPER_SUM:
        return float(np.sum(phi1 - phi2))
    if variant == L2:
        return float(np.linalg.norm(phi1 - phi2))
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# continuity probe

def _pearson(a: np.ndarray, b: np.ndarray) -> float | None:
    if a.size < 2:
        return None
    sa = np.std(a)
    sb = np.std(b)
    if sa == 0.0 or sb == 0.0:
        return None
    return float(np.mean((a - np.mean(a)) * (b - np.mean(b))) / (sa * sb))


@dataclass(frozen=True)
class ProbeResult:
    """Scatter rows plus the two correlation summaries.

    ``pearson_overlap`` pairs the l2 vector distance with (1 - normalized
    overlap); ``pearson_metric`` pairs it with the Hilbert-Schmidt metric
    distance.  Either is None when undefined (fewer than two samples or a
    degenerate scatter).
    """

    center: np.ndarray
    d_phi_sum: np.ndarray
    d_phi_l2: np.ndarray
    d_h_norm: np.ndarray
    d_h_metric: np.ndarray
    pearson_overlap: float | None
    pearson_metric: float | None


def continuity_probe(center, sampler: str, count: int, seed: int,
                     n: int = 6) -> ProbeResult:
    """Sample coupling triples around ``center`` and pair vector distances
    with operator distances of the induced spin-chain Hamiltonians.

    ``sampler`` is "uniform" (components U(-3, 5)) or "normal" (N(1, 1)).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    center = np.asarray(center, dtype=float)
    h_center = heisenberg_xyz(n, center)
    rng = PortableRNG(seed)

    d_sum = np.empty(count)
    d_l2 = np.empty(count)
    d_norm = np.empty(count)
    d_metric = np.empty(count)
    for i in range(count):
        if sampler == "uniform":
            coupling = np.array([rng.uniform(-3.0, 5.0) for _ in range(3)])
        elif sampler == "normal":
            coupling = np.array([rng.normal(1.0, 1.0) for _ in range(3)])
        else:
            raise ValueError(f"unknown sampler {sampler!r}")
        h = heisenberg_xyz(n, coupling)
        d_sum[i] = parameter_distance(center, coupling, PAPER_SUM)
        d_l2[i] = parameter_distance(center, coupling, L2)
        d_norm[i] = hilbert_schmidt_overlap(h_center, h)
        d_metric[i] = hilbert_schmidt_metric(h_center, h)

    return ProbeResult(
        center=center,
        d_phi_sum=d_sum,
        d_phi_l2=d_l2,
        d_h_norm=d_norm,
        d_h_metric=d_metric,
        pearson_overlap=_pearson(d_l2, 1.0 - d_norm),
        pearson_metric=_pearson(d_l2, d_metric),
    )


def write_probe_csv(result: ProbeResult, path) -> None:
    lines = ["d_phi_sum,d_phi_l2,d_H_norm,d_H_metric"]
    for i in range(result.d_phi_sum.size):
        lines.append(f"{result.d_phi_sum[i]:.17g},{result.d_phi_l2[i]:.17g},"
                     f"{result.d_h_norm[i]:.17g},{result.d_h_metric[i]:.17g}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# manifest I/O

def save_taskset(ts: TaskSet, path) -> None:
    path = Path(path)
    lines = [MANIFEST_HEADER,
             f"kind {ts.kind}",
             f"n {ts.n}",
             f"phi_len {ts.phi_length}"]
    for key in sorted(ts.meta):
        lines.append(f"meta {key} {ts.meta[key]}")
    for task, tag in zip(ts.tasks, ts.split):
        if task.source is not None:
            try:
                ref = str(Path(task.source).relative_to(path.parent))
            except ValueError:
                ref = str(task.source)
        else:
            ref = "-"
        values = " ".join(f"{v:.17g}" for v in task.phi)
        lines.append(f"task {tag} {ref} {values}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def load_taskset(path) -> TaskSet:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f if line.strip()]
    if not lines or lines[0] != MANIFEST_HEADER:
        raise ValueError(f"{path}: not a task-set manifest")
    kind = n = phi_len = None
    meta: dict[str, str] = {}
    tasks: list[TaskVector] = []
    tags: list[str] = []
    for line in lines[1:]:
        fields = line.split()
        if fields[0] == "kind":
            kind = fields[1]
        elif fields[0] == "n":
            n = int(fields[1])
        elif fields[0] == "phi_len":
            phi_len = int(fields[1])
        elif fields[0] == "meta":
            meta[fields[1]] = " ".join(fields[2:])
        elif fields[0] == "task":
            tag, ref = fields[1], fields[2]
            phi = np.array([float(v) for v in fields[3:]])
            if phi_len is not None and phi.size != phi_len:
                raise ValueError(
                    f"{path}: task has {phi.size} values, expected {phi_len}")
            if kind == KIND_HEISENBERG:
                task = TaskVector(phi=phi, kind=kind,
                                  hamiltonian=heisenberg_xyz(n, phi))
            elif kind == KIND_MOLECULE:
                source = path.parent / ref
                task = TaskVector(phi=phi, kind=kind,
                                  hamiltonian=load_hamiltonian(source),
                                  source=str(source))
            elif kind == KIND_DISTRIBUTION:
                task = TaskVector(phi=phi, kind=kind, target=phi)
            else:
                raise ValueError(f"{path}: task line before kind line")
            tasks.append(task)
            tags.append(tag)
        else:
            raise ValueError(f"{path}: unrecognized line {line!r}")
    if n is None:
        raise ValueError(f"{path}: missing qubit count")
    return TaskSet(tasks=tuple(tasks), split=tuple(tags), n=n, meta=meta)
