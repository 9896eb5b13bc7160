"""Meta-training and adaptation.

Pre-training minimizes the batch-summed circuit cost over a task set by
backpropagating the simulator-supplied d(cost)/d(theta) through the network
(one optimizer update per batch); adaptation freezes the network and descends
the circuit parameters of a single task from a given starting point.  Both
loops emit trajectory records: cost, gap to the exact reference, gradient
norm, wall-clock per recorded step.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .embed import kl_cost_and_gradient
from .hamiltonian import PauliHamiltonian, ground_state_energy
from .learner import AdamState, LearnerNet, adam_step, backward, forward
from .rng import PortableRNG, derive_seed
from .simulator import ADJOINT, expectation_and_gradient
from .taskspace import KIND_DISTRIBUTION, TaskSet, TaskVector

INIT_KINDS = ("zero", "pi", "reduced-uniform", "gaussian")


@dataclass
class PretrainConfig:
    epochs: int = 30
    learning_rate: float = 1e-3
    batch_size: int = 16
    seed: int = 0
    gradient_method: str = ADJOINT
    checkpoint_rule: str = "last"  # or "min-loss"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.checkpoint_rule not in ("last", "min-loss"):
            raise ValueError(f"unknown checkpoint rule {self.checkpoint_rule!r}")


@dataclass
class AdaptConfig:
    iterations: int = 2000
    learning_rate: float = 1e-3
    seed: int = 0
    gradient_method: str = ADJOINT
    record_stride: int = 10

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.record_stride < 1:
            raise ValueError("record stride must be >= 1")


@dataclass
class TrajectoryRecord:
    """Per-step history; ``wall_ms`` is elapsed time and is stored separately
    from the deterministic columns when written to disk."""

    steps: list[int] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)
    wall_ms: list[float] = field(default_factory=list)

    def append(self, step: int, cost: float, gap: float, grad_norm: float,
               wall: float) -> None:
        if self.steps and step <= self.steps[-1]:
            raise ValueError(f"step {step} not increasing after {self.steps[-1]}")
        for name, value in (("cost", cost), ("gap", gap), ("grad_norm", grad_norm)):
            if not math.isfinite(value):
                raise RuntimeError(
                    f"non-finite {name} ({value}) at step {step}; aborting")
        self.steps.append(step)
        self.costs.append(float(cost))
        self.gaps.append(float(gap))
        self.grad_norms.append(float(grad_norm))
        self.wall_ms.append(float(wall))

    def __len__(self) -> int:
        return len(self.steps)

    def at_step(self, step: int) -> tuple[float, float, float]:
        """(cost, gap, grad_norm) of a recorded step."""
        i = self.steps.index(step)
        return self.costs[i], self.gaps[i], self.grad_norms[i]


def write_trajectory_csv(traj: TrajectoryRecord, path) -> None:
    """Deterministic columns only; identical runs produce identical bytes."""
    lines = ["step,cost,gap,grad_norm"]
    for i in range(len(traj)):
        lines.append(f"{traj.steps[i]},{traj.costs[i]:.17g},"
                     f"{traj.gaps[i]:.17g},{traj.grad_norms[i]:.17g}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def write_timing_csv(traj: TrajectoryRecord, path) -> None:
    lines = ["step,wall_ms"]
    for step, wall in zip(traj.steps, traj.wall_ms):
        lines.append(f"{step},{wall:.3f}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# cost dispatch

def task_cost_and_gradient(task: TaskVector, circuit, theta: np.ndarray,
                           method: str = ADJOINT) -> tuple[float, np.ndarray]:
    """Energy for Hamiltonian tasks, divergence for distribution tasks."""
    if task.kind == KIND_DISTRIBUTION:
        return kl_cost_and_gradient(circuit, theta, task.target)
    return expectation_and_gradient(circuit, theta, task.hamiltonian, method)


def task_reference(task: TaskVector) -> float:
    """The exact optimum the gap is measured against (0 for divergences)."""
    if task.kind == KIND_DISTRIBUTION:
        return 0.0
    return ground_state_energy(task.hamiltonian)


# ---------------------------------------------------------------------------
# pre-training (the meta loop)

def pretrain(tasks: TaskSet, circuit, net: LearnerNet,
             cfg: PretrainConfig) -> tuple[LearnerNet, TrajectoryRecord]:
    """Train the network so its emitted parameters minimize the summed cost.

    Per epoch the train split is shuffled and partitioned into batches; for
    every task in a batch the circuit cost and its d(cost)/d(theta) are
    evaluated at theta = net(phi), backpropagated, summed, and applied as one
    optimizer update.  Epoch records hold the full-train-set average cost,
    gap, and circuit gradient norm measured at the start of the epoch; a
    final record is appended after the last update.
    """
    if net.output_size != circuit.num_params:
        raise ValueError(f"net emits {net.output_size} parameters, "
                         f"circuit expects {circuit.num_params}")
    if net.input_size != tasks.phi_length:
        raise ValueError(f"net expects input {net.input_size}, "
                         f"task vectors have length {tasks.phi_length}")
    if circuit.n != tasks.n:
        raise ValueError(f"circuit acts on {circuit.n} qubits, tasks on {tasks.n}")
    train = tasks.train
    if not train:
        raise ValueError("task set has no train split")

    net = net.copy()
    refs = [task_reference(t) for t in train]
    rng = PortableRNG(derive_seed(cfg.seed, "pretrain"))
    adam = AdamState.for_parameters(net.parameters(), cfg.learning_rate)
    batch_size = min(cfg.batch_size, len(train))
    batches_per_epoch = math.ceil(len(train) / batch_size)

    traj = TrajectoryRecord()
    best_cost = math.inf
    best_params = None
    start = time.perf_counter()

    def record(step: int) -> float:
        costs = np.empty(len(train))
        norms = np.empty(len(train))
        for i, task in enumerate(train):
            theta = forward(net, task.phi)
            cost, grad = task_cost_and_gradient(task, circuit, theta,
                                                cfg.gradient_method)
            costs[i] = cost
            norms[i] = np.linalg.norm(grad)
        mean_cost = float(np.mean(costs))
        mean_gap = float(np.mean(costs - np.asarray(refs)))
        traj.append(step, mean_cost, mean_gap, float(np.mean(norms)),
                    (time.perf_counter() - start) * 1e3)
        return mean_cost

    for epoch in range(cfg.epochs):
        mean_cost = record(epoch)
        if mean_cost < best_cost:
            best_cost = mean_cost
            best_params = [p.copy() for p in net.parameters()]

        order = list(range(len(train)))
        rng.shuffle(order)
        for b in range(batches_per_epoch):
            batch = order[b * batch_size:(b + 1) * batch_size]
            grad_total = None
            for idx in batch:
                task = train[idx]
                theta = forward(net, task.phi)
                cost, dtheta = task_cost_and_gradient(task, circuit, theta,
                                                      cfg.gradient_method)
                if not math.isfinite(cost):
                    raise RuntimeError(
                        f"non-finite cost {cost} on task {idx} in epoch {epoch}")
                grads = backward(net, task.phi, dtheta)
                if grad_total is None:
                    grad_total = grads
                else:
                    for g_sum, g in zip(grad_total, grads):
                        g_sum += g
            net.set_parameters(adam_step(adam, net.parameters(), grad_total))

    final_cost = record(cfg.epochs)
    if final_cost < best_cost:
        best_cost = final_cost
        best_params = [p.copy() for p in net.parameters()]
    if cfg.checkpoint_rule == "min-loss":
        net.set_parameters(best_params)
    return net, traj


def batch_weight_gradient(tasks, circuit, net: LearnerNet,
                          method: str = ADJOINT) -> list[np.ndarray]:
    """Summed weight gradient of a task batch, exposed for linearity checks."""
    total = None
    for task in tasks:
        theta = forward(net, task.phi)
        _, dtheta = task_cost_and_gradient(task, circuit, theta, method)
        grads = backward(net, task.phi, dtheta)
        if total is None:
            total = grads
        else:
            for g_sum, g in zip(total, grads):
                g_sum += g
    return total


# ---------------------------------------------------------------------------
# adaptation (per-task fine-tuning)

def adapt(task, circuit, theta0: np.ndarray,
          cfg: AdaptConfig, reference: float | None = None
          ) -> tuple[np.ndarray, TrajectoryRecord]:
    """Descend the circuit cost of one task from ``theta0``.

    ``task`` may be a TaskVector or a bare PauliHamiltonian.  The record
    holds entries at step 0, every ``record_stride`` steps, and the final
    step; the network (if any produced theta0) is never touched.
    """
    if isinstance(task, PauliHamiltonian):
        cost_fn = lambda th: expectation_and_gradient(  # noqa: E731
            circuit, th, task, cfg.gradient_method)
        ref = ground_state_energy(task) if reference is None else reference
    else:
        cost_fn = lambda th: task_cost_and_gradient(  # noqa: E731
            task, circuit, th, cfg.gradient_method)
        ref = task_reference(task) if reference is None else reference

    theta = np.array(theta0, dtype=np.float64)
    if theta.shape != (circuit.num_params,):
        raise ValueError(f"theta0 has shape {theta.shape}, "
                         f"circuit expects ({circuit.num_params},)")
    adam = AdamState.for_parameters([theta], cfg.learning_rate)
    traj = TrajectoryRecord()
    start = time.perf_counter()

    for step in range(cfg.iterations):
        cost, grad = cost_fn(theta)
        if step % cfg.record_stride == 0:
            traj.append(step, cost, cost - ref, float(np.linalg.norm(grad)),
                        (time.perf_counter() - start) * 1e3)
        theta = adam_step(adam, [theta], [grad])[0]

    cost, grad = cost_fn(theta)
    traj.append(cfg.iterations, cost, cost - ref, float(np.linalg.norm(grad)),
                (time.perf_counter() - start) * 1e3)
    return theta, traj


# ---------------------------------------------------------------------------
# initializers

def gaussian_variance(s: int, layers: int) -> float:
    """Variance 1 / (4 S (L + 2)) of the narrow-Gaussian baseline."""
    if s < 1 or layers < 1:
        raise ValueError("S and L must be positive")
    return 1.0 / (4.0 * s * (layers + 2))


def baseline_init(kind: str, num_params: int, seed: int = 0,
                  alpha: float = 0.05, s: int | None = None,
                  layers: int | None = None) -> np.ndarray:
    """Reference initialization strategies the meta-learned one is compared to."""
    if kind == "zero":
        return np.zeros(num_params)
    if kind == "pi":
        return np.full(num_params, math.pi)
    rng = PortableRNG(derive_seed(seed, f"init-{kind}"))
    if kind == "reduced-uniform":
        bound = alpha * math.pi
        return np.array([rng.uniform(-bound, bound) for _ in range(num_params)])
    if kind == "gaussian":
        if s is None or layers is None:
            raise ValueError("gaussian initialization requires s and layers")
        sigma = math.sqrt(gaussian_variance(s, layers))
        return np.array([rng.normal(0.0, sigma) for _ in range(num_params)])
    raise ValueError(f"unknown initializer {kind!r}")


def learner_init(net: LearnerNet, phi: np.ndarray) -> np.ndarray:
    """The meta-learned initializer; plain forwarding so harnesses can treat
    every initializer uniformly."""
    return forward(net, phi)


# ---------------------------------------------------------------------------
# diagnostics

@dataclass(frozen=True)
class InitializerStatistics:
    name: str
    mean: float
    variance: float
    bin_edges: np.ndarray
    counts: np.ndarray


def parameter_statistics(theta_sets: dict[str, list[np.ndarray]],
                         bins: int = 20) -> list[InitializerStatistics]:
    """Pooled mean/variance and histogram per initializer."""
    out = []
    for name, thetas in theta_sets.items():
        pooled = np.concatenate([np.asarray(t, dtype=float).ravel()
                                 for t in thetas])
        lo = float(pooled.min())
        hi = float(pooled.max())
        if lo == hi:
            edges = np.array([lo - 0.5, hi + 0.5])
            counts = np.array([pooled.size])
        else:
            counts, edges = np.histogram(pooled, bins=bins, range=(lo, hi))
        out.append(InitializerStatistics(
            name=name, mean=float(pooled.mean()), variance=float(pooled.var()),
            bin_edges=edges, counts=counts))
    return out


def write_statistics_csv(stats: list[InitializerStatistics], path) -> None:
    lines = ["initializer,mean,variance,bin_lo,bin_hi,count"]
    for st in stats:
        for b in range(st.counts.size):
            lines.append(f"{st.name},{st.mean:.17g},{st.variance:.17g},"
                         f"{st.bin_edges[b]:.17g},{st.bin_edges[b + 1]:.17g},"
                         f"{st.counts[b]}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class GradientNormSweep:
    norms: np.ndarray
    mean: float


def gradient_norm_sweep(source, tasks, circuit,
                        method: str = ADJOINT) -> GradientNormSweep:
    """Circuit gradient norm at the initialization point of every task.

    ``source`` is a LearnerNet (per-task theta from the task vector), a fixed
    parameter vector, or a callable task -> theta.
    """
    norms = np.empty(len(tasks))
    for i, task in enumerate(tasks):
        if isinstance(source, LearnerNet):
            theta = forward(source, task.phi)
        elif callable(source):
            theta = source(task)
        else:
            theta = np.asarray(source, dtype=float)
        _, grad = task_cost_and_gradient(task, circuit, theta, method)
        norms[i] = np.linalg.norm(grad)
    return GradientNormSweep(norms=norms, mean=float(np.mean(norms)))
