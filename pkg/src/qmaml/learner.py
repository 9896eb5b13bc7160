"""The classical network mapping task vectors to circuit parameters.

A small fully connected net: leaky-rectifier hidden layers and, by default, a
pi * tanh output squashing so every emitted parameter is a valid angle in
(-pi, pi).  Forward/backward are hand-rolled numpy; the backward pass takes
the upstream cost gradient d(cost)/d(theta) supplied by the circuit simulator
and returns gradients for every weight tensor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import PortableRNG

CHECKPOINT_HEADER = "QMAML-LEARNER v1"
LEAKY_SLOPE = 0.01

ACTIVATIONS = ("leaky-relu",)
SCALINGS = ("tanh-pi", "linear")


@dataclass
class LearnerNet:
    """Weights of the task-to-parameters network.

    ``layer_sizes`` is (d_in, hidden..., P); ``weights[i]`` has shape
    (layer_sizes[i+1], layer_sizes[i]).
    """

    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "leaky-relu"
    scaling: str = "tanh-pi"

    def __post_init__(self):
        if len(self.layer_sizes) < 2:
            raise ValueError("need at least input and output layers")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.scaling not in SCALINGS:
            raise ValueError(f"unknown output scaling {self.scaling!r}")
        expected = list(zip(self.layer_sizes[1:], self.layer_sizes[:-1]))
        got = [w.shape for w in self.weights]
        if got != expected:
            raise ValueError(f"weight shapes {got} do not match layers {expected}")
        if [b.shape for b in self.biases] != [(s,) for s in self.layer_sizes[1:]]:
            raise ValueError("bias shapes do not match layer sizes")

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]

    def parameters(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def set_parameters(self, params: list[np.ndarray]) -> None:
        if len(params) != 2 * len(self.weights):
            raise ValueError("parameter list length mismatch")
        for i in range(len(self.weights)):
            self.weights[i] = params[2 * i]
            self.biases[i] = params[2 * i + 1]

    def copy(self) -> "LearnerNet":
        return LearnerNet(layer_sizes=self.layer_sizes,
                          weights=[w.copy() for w in self.weights],
                          biases=[b.copy() for b in self.biases],
                          activation=self.activation,
                          scaling=self.scaling)


def create_learner(layer_sizes, seed: int, activation: str = "leaky-relu",
                   scaling: str = "tanh-pi") -> LearnerNet:
    """Seeded fan-in uniform weights U[-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    rng = PortableRNG(seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        w = np.array([[rng.uniform(-bound, bound) for _ in range(fan_in)]
                      for _ in range(fan_out)])
        weights.append(w)
        biases.append(np.zeros(fan_out))
    return LearnerNet(layer_sizes=sizes, weights=weights, biases=biases,
                      activation=activation, scaling=scaling)


def _leaky(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, z, LEAKY_SLOPE * z)


def _leaky_grad(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, 1.0, LEAKY_SLOPE)


def _forward_trace(net: LearnerNet, phi: np.ndarray):
    activations = [phi]
    pre_acts = []
    a = phi
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = w @ a + b
        pre_acts.append(z)
        a = z if i == last else _leaky(z)
        activations.append(a)
    if net.scaling == "tanh-pi":
        theta = math.pi * np.tanh(pre_acts[-1])
    else:
        theta = pre_acts[-1]
    return theta, activations, pre_acts


def forward(net: LearnerNet, phi: np.ndarray) -> np.ndarray:
    """theta = net(phi); deterministic, length P."""
    phi = np.asarray(phi, dtype=np.float64)
    if phi.shape != (net.input_size,):
        raise ValueError(
            f"input has length {phi.shape[0] if phi.ndim == 1 else phi.shape}, "
            f"expected {net.input_size}")
    theta, _, _ = _forward_trace(net, phi)
    return theta


def backward(net: LearnerNet, phi: np.ndarray,
             upstream: np.ndarray) -> list[np.ndarray]:
    """Gradients of (upstream . theta) w.r.t. every weight tensor.

    ``upstream`` is d(cost)/d(theta) of length P; the return order matches
    ``net.parameters()``.
    """
    phi = np.asarray(phi, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    if phi.shape != (net.input_size,):
        raise ValueError(f"input length {phi.shape}, expected {net.input_size}")
    if upstream.shape != (net.output_size,):
        raise ValueError(
            f"upstream length {upstream.shape}, expected {net.output_size}")
    _, activations, pre_acts = _forward_trace(net, phi)

    if net.scaling == "tanh-pi":
        t = np.tanh(pre_acts[-1])
        dz = upstream * math.pi * (1.0 - t * t)
    else:
        dz = upstream.copy()

    grads: list[np.ndarray] = [None] * (2 * len(net.weights))
    for i in range(len(net.weights) - 1, -1, -1):
        grads[2 * i] = np.outer(dz, activations[i])
        grads[2 * i + 1] = dz
        if i > 0:
            da = net.weights[i].T @ dz
            dz = da * _leaky_grad(pre_acts[i - 1])
    return grads


@dataclass
class AdamState:
    """First/second moment accumulators mirroring a parameter list."""

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_parameters(cls, params: list[np.ndarray],
                       learning_rate: float = 1e-3) -> "AdamState":
        return cls(learning_rate=learning_rate,
                   m=[np.zeros_like(p) for p in params],
                   v=[np.zeros_like(p) for p in params])


def adam_step(state: AdamState, params: list[np.ndarray],
              grads: list[np.ndarray]) -> list[np.ndarray]:
    """One bias-corrected update; descends along positive gradients."""
    if len(params) != len(state.m) or len(grads) != len(params):
        raise ValueError("parameter/gradient/state length mismatch")
    state.step += 1
    t = state.step
    bc1 = 1.0 - state.beta1 ** t
    bc2 = 1.0 - state.beta2 ** t
    out = []
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape:
            raise ValueError(f"tensor {i}: param shape {p.shape} vs grad {g.shape}")
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * (g * g)
        m_hat = state.m[i] / bc1
        v_hat = state.v[i] / bc2
        out.append(p - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps))
    return out


def save_checkpoint(net: LearnerNet, path) -> None:
    lines = [CHECKPOINT_HEADER,
             "layers " + " ".join(str(s) for s in net.layer_sizes),
             f"activation {net.activation}",
             f"scaling {net.scaling}"]
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        w_vals = " ".join(f"{v:.17g}" for v in w.ravel())
        lines.append(f"W{i} {w.shape[0]} {w.shape[1]} {w_vals}")
        b_vals = " ".join(f"{v:.17g}" for v in b)
        lines.append(f"b{i} {b.shape[0]} {b_vals}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def load_checkpoint(path) -> LearnerNet:
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f]
    if not lines or lines[0] != CHECKPOINT_HEADER:
        found = lines[0] if lines else "<empty file>"
        raise ValueError(
            f"{path}: unsupported checkpoint version line {found!r}, "
            f"expected {CHECKPOINT_HEADER!r}")
    if len(lines) < 4 or not lines[1].startswith("layers "):
        raise ValueError(f"{path}: missing layer-size line")
    sizes = tuple(int(s) for s in lines[1].split()[1:])
    activation = lines[2].split(" ", 1)[1]
    scaling = lines[3].split(" ", 1)[1]

    tensors: dict[str, np.ndarray] = {}
    for line in lines[4:]:
        if not line.strip():
            continue
        fields_ = line.split()
        name = fields_[0]
        ndim = 2 if name.startswith("W") else 1
        shape = tuple(int(s) for s in fields_[1:1 + ndim])
        values = np.array([float(v) for v in fields_[1 + ndim:]])
        if values.size != int(np.prod(shape)):
            raise ValueError(f"{path}: tensor {name} has {values.size} values, "
                             f"expected {np.prod(shape)}")
        tensors[name] = values.reshape(shape)

    weights = []
    biases = []
    for i in range(len(sizes) - 1):
        try:
            weights.append(tensors[f"W{i}"])
            biases.append(tensors[f"b{i}"])
        except KeyError as missing:
            raise ValueError(f"{path}: missing tensor {missing}") from None
    return LearnerNet(layer_sizes=sizes, weights=weights, biases=biases,
                      activation=activation, scaling=scaling)
