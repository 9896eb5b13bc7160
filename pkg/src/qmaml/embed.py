"""Distribution-matching application: targets, divergence cost, gate budgets.

Circuits are trained to reproduce a target probability vector over the 2^n
computational basis states, with the divergence KL(target || circuit) as the
cost.  The gate-budget report compares the layered ansatz against the gate
count of exact amplitude embedding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import build_simplified_two_design, gate_count, mottonen_gate_count
from .rng import PortableRNG
from .simulator import adjoint_gradient_states, measure_distribution, run

# Probability floor applied to circuit outputs before any log.
PROB_FLOOR = 1e-12

MU_GRID = (0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0)
SIGMA_GRID = (0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)


@dataclass(frozen=True)
class TargetDistribution:
    p: np.ndarray
    provenance: str

    def __post_init__(self):
        if np.any(self.p < 0):
            raise ValueError("target probabilities must be non-negative")
        if abs(float(np.sum(self.p)) - 1.0) > 1e-12:
            raise ValueError("target probabilities must sum to 1")


def _lognormal_pdf(x: float, mu: float, sigma: float) -> float:
    return math.exp(-((math.log(x) - mu) ** 2) / (2.0 * sigma * sigma)) / (
        x * sigma * math.sqrt(2.0 * math.pi))


def _lognormal_bin_mass(k: int, mu: float, sigma: float) -> float:
    # integral of the density over [k + 0.5, k + 1.5]
    def cdf(x: float) -> float:
        return 0.5 * (1.0 + math.erf((math.log(x) - mu) / (sigma * math.sqrt(2.0))))

    return cdf(k + 1.5) - cdf(k + 0.5)


def lognormal_targets(n: int, mus=MU_GRID, sigmas=SIGMA_GRID,
                      method: str = "point") -> list[TargetDistribution]:
    """One normalized target per (mu, sigma) pair.

    ``point`` evaluates the density at the integers 1..2^n; ``bin``
    integrates it over unit bins centered there.
    """
    if not mus or not sigmas:
        raise ValueError("mu/sigma grids must be nonempty")
    dim = 2 ** n
    out = []
    for mu in mus:
        for sigma in sigmas:
            if method == "point":
                weights = np.array(
                    [_lognormal_pdf(k + 1.0, mu, sigma) for k in range(dim)])
            elif method == "bin":
                weights = np.array(
                    [_lognormal_bin_mass(k, mu, sigma) for k in range(dim)])
            else:
                raise ValueError(f"unknown discretization {method!r}")
            p = weights / weights.sum()
            out.append(TargetDistribution(
                p=p, provenance=f"lognormal(mu={mu:g},sigma={sigma:g})"))
    return out


def random_circuit_targets(n: int, count: int, layers: int = 5,
                           seed: int = 0) -> list[TargetDistribution]:
    """Measurement distributions of the layered ansatz at random angles."""
    if count < 1:
        raise ValueError("count must be >= 1")
    circuit = build_simplified_two_design(n, layers)
    rng = PortableRNG(seed)
    out = []
    for i in range(count):
        sub = rng.spawn(f"target-{i}")
        theta = np.array([sub.uniform(-math.pi, math.pi)
                          for _ in range(circuit.num_params)])
        p = measure_distribution(circuit, theta)
        p = p / p.sum()
        out.append(TargetDistribution(p=p, provenance=f"random-circuit(seed={seed},i={i})"))
    return out


def kl_cost(p_target: np.ndarray, q_circuit: np.ndarray) -> float:
    """KL(p || q) with q floored at PROB_FLOOR; zero-probability p entries
    contribute nothing."""
    p = np.asarray(p_target, dtype=float)
    q = np.asarray(q_circuit, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > 1e-9 or abs(q.sum() - 1.0) > 1e-9:
        raise ValueError("both distributions must be normalized")
    q = np.maximum(q, PROB_FLOOR)
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def kl_cost_and_gradient(circuit, theta: np.ndarray,
                         p_target: np.ndarray) -> tuple[float, np.ndarray]:
    """Divergence and its exact parameter gradient via the adjoint sweep.

    With q_k = |psi_k|^2, d(KL)/d(psi_k*) = -(p_k / q_k) psi_k, which seeds
    the same backward pass used for energy gradients.  Entries at the
    probability floor get zero gradient (the cost is flat there).
    """
    p = np.asarray(p_target, dtype=float)
    psi = run(circuit, theta)
    q = np.abs(psi) ** 2
    q_total = q.sum()
    cost = kl_cost(p, q / q_total)

    q_floored = np.maximum(q, PROB_FLOOR)
    lam = np.where(q > PROB_FLOOR, -(p / q_floored), 0.0) * psi
    grads = adjoint_gradient_states(circuit, theta, psi, lam.astype(np.complex128))
    return cost, grads


def kl_gradient(circuit, theta: np.ndarray, p_target: np.ndarray) -> np.ndarray:
    return kl_cost_and_gradient(circuit, theta, p_target)[1]


def gate_budget_report(n_values, layer_values) -> list[dict[str, int]]:
    """Rows comparing exact amplitude embedding against the layered ansatz."""
    rows = []
    for n in n_values:
        row = {"n": int(n), "amplitude_embedding": mottonen_gate_count(n)}
        for layers in layer_values:
            row[f"layers_{layers}"] = gate_count(build_simplified_two_design(n, layers))
        rows.append(row)
    return rows


def write_gate_budget_csv(rows: list[dict[str, int]], path) -> None:
    columns = list(rows[0].keys())
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(str(row[c]) for c in columns))
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def save_target(target: TargetDistribution, n: int, path) -> None:
    """Target file: first line qubit count, then one probability per line."""
    lines = [str(n)] + [f"{v:.17g}" for v in target.p]
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def load_target(path) -> tuple[int, TargetDistribution]:
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.strip() for line in f if line.strip()]
    n = int(lines[0])
    p = np.array([float(v) for v in lines[1:]])
    if p.size != 2 ** n:
        raise ValueError(f"{path}: expected {2 ** n} probabilities, found {p.size}")
    return n, TargetDistribution(p=p, provenance=f"file({path})")
