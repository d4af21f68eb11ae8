"""Energy minimization over circuit parameters with exact adjoint gradients.

The gradient of E(theta) = <psi|H|psi> is computed by one reverse sweep over
the circuit: with bra = H|psi> and ket = |psi>, each rotation gate
contributes dE/dtheta = Im <bra| P |ket> evaluated just before undoing the
gate on both vectors (P is the rotation's Pauli generator). Total cost is
O(#gates * 2^n) per evaluation.

Layer-wise warm starting follows the protocol of initializing the m+1 layer
circuit from the m-layer optimum, with small uniform noise on the new
parameters; several restarts re-draw that noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import scipy.optimize

from .ansatz import AnsatzSpec, assemble
from .exact_solver import lowest_eigenpairs
from .models import PauliSum
from .statevector import (
    Circuit,
    StateVector,
    apply_circuit,
    apply_elementary,
    apply_elementary_inverse,
    apply_generator,
    apply_pauli_sum,
    elementary_ops,
    expectation,
    zero_state,
)

MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class VqeConfig:
    """Optimizer settings; defaults follow the studied protocols."""

    grad_tol: float = 1e-10
    max_iters: int = 10_000
    n_restarts: int = 1
    warm_start_noise: float = 0.01
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.grad_tol <= 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.n_restarts < 1:
            raise ValueError(f"n_restarts must be >= 1, got {self.n_restarts}")


@dataclass
class VqeResult:
    """Best parameters and energy of one optimization run."""

    theta_opt: np.ndarray
    energy: float
    exact_energy: float | None
    iterations: int
    trace: list[float]
    restart_index: int = 0
    stalled: bool = False

    @property
    def rel_error(self) -> float | None:
        """|E_exact - E| / |E_exact|, recomputed from the stored fields."""
        if self.exact_energy is None:
            return None
        return abs(self.exact_energy - self.energy) / abs(self.exact_energy)


def energy_and_gradient(
    circuit: Circuit,
    theta: Sequence[float],
    ham: PauliSum,
    initial: StateVector,
) -> tuple[float, np.ndarray]:
    """Exact energy and its full analytic gradient at theta."""
    if len(theta) != circuit.n_params:
        raise ValueError(f"expected {circuit.n_params} parameters, got {len(theta)}")
    if circuit.n_qubits != initial.n_qubits or ham.n_qubits != initial.n_qubits:
        raise ValueError("qubit counts of circuit, Hamiltonian and state differ")
    theta = np.asarray(theta, dtype=float)
    ops = elementary_ops(circuit)
    n = circuit.n_qubits

    ket = initial.amplitudes.copy()
    for kind, targets, slot in ops:
        apply_elementary(ket, n, kind, targets, theta[slot] if slot is not None else 0.0)

    bra = apply_pauli_sum(ham, ket)
    energy = float(np.vdot(ket, bra).real)

    # walk bra and ket back through the circuit together; dE/dtheta of each
    # rotation is Im <bra| P |ket> with P its Pauli generator
    pair = np.stack([bra, ket])
    ket = pair[1]
    mu = np.empty_like(ket)
    grad = np.zeros(circuit.n_params)
    for kind, targets, slot in reversed(ops):
        if slot is not None:
            np.copyto(mu, ket)
            apply_generator(mu, n, kind, targets)
            grad[slot] = np.vdot(pair[0], mu).imag
            angle = theta[slot]
        else:
            angle = 0.0
        apply_elementary_inverse(pair, n, kind, targets, angle)
    return energy, grad


def prepared_state(circuit: Circuit, n_qubits: int | None = None) -> StateVector:
    """Run a fixed-gate circuit on |0...0>; used for initial-state preparation."""
    n = circuit.n_qubits if n_qubits is None else n_qubits
    return apply_circuit(zero_state(n), circuit, [0.0] * circuit.n_params)


def minimize(
    circuit: Circuit,
    ham: PauliSum,
    initial: StateVector,
    theta0: Sequence[float],
    config: VqeConfig,
    exact_energy: float | None = None,
    restart_index: int = 0,
) -> VqeResult:
    """BFGS descent from theta0; never returns an energy above E(theta0).

    On line-search failure the best visited point is returned with the
    stalled flag set.
    """
    theta0 = np.asarray(theta0, dtype=float)
    if theta0.shape != (circuit.n_params,):
        raise ValueError(f"theta0 must have length {circuit.n_params}, got {theta0.shape}")

    if circuit.n_params == 0:
        state = initial.copy()
        apply_circuit(state, circuit, theta0)
        energy = expectation(state, ham)
        return VqeResult(theta0, energy, exact_energy, 0, [energy], restart_index)

    best = {"energy": np.inf, "theta": theta0.copy()}
    last = {"energy": np.inf}
    trace: list[float] = []

    def fun(theta: np.ndarray) -> tuple[float, np.ndarray]:
        energy, grad = energy_and_gradient(circuit, theta, ham, initial)
        last["energy"] = energy
        if energy < best["energy"]:
            best["energy"] = energy
            best["theta"] = theta.copy()
        return energy, grad

    def record(_xk: np.ndarray) -> None:
        trace.append(last["energy"])

    res = scipy.optimize.minimize(
        fun,
        theta0,
        jac=True,
        method="BFGS",
        callback=record,
        options={"gtol": config.grad_tol, "maxiter": config.max_iters},
    )
    return VqeResult(
        theta_opt=best["theta"],
        energy=float(best["energy"]),
        exact_energy=exact_energy,
        iterations=int(res.nit),
        trace=trace,
        restart_index=restart_index,
        stalled=not res.success,
    )


def _spec_with_layers(spec: AnsatzSpec, m: int) -> AnsatzSpec:
    # restrict an explicit x_set to the layers present at this rung
    x = spec.x_set if spec.x_set is None else frozenset(v for v in spec.x_set if v <= m)
    return replace(spec, n_layers=m, x_set=x)


def _extended(prev: np.ndarray | None, n_params: int, noise: np.ndarray) -> np.ndarray:
    theta0 = np.zeros(n_params)
    if prev is not None:
        theta0[: prev.size] = prev
        theta0[prev.size :] += noise[prev.size :]
    else:
        theta0 += noise
    return theta0


def layer_sweep(
    spec: AnsatzSpec,
    ham: PauliSum,
    max_layers: int,
    config: VqeConfig,
    exact_energy: float | None = None,
) -> list[VqeResult]:
    """Optimize at 1..max_layers layers, warm-starting each rung from the last.

    Per rung the best of n_restarts noisy initializations is kept; from the
    second rung on, one extra noise-free extension of the previous optimum is
    always included (restart_index -1) so energies never increase with depth.
    """
    if max_layers < 1:
        raise ValueError(f"max_layers must be >= 1, got {max_layers}")
    if exact_energy is None:
        exact_energy = lowest_eigenpairs(ham, k=1).ground_energy
    rng = np.random.default_rng(config.rng_seed)

    results: list[VqeResult] = []
    prev_theta: np.ndarray | None = None
    for m in range(1, max_layers + 1):
        init_circ, var = assemble(_spec_with_layers(spec, m))
        initial = prepared_state(init_circ)
        candidates: list[VqeResult] = []
        if prev_theta is not None:
            theta0 = _extended(prev_theta, var.n_params, np.zeros(var.n_params))
            candidates.append(
                minimize(var, ham, initial, theta0, config, exact_energy, restart_index=-1)
            )
        for r in range(config.n_restarts):
            noise = rng.uniform(-config.warm_start_noise, config.warm_start_noise, var.n_params)
            theta0 = _extended(prev_theta, var.n_params, noise)
            candidates.append(
                minimize(var, ham, initial, theta0, config, exact_energy, restart_index=r)
            )
        best = min(candidates, key=lambda res: res.energy)
        results.append(best)
        prev_theta = best.theta_opt
    return results


def optimize_at_layers(
    spec: AnsatzSpec,
    ham: PauliSum,
    config: VqeConfig,
    exact_energy: float | None = None,
) -> VqeResult:
    """Result at spec.n_layers layers, reached through the warm-start ladder."""
    if spec.n_layers == 0:
        if exact_energy is None:
            exact_energy = lowest_eigenpairs(ham, k=1).ground_energy
        init_circ, var = assemble(spec)
        return minimize(var, ham, prepared_state(init_circ), np.zeros(0), config, exact_energy)
    return layer_sweep(spec, ham, spec.n_layers, config, exact_energy)[-1]


def plateau_value(results: Sequence) -> float | None:
    """Median relative error of the detected accuracy plateau, or None.

    A plateau is a window of 3 consecutive layer counts over which the
    relative error changes by less than 10%; the last such window of the
    sweep is used (the saturated tail, robust against slow early regimes).
    """
    errors = [r.rel_error if isinstance(r, VqeResult) else float(r) for r in results]
    if any(e is None for e in errors):
        raise ValueError("plateau detection needs relative errors; exact energy missing")
    if len(errors) < 3:
        raise ValueError(f"plateau detection needs >= 3 layer results, got {len(errors)}")
    plateau = None
    for i in range(len(errors) - 2):
        window = errors[i : i + 3]
        if max(window) - min(window) <= 0.10 * min(window):
            plateau = float(np.median(window))
    return plateau
