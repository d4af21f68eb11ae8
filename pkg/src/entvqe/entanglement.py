"""Reduced density matrices, entanglement entropy and entanglement spectrum.

Subsystem A is always the first `cut` qubits (indices 0..cut-1). For the
impurity chains the studied bipartition is the left half excluding the
central qubit, cut = (n-1)//2; ladder and random chains are cut at n//2.
Natural logarithms throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .statevector import StateVector

SPECTRUM_FLOOR = 1e-14


@dataclass(frozen=True)
class EntanglementReport:
    """Entropy and spectrum of one bipartition of one state."""

    cut: int
    entropy: float
    spectrum: tuple[float, ...]


def reduced_density(state: StateVector, cut: int) -> np.ndarray:
    """rho_A = Tr_B |psi><psi| for A = qubits 0..cut-1."""
    n = state.n_qubits
    if not 1 <= cut < n:
        raise ValueError(f"cut must be in 1..{n - 1}, got {cut}")
    block = state.amplitudes.reshape(2**cut, 2 ** (n - cut))
    return block @ block.conj().T


def entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy -Tr(rho ln rho), with 0 ln 0 := 0."""
    trace = np.trace(rho).real
    if abs(trace - 1.0) > 1e-8:
        raise ValueError(f"density matrix trace {trace} deviates from 1")
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 0.0]
    return float(-np.sum(evals * np.log(evals)))


def spectrum(rho: np.ndarray, floor: float = SPECTRUM_FLOOR) -> np.ndarray:
    """Entanglement-Hamiltonian eigenvalues eps_k = -ln(lambda_k), ascending.

    Eigenvalues of rho below the floor are dropped; they sit beyond double
    precision and are not reproducible anyway.
    """
    if floor <= 0:
        raise ValueError(f"floor must be positive, got {floor}")
    evals = np.linalg.eigvalsh(rho)
    evals = np.sort(evals[evals >= floor])[::-1]
    return -np.log(evals)


def match_count(exact: Sequence[float], trial: Sequence[float], tol: float = 0.05) -> int:
    """Length of the leading spectrum prefix reproduced within tolerance.

    Entry k matches when |eps_trial - eps_exact| <= tol * max(1, |eps_exact|).
    """
    count = 0
    for e_exact, e_trial in zip(exact, trial):
        if abs(e_trial - e_exact) > tol * max(1.0, abs(e_exact)):
            break
        count += 1
    return count


def entanglement_report(
    state: StateVector, cut: int, floor: float = SPECTRUM_FLOOR
) -> EntanglementReport:
    """Entropy and spectrum of the state at the given cut."""
    rho = reduced_density(state, cut)
    return EntanglementReport(cut, entropy(rho), tuple(spectrum(rho, floor)))


def impurity_cut(n: int) -> int:
    """Left half excluding the central qubit."""
    return (n - 1) // 2


def half_cut(n: int) -> int:
    return n // 2
