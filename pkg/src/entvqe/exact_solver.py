"""Krylov computation of the lowest eigenpairs used as the exact reference.

scipy's ARPACK Lanczos backs the large-dimension path; tiny problems fall
back to dense diagonalization (ARPACK needs k < dim - 1). Residuals are
verified against an absolute tolerance so a silently unconverged reference
can never leak into relative-error bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .models import PauliSum
from .statevector import StateVector

RESIDUAL_TOL = 1e-10
DEGENERACY_TOL = 1e-10

_P2 = {
    "I": sp.identity(2, format="csr", dtype=np.complex128),
    "X": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=np.complex128)),
    "Y": sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=np.complex128)),
    "Z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=np.complex128)),
}


class ConvergenceError(RuntimeError):
    """Lanczos failed to reach the residual tolerance; carries the residuals."""

    def __init__(self, message: str, residuals: np.ndarray):
        super().__init__(f"{message} (residuals: {residuals})")
        self.residuals = residuals


def sparse_matrix(ham: PauliSum) -> sp.csr_matrix:
    """Kronecker-assembled sparse matrix of a Pauli sum (qubit 0 leftmost)."""
    dim = 2**ham.n_qubits
    out = sp.csr_matrix((dim, dim), dtype=np.complex128)
    for coeff, label in ham.terms:
        term = _P2[label[0]]
        for letter in label[1:]:
            term = sp.kron(term, _P2[letter], format="csr")
        out = out + coeff * term
    return out


@dataclass
class ExactReference:
    """Lowest eigenpairs of a model Hamiltonian, energies ascending."""

    energies: np.ndarray
    vectors: np.ndarray  # shape (dim, k), orthonormal columns
    degeneracy_tol: float = DEGENERACY_TOL

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    def ground_degeneracy(self) -> int:
        """Number of computed states within degeneracy_tol of the ground energy."""
        return int(np.sum(self.energies - self.energies[0] < self.degeneracy_tol))

    def ground_subspace(self) -> np.ndarray:
        return self.vectors[:, : self.ground_degeneracy()]


def lowest_eigenpairs(ham: PauliSum, k: int = 4) -> ExactReference:
    """k smallest eigenvalues and eigenvectors of the Hamiltonian.

    k defaults to 4 so near-degeneracies of the ground level are visible.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    dim = 2**ham.n_qubits
    if k > dim:
        raise ValueError(f"cannot request {k} eigenpairs of a {dim}-dimensional operator")
    matrix = sparse_matrix(ham)

    if dim <= 64 or k >= dim - 1:
        energies, vectors = np.linalg.eigh(matrix.toarray())
        energies, vectors = energies[:k], vectors[:, :k]
    else:
        energies, vectors = _lanczos(matrix, k)

    order = np.argsort(energies)
    energies = np.ascontiguousarray(energies[order].real)
    vectors = np.ascontiguousarray(vectors[:, order])

    residuals = np.linalg.norm(matrix @ vectors - vectors * energies, axis=0)
    if np.any(residuals > RESIDUAL_TOL):
        raise ConvergenceError("eigenpair residuals exceed tolerance", residuals)
    return ExactReference(energies, vectors)


def _lanczos(matrix: sp.csr_matrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    dim = matrix.shape[0]
    ncv = min(dim - 1, max(2 * k + 10, 30))
    last_exc: Exception | None = None
    for attempt in range(3):
        try:
            energies, vectors = spla.eigsh(
                matrix, k=k, which="SA", ncv=ncv, maxiter=200 * dim, tol=0
            )
            return energies, vectors
        except spla.ArpackNoConvergence as exc:  # widen the Krylov basis and retry
            last_exc = exc
            ncv = min(dim - 1, ncv * 2)
    raise ConvergenceError(f"ARPACK did not converge: {last_exc}", np.array([]))


def project_onto_degenerate(reference: ExactReference, trial: StateVector) -> StateVector:
    """Normalized projection of the trial state onto the degenerate ground subspace.

    This is the ground-subspace member with maximal overlap with the trial
    state; with a unique ground state it returns that state up to phase.
    """
    subspace = reference.ground_subspace()
    if subspace.shape[0] != trial.amplitudes.shape[0]:
        raise ValueError("reference and trial state dimensions differ")
    coeffs = subspace.conj().T @ trial.amplitudes
    projected = subspace @ coeffs
    norm = np.linalg.norm(projected)
    if norm < 1e-8:
        raise ValueError(
            f"trial state is orthogonal to the degenerate subspace (projection norm {norm:.2e})"
        )
    return StateVector(trial.n_qubits, projected / norm)
