"""Spin-chain Hamiltonians of the studied models as weighted Pauli-string sums.

All models use open boundary conditions. Chains are indexed 0..n-1 with the
impurity at the central site c = (n-1)//2. Heisenberg-type models are written
in spin operators S = sigma/2 (coefficient 1/4 per two-site Pauli pair); the
Ising and XXZ chains use bare Pauli matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

_PAULI_LABELS = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliSum:
    """Hermitian operator sum_k c_k P_k with real coefficients.

    Each term is a (coefficient, label) pair where the label is a length-n
    string over I/X/Y/Z, one letter per qubit. Duplicate labels are not
    allowed; use :meth:`from_terms` to build with merging.
    """

    n_qubits: int
    terms: tuple[tuple[float, str], ...]

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        seen = set()
        for coeff, label in self.terms:
            if len(label) != self.n_qubits or not set(label) <= _PAULI_LABELS:
                raise ValueError(f"bad Pauli label {label!r} for {self.n_qubits} qubits")
            if isinstance(coeff, complex):
                raise ValueError(f"coefficient of {label!r} must be real, got {coeff!r}")
            if label in seen:
                raise ValueError(f"duplicate Pauli label {label!r}; merge terms first")
            seen.add(label)

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[float, str]]) -> "PauliSum":
        """Build a PauliSum, merging duplicate labels and dropping zero terms."""
        merged: dict[str, float] = {}
        for coeff, label in terms:
            merged[label] = merged.get(label, 0.0) + float(coeff)
        kept = tuple((c, s) for s, c in merged.items() if c != 0.0)
        return cls(n_qubits, kept)

    def __len__(self) -> int:
        return len(self.terms)


def _label(n: int, ops: dict[int, str]) -> str:
    chars = ["I"] * n
    for site, p in ops.items():
        chars[site] = p
    return "".join(chars)


def _heisenberg_bond(n: int, i: int, j: int, coupling: float) -> list[tuple[float, str]]:
    # S_i . S_j = (XX + YY + ZZ)/4 in Pauli matrices
    return [(coupling / 4.0, _label(n, {i: p, j: p})) for p in "XYZ"]


@dataclass(frozen=True)
class ImpurityModelParams:
    """Parameters of the central-impurity chains (Ising or XXZ variant)."""

    n_qubits: int
    h_x: float = -1.0
    h0_z: float = 0.0
    variant: Literal["TFIM", "XXZ"] = "TFIM"
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.n_qubits < 1 or self.n_qubits % 2 == 0:
            raise ValueError(f"impurity chain needs an odd qubit count, got {self.n_qubits}")
        if self.variant not in ("TFIM", "XXZ"):
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def center(self) -> int:
        return (self.n_qubits - 1) // 2


@dataclass(frozen=True)
class LadderModelParams:
    """Heisenberg chain with competing nearest-neighbor (alpha) and ladder (J) couplings."""

    n_qubits: int
    alpha: float
    J: float

    def __post_init__(self) -> None:
        if self.n_qubits < 2 or self.n_qubits % 2 != 0:
            raise ValueError(f"ladder model needs an even qubit count, got {self.n_qubits}")


@dataclass(frozen=True)
class RandomChainParams:
    """Heisenberg chain with per-bond random couplings J_i > 0."""

    n_qubits: int
    couplings: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.couplings) != self.n_qubits - 1:
            raise ValueError(
                f"need {self.n_qubits - 1} couplings for {self.n_qubits} qubits, "
                f"got {len(self.couplings)}"
            )
        if any(j <= 0 for j in self.couplings):
            raise ValueError("all couplings must be positive")


def build_tfim(params: ImpurityModelParams) -> PauliSum:
    """Transverse-field Ising chain with a longitudinal field at the center.

    H = sum_bonds(-Z_i Z_{i+1}) + h_x sum_i X_i + h0_z Z_c
    """
    if params.variant != "TFIM":
        raise ValueError(f"build_tfim requires variant TFIM, got {params.variant}")
    n = params.n_qubits
    terms: list[tuple[float, str]] = []
    for i in range(n - 1):
        terms.append((-1.0, _label(n, {i: "Z", i + 1: "Z"})))
    for i in range(n):
        terms.append((params.h_x, _label(n, {i: "X"})))
    terms.append((params.h0_z, _label(n, {params.center: "Z"})))
    return PauliSum.from_terms(n, terms)


def build_xxz(params: ImpurityModelParams) -> PauliSum:
    """XXZ chain (bare Pauli convention) with a central longitudinal field.

    H = sum_bonds(X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1}) + h0_z Z_c
    """
    if params.variant != "XXZ":
        raise ValueError(f"build_xxz requires variant XXZ, got {params.variant}")
    n = params.n_qubits
    terms: list[tuple[float, str]] = []
    for i in range(n - 1):
        terms.append((1.0, _label(n, {i: "X", i + 1: "X"})))
        terms.append((1.0, _label(n, {i: "Y", i + 1: "Y"})))
        terms.append((params.delta, _label(n, {i: "Z", i + 1: "Z"})))
    terms.append((params.h0_z, _label(n, {params.center: "Z"})))
    return PauliSum.from_terms(n, terms)


def ladder_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Long-range partner pairs (i, n-1-i) of the ladder model, outermost first."""
    return tuple((i, n - 1 - i) for i in range(n // 2))


def build_ladder(params: LadderModelParams) -> PauliSum:
    """Heisenberg chain plus ladder couplings between sites i and n-1-i.

    The innermost ladder pair coincides with the central chain bond; the two
    contributions are merged additively (effective coupling alpha + J there).
    """
    n = params.n_qubits
    terms: list[tuple[float, str]] = []
    for i in range(n - 1):
        terms += _heisenberg_bond(n, i, i + 1, params.alpha)
    for a, b in ladder_pairs(n):
        terms += _heisenberg_bond(n, a, b, params.J)
    return PauliSum.from_terms(n, terms)


def build_random_chain(params: RandomChainParams) -> PauliSum:
    """Nearest-neighbor Heisenberg chain with per-bond couplings."""
    n = params.n_qubits
    terms: list[tuple[float, str]] = []
    for i, j_i in enumerate(params.couplings):
        terms += _heisenberg_bond(n, i, i + 1, j_i)
    return PauliSum.from_terms(n, terms)


def random_chain_from_couplings(couplings: Sequence[float]) -> PauliSum:
    """Convenience wrapper: Hamiltonian for an explicit coupling list."""
    return build_random_chain(RandomChainParams(len(couplings) + 1, tuple(couplings)))
