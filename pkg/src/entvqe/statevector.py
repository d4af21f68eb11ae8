"""Dense state-vector simulation of the parametrized circuits used here.

Conventions:
  * qubit 0 is the most significant bit of the amplitude index, so
    ``amplitudes.reshape([2] * n)`` puts qubit q on axis q;
  * every rotation follows R_P(theta) = exp(-i theta P / 2) for
    P in {X, Z, XX, YY, ZZ};
  * gates act in place on double-precision amplitudes.

The two-qubit U4 gate is parametrized as a ZXZ Euler triple on each target,
followed by the commuting exp(-i(tx XX + ty YY + tz ZZ)/2) core, followed by
a second ZXZ triple on each target (15 angles, identity when all are zero).
It is applied and differentiated through its expansion into those 15
elementary rotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .models import PauliSum

MAX_QUBITS = 28


class GateKind(Enum):
    RX = "rx"
    RZ = "rz"
    RZZ = "rzz"
    RXX = "rxx"
    RYY = "ryy"
    X = "x"
    H = "h"
    Z = "z"
    CNOT = "cnot"
    U4 = "u4"


_N_TARGETS = {
    GateKind.RX: 1,
    GateKind.RZ: 1,
    GateKind.X: 1,
    GateKind.H: 1,
    GateKind.Z: 1,
    GateKind.RZZ: 2,
    GateKind.RXX: 2,
    GateKind.RYY: 2,
    GateKind.CNOT: 2,
    GateKind.U4: 2,
}

_N_PARAMS = {
    GateKind.RX: 1,
    GateKind.RZ: 1,
    GateKind.RZZ: 1,
    GateKind.RXX: 1,
    GateKind.RYY: 1,
    GateKind.X: 0,
    GateKind.H: 0,
    GateKind.Z: 0,
    GateKind.CNOT: 0,
    GateKind.U4: 15,
}

# U4 expansion: (rotation kind, which target the rotation acts on). Two-qubit
# core entries act on both targets. Position in the tuple == local param slot.
_U4_EXPANSION: tuple[tuple[GateKind, tuple[int, ...]], ...] = (
    (GateKind.RZ, (0,)),
    (GateKind.RX, (0,)),
    (GateKind.RZ, (0,)),
    (GateKind.RZ, (1,)),
    (GateKind.RX, (1,)),
    (GateKind.RZ, (1,)),
    (GateKind.RXX, (0, 1)),
    (GateKind.RYY, (0, 1)),
    (GateKind.RZZ, (0, 1)),
    (GateKind.RZ, (0,)),
    (GateKind.RX, (0,)),
    (GateKind.RZ, (0,)),
    (GateKind.RZ, (1,)),
    (GateKind.RX, (1,)),
    (GateKind.RZ, (1,)),
)


@dataclass(frozen=True)
class Gate:
    """A single gate: kind, target qubits, and its slots in the parameter vector."""

    kind: GateKind
    targets: tuple[int, ...]
    param_slots: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(self.targets) != _N_TARGETS[self.kind]:
            raise ValueError(
                f"{self.kind.name} takes {_N_TARGETS[self.kind]} target(s), got {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"target indices must be distinct, got {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ValueError(f"negative target index in {self.targets}")
        if len(self.param_slots) != _N_PARAMS[self.kind]:
            raise ValueError(
                f"{self.kind.name} takes {_N_PARAMS[self.kind]} parameter(s), "
                f"got slots {self.param_slots}"
            )


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over n_qubits addressing parameters 0..n_params-1."""

    n_qubits: int
    gates: tuple[Gate, ...]
    n_params: int

    def __post_init__(self) -> None:
        slots: list[int] = []
        for gate in self.gates:
            if any(t >= self.n_qubits for t in gate.targets):
                raise ValueError(f"gate {gate} exceeds {self.n_qubits} qubits")
            slots.extend(gate.param_slots)
        if sorted(slots) != list(range(self.n_params)):
            raise ValueError(
                f"param slots must cover 0..{self.n_params - 1} exactly once, got {sorted(slots)}"
            )

    @classmethod
    def from_gates(cls, n_qubits: int, gates: Iterable[Gate]) -> "Circuit":
        gates = tuple(gates)
        n_params = sum(len(g.param_slots) for g in gates)
        return cls(n_qubits, gates, n_params)


class StateVector:
    """2^n complex amplitudes; exclusively owned by one simulation run."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        if amplitudes.shape != (2**n_qubits,):
            raise ValueError(
                f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, "
                f"got shape {amplitudes.shape}"
            )
        self.n_qubits = n_qubits
        self.amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def zero_state(n: int) -> StateVector:
    """The computational basis state |0...0> on n qubits."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


# ---------------------------------------------------------------------------
# kernels on raw amplitude arrays
# ---------------------------------------------------------------------------

def _v1(amps: np.ndarray, n: int, q: int) -> np.ndarray:
    # axes: (batch and higher qubits, qubit q, lower qubits); the leading -1
    # absorbs any stacked vectors, so kernels also act on (k, 2^n) batches
    return amps.reshape(-1, 2, 1 << (n - q - 1))


def _v2(amps: np.ndarray, n: int, q1: int, q2: int) -> np.ndarray:
    # q1 < q2; axes: (batch/high, q1, mid, q2, low)
    return amps.reshape(-1, 2, 1 << (q2 - q1 - 1), 2, 1 << (n - q2 - 1))


def _rx(amps: np.ndarray, n: int, q: int, theta: float) -> None:
    v = _v1(amps, n, q)
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    a0 = v[:, 0, :].copy()
    v[:, 0, :] *= c
    v[:, 0, :] += (-1j * s) * v[:, 1, :]
    v[:, 1, :] *= c
    v[:, 1, :] += (-1j * s) * a0


def _rz(amps: np.ndarray, n: int, q: int, theta: float) -> None:
    v = _v1(amps, n, q)
    v[:, 0, :] *= complex(math.cos(theta / 2.0), -math.sin(theta / 2.0))
    v[:, 1, :] *= complex(math.cos(theta / 2.0), math.sin(theta / 2.0))


def _x(amps: np.ndarray, n: int, q: int) -> None:
    v = _v1(amps, n, q)
    tmp = v[:, 0, :].copy()
    v[:, 0, :] = v[:, 1, :]
    v[:, 1, :] = tmp


def _y(amps: np.ndarray, n: int, q: int) -> None:
    v = _v1(amps, n, q)
    tmp = v[:, 0, :].copy()
    v[:, 0, :] = -1j * v[:, 1, :]
    v[:, 1, :] = 1j * tmp


def _z(amps: np.ndarray, n: int, q: int) -> None:
    v = _v1(amps, n, q)
    v[:, 1, :] *= -1.0


def _h(amps: np.ndarray, n: int, q: int) -> None:
    v = _v1(amps, n, q)
    r = 1.0 / math.sqrt(2.0)
    a0 = v[:, 0, :].copy()
    v[:, 0, :] += v[:, 1, :]
    v[:, 0, :] *= r
    v[:, 1, :] *= -1.0
    v[:, 1, :] += a0
    v[:, 1, :] *= r


def _rzz(amps: np.ndarray, n: int, qa: int, qb: int, theta: float) -> None:
    q1, q2 = (qa, qb) if qa < qb else (qb, qa)
    v = _v2(amps, n, q1, q2)
    ph_m = complex(math.cos(theta / 2.0), -math.sin(theta / 2.0))
    ph_p = ph_m.conjugate()
    v[:, 0, :, 0, :] *= ph_m
    v[:, 1, :, 1, :] *= ph_m
    v[:, 0, :, 1, :] *= ph_p
    v[:, 1, :, 0, :] *= ph_p


def _rxx(amps: np.ndarray, n: int, qa: int, qb: int, theta: float) -> None:
    q1, q2 = (qa, qb) if qa < qb else (qb, qa)
    v = _v2(amps, n, q1, q2)
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    a00 = v[:, 0, :, 0, :].copy()
    a01 = v[:, 0, :, 1, :].copy()
    v[:, 0, :, 0, :] *= c
    v[:, 0, :, 0, :] += (-1j * s) * v[:, 1, :, 1, :]
    v[:, 1, :, 1, :] *= c
    v[:, 1, :, 1, :] += (-1j * s) * a00
    v[:, 0, :, 1, :] *= c
    v[:, 0, :, 1, :] += (-1j * s) * v[:, 1, :, 0, :]
    v[:, 1, :, 0, :] *= c
    v[:, 1, :, 0, :] += (-1j * s) * a01


def _ryy(amps: np.ndarray, qa: int, qb: int, theta: float) -> None:
    # YY maps |00> -> -|11>, |01> -> |10> (and symmetrically), so the
    # aligned sector picks up the opposite sign of RXX.
    q1, q2 = (qa, qb) if qa < qb else (qb, qa)
    v = _v2(amps, q1, q2)
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    a00 = v[:, 0, :, 0, :].copy()
    a01 = v[:, 0, :, 1, :].copy()
    v[:, 0, :, 0, :] *= c
    v[:, 0, :, 0, :] += (1j * s) * v[:, 1, :, 1, :]
    v[:, 1, :, 1, :] *= c
    v[:, 1, :, 1, :] += (1j * s) * a00
    v[:, 0, :, 1, :] *= c
    v[:, 0, :, 1, :] += (-1j * s) * v[:, 1, :, 0, :]
    v[:, 1, :, 0, :] *= c
    v[:, 1, :, 0, :] += (-1j * s) * a01


def _cnot(amps: np.ndarray, n: int, control: int, target: int) -> None:
    q1, q2 = (control, target) if control < target else (target, control)
    v = _v2(amps, n, q1, q2)
    if control < target:
        tmp = v[:, 1, :, 0, :].copy()
        v[:, 1, :, 0, :] = v[:, 1, :, 1, :]
        v[:, 1, :, 1, :] = tmp
    else:
        tmp = v[:, 0, :, 1, :].copy()
        v[:, 0, :, 1, :] = v[:, 1, :, 1, :]
        v[:, 1, :, 1, :] = tmp


_ROTATIONS = {
    GateKind.RX: _rx,
    GateKind.RZ: _rz,
    GateKind.RZZ: _rzz,
    GateKind.RXX: _rxx,
    GateKind.RYY: _ryy,
}

_FIXED = {
    GateKind.X: _x,
    GateKind.H: _h,
    GateKind.Z: _z,
    GateKind.CNOT: _cnot,
}


def apply_elementary(
    amps: np.ndarray, n: int, kind: GateKind, targets: tuple[int, ...], theta: float = 0.0
) -> None:
    """Apply one non-composite gate in place (theta ignored for fixed gates).

    amps may carry leading batch axes; only the trailing 2^n entries per
    batch element are interpreted as qubit amplitudes.
    """
    rot = _ROTATIONS.get(kind)
    if rot is not None:
        rot(amps, n, *targets, theta)
        return
    fixed = _FIXED.get(kind)
    if fixed is None:
        raise ValueError(f"{kind} is not an elementary gate")
    fixed(amps, n, *targets)


def apply_elementary_inverse(
    amps: np.ndarray, n: int, kind: GateKind, targets: tuple[int, ...], theta: float = 0.0
) -> None:
    """Inverse of apply_elementary; fixed gates here are involutions."""
    rot = _ROTATIONS.get(kind)
    if rot is not None:
        rot(amps, n, *targets, -theta)
    else:
        _FIXED[kind](amps, n, *targets)


# Pauli generator of each rotation kind, as per-qubit letters on the targets.
_GENERATOR = {
    GateKind.RX: "X",
    GateKind.RZ: "Z",
    GateKind.RZZ: "ZZ",
    GateKind.RXX: "XX",
    GateKind.RYY: "YY",
}

_PAULI_OPS = {"X": _x, "Y": _y, "Z": _z}


def apply_generator(amps: np.ndarray, n: int, kind: GateKind, targets: tuple[int, ...]) -> None:
    """Apply the rotation's Pauli generator (X, Z, ZZ, XX or YY) in place."""
    for q, letter in zip(targets, _GENERATOR[kind]):
        _PAULI_OPS[letter](amps, n, q)


ElementaryOp = tuple[GateKind, tuple[int, ...], int | None]


def elementary_ops(circuit: Circuit) -> list[ElementaryOp]:
    """Flatten a circuit into (kind, targets, slot) records, expanding U4 gates.

    slot is None for fixed gates and the index into the parameter vector for
    single-angle rotations.
    """
    ops: list[ElementaryOp] = []
    for gate in circuit.gates:
        if gate.kind is GateKind.U4:
            a, b = gate.targets
            for (kind, which), slot in zip(_U4_EXPANSION, gate.param_slots):
                tgt = tuple((a, b)[w] for w in which)
                ops.append((kind, tgt, slot))
        elif gate.param_slots:
            ops.append((gate.kind, gate.targets, gate.param_slots[0]))
        else:
            ops.append((gate.kind, gate.targets, None))
    return ops


# ---------------------------------------------------------------------------
# public operations on StateVector
# ---------------------------------------------------------------------------

def apply_gate(state: StateVector, gate: Gate, params: Sequence[float] = ()) -> StateVector:
    """Apply a single gate in place; params holds the gate's own angles."""
    if len(params) != _N_PARAMS[gate.kind]:
        raise ValueError(
            f"{gate.kind.name} expects {_N_PARAMS[gate.kind]} parameter(s), got {len(params)}"
        )
    if any(t >= state.n_qubits for t in gate.targets):
        raise ValueError(f"gate targets {gate.targets} exceed {state.n_qubits} qubits")
    if gate.kind is GateKind.U4:
        return apply_u4(state, gate.targets, params)
    theta = float(params[0]) if params else 0.0
    apply_elementary(state.amplitudes, state.n_qubits, gate.kind, gate.targets, theta)
    return state


def apply_u4(state: StateVector, targets: tuple[int, int], params: Sequence[float]) -> StateVector:
    """Apply the 15-parameter general two-qubit gate in place."""
    if len(params) != 15:
        raise ValueError(f"U4 expects 15 angles, got {len(params)}")
    a, b = targets
    if a == b or max(a, b) >= state.n_qubits:
        raise ValueError(f"invalid U4 targets {targets} on {state.n_qubits} qubits")
    for (kind, which), theta in zip(_U4_EXPANSION, params):
        tgt = tuple((a, b)[w] for w in which)
        apply_elementary(state.amplitudes, state.n_qubits, kind, tgt, float(theta))
    return state


def apply_circuit(state: StateVector, circuit: Circuit, theta: Sequence[float]) -> StateVector:
    """Apply every gate of the circuit in place, reading angles from theta."""
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit acts on {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    if len(theta) != circuit.n_params:
        raise ValueError(f"expected {circuit.n_params} parameters, got {len(theta)}")
    amps = state.amplitudes
    n = state.n_qubits
    for kind, targets, slot in elementary_ops(circuit):
        apply_elementary(amps, n, kind, targets, float(theta[slot]) if slot is not None else 0.0)
    return state


def apply_pauli_string(amps: np.ndarray, n: int, label: str) -> None:
    """Apply a Pauli string (one letter per qubit) in place."""
    for q, letter in enumerate(label):
        if letter == "I":
            continue
        op = _PAULI_OPS.get(letter)
        if op is None:
            raise ValueError(f"bad Pauli letter {letter!r}")
        op(amps, n, q)


def apply_pauli_sum(ham: PauliSum, amps: np.ndarray) -> np.ndarray:
    """Return H |psi> as a fresh array; the input is left untouched."""
    out = np.zeros_like(amps)
    n = ham.n_qubits
    for coeff, label in ham.terms:
        work = amps.copy()
        apply_pauli_string(work, n, label)
        out += coeff * work
    return out


def expectation(state: StateVector, ham: PauliSum) -> float:
    """Exact energy <psi|H|psi> of a Pauli-sum Hamiltonian."""
    if ham.n_qubits != state.n_qubits:
        raise ValueError(
            f"Hamiltonian acts on {ham.n_qubits} qubits, state has {state.n_qubits}"
        )
    value = np.vdot(state.amplitudes, apply_pauli_sum(ham, state.amplitudes))
    return float(value.real)


def prepare_singlet_pairs(n: int, pairs: Sequence[tuple[int, int]]) -> StateVector:
    """Product of singlets (|01> - |10>)/sqrt(2) on a perfect matching of 0..n-1.

    Realized by the gate sequence X_b, H_a, Z_a, CNOT(a -> b) for each pair
    (a, b), keeping the preparation expressible as a circuit.
    """
    state = zero_state(n)
    return apply_circuit(state, singlet_pair_circuit(n, pairs), ())


def singlet_pair_circuit(n: int, pairs: Sequence[tuple[int, int]]) -> Circuit:
    """Fixed-gate circuit preparing the singlet product state."""
    covered = [q for pair in pairs for q in pair]
    if sorted(covered) != list(range(n)):
        raise ValueError(f"pairs {pairs} are not a perfect matching of 0..{n - 1}")
    gates: list[Gate] = []
    for a, b in pairs:
        gates.append(Gate(GateKind.X, (b,)))
        gates.append(Gate(GateKind.H, (a,)))
        gates.append(Gate(GateKind.Z, (a,)))
        gates.append(Gate(GateKind.CNOT, (a, b)))
    return Circuit.from_gates(n, gates)
