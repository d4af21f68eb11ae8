"""Builders for every circuit family used in the experiments.

Families:
  * IMPURITY_LAYERS -- RX/RZ on all qubits then RZZ on the chain bonds; the
    two bonds touching the central qubit appear only in layers listed in
    x_set (x_set=None means every layer).
  * LIGHTCONE -- RX/RZ on all qubits then a brick-wall of RZZ gates.
  * U4_SEQUENCE -- per layer, a sequence of U4 gate sets (SHORT on
    nearest-neighbor bonds, LONG on the given pairing).
  * UALPHA_SEQUENCE -- same with 3-parameter RXX.RYY.RZZ gates and the extra
    SHORT_VARIANT set placed on the strongest couplings.

Every builder yields the identity at zero parameters; parameter slots are
assigned in gate-emission order, so an m-layer circuit's parameters are a
prefix of the (m+1)-layer circuit's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .statevector import Circuit, Gate, GateKind, singlet_pair_circuit


class AnsatzFamily(Enum):
    IMPURITY_LAYERS = "impurity_layers"
    LIGHTCONE = "lightcone"
    U4_SEQUENCE = "u4_sequence"
    UALPHA_SEQUENCE = "ualpha_sequence"


class GateSetTag(Enum):
    SHORT = "short"
    LONG = "long"
    SHORT_VARIANT = "short_variant"


class InitialState(Enum):
    PRODUCT_ZERO = "product_zero"
    SINGLET_LADDER = "singlet_ladder"
    SINGLET_RG = "singlet_rg"
    SINGLET_NN = "singlet_nn"


@dataclass(frozen=True)
class AnsatzSpec:
    """Declarative description of one ansatz instance.

    x_set=None selects every layer (the paper's x = [all]); couplings are
    only needed when the sequence contains SHORT_VARIANT.
    """

    family: AnsatzFamily
    n_qubits: int
    n_layers: int
    x_set: frozenset[int] | None = None
    sequence: tuple[GateSetTag, ...] = ()
    initial_state: InitialState = InitialState.PRODUCT_ZERO
    pairing: tuple[tuple[int, int], ...] | None = None
    couplings: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_layers < 0:
            raise ValueError(f"n_layers must be >= 0, got {self.n_layers}")
        if self.x_set is not None:
            bad = [x for x in self.x_set if not 1 <= x <= self.n_layers]
            if bad:
                raise ValueError(f"x_set entries {bad} outside 1..{self.n_layers}")
        if self.initial_state is InitialState.SINGLET_RG and self.pairing is None:
            raise ValueError("SINGLET_RG initial state requires an explicit pairing")
        if GateSetTag.LONG in self.sequence and self.pairing is None:
            raise ValueError("LONG gate sets require an explicit pairing")
        if (
            self.family is AnsatzFamily.UALPHA_SEQUENCE
            and GateSetTag.SHORT_VARIANT in self.sequence
            and self.couplings is None
        ):
            raise ValueError("SHORT_VARIANT gate sets require the bond couplings")

    def resolved_x(self) -> frozenset[int]:
        if self.x_set is None:
            return frozenset(range(1, self.n_layers + 1))
        return self.x_set


def nn_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Disjoint nearest-neighbor pairs (0,1), (2,3), ... for even n."""
    if n % 2 != 0:
        raise ValueError(f"nearest-neighbor pairing needs even n, got {n}")
    return tuple((i, i + 1) for i in range(0, n, 2))


def _shift_slots(gates: Sequence[Gate], offset: int) -> list[Gate]:
    return [
        Gate(g.kind, g.targets, tuple(s + offset for s in g.param_slots)) for g in gates
    ]


def concat(n_qubits: int, fragments: Sequence[Circuit]) -> Circuit:
    """Concatenate circuit fragments, renumbering parameter slots."""
    gates: list[Gate] = []
    offset = 0
    for frag in fragments:
        if frag.n_qubits != n_qubits:
            raise ValueError("fragment qubit counts differ")
        gates.extend(_shift_slots(frag.gates, offset))
        offset += frag.n_params
    return Circuit(n_qubits, tuple(gates), offset)


def _brickwall_bonds(n: int) -> list[tuple[int, int]]:
    # all (even, even+1) bonds first, then the (odd, odd+1) bonds
    bonds = [(i, i + 1) for i in range(0, n - 1, 2)]
    bonds += [(i, i + 1) for i in range(1, n - 1, 2)]
    return bonds


def build_impurity_circuit(spec: AnsatzSpec) -> Circuit:
    """Layered RX/RZ + chain-RZZ circuit with conditional central bonds."""
    if spec.family is not AnsatzFamily.IMPURITY_LAYERS:
        raise ValueError(f"expected IMPURITY_LAYERS spec, got {spec.family}")
    n = spec.n_qubits
    if n % 2 == 0:
        raise ValueError(f"impurity circuit needs odd n, got {n}")
    center = (n - 1) // 2
    x = spec.resolved_x()
    gates: list[Gate] = []
    slot = 0
    for layer in range(1, spec.n_layers + 1):
        for q in range(n):
            gates.append(Gate(GateKind.RX, (q,), (slot,)))
            slot += 1
        for q in range(n):
            gates.append(Gate(GateKind.RZ, (q,), (slot,)))
            slot += 1
        for i in range(n - 1):
            touches_center = i == center - 1 or i == center
            if touches_center and layer not in x:
                continue
            gates.append(Gate(GateKind.RZZ, (i, i + 1), (slot,)))
            slot += 1
    return Circuit(n, tuple(gates), slot)


def build_lightcone_layer(n: int) -> Circuit:
    """One lightcone layer: RX and RZ on every qubit, then brick-wall RZZ."""
    if n < 2:
        raise ValueError(f"lightcone layer needs n >= 2, got {n}")
    gates: list[Gate] = []
    slot = 0
    for q in range(n):
        gates.append(Gate(GateKind.RX, (q,), (slot,)))
        slot += 1
    for q in range(n):
        gates.append(Gate(GateKind.RZ, (q,), (slot,)))
        slot += 1
    for a, b in _brickwall_bonds(n):
        gates.append(Gate(GateKind.RZZ, (a, b), (slot,)))
        slot += 1
    return Circuit(n, tuple(gates), slot)


def _u4(a: int, b: int, slot: int) -> Gate:
    return Gate(GateKind.U4, (a, b), tuple(range(slot, slot + 15)))


def build_u4_gateset(
    n: int, tag: GateSetTag, pairing: Sequence[tuple[int, int]] | None = None
) -> Circuit:
    """U4 gates on nearest-neighbor bonds (SHORT) or on the pairing (LONG)."""
    gates: list[Gate] = []
    slot = 0
    if tag is GateSetTag.SHORT:
        for a, b in _brickwall_bonds(n):
            gates.append(_u4(a, b, slot))
            slot += 15
    elif tag is GateSetTag.LONG:
        if pairing is None:
            raise ValueError("LONG U4 gate set requires a pairing")
        for a, b in pairing:
            gates.append(_u4(a, b, slot))
            slot += 15
    else:
        raise ValueError(f"U4 gate sets support SHORT and LONG, got {tag}")
    return Circuit(n, tuple(gates), slot)


def _ualpha(a: int, b: int, slot: int) -> list[Gate]:
    # RXX . RYY . RZZ on one pair; stays within the S=1 symmetry sector
    return [
        Gate(GateKind.RXX, (a, b), (slot,)),
        Gate(GateKind.RYY, (a, b), (slot + 1,)),
        Gate(GateKind.RZZ, (a, b), (slot + 2,)),
    ]


def short_variant_bonds(
    n: int, rg_pairs: Sequence[tuple[int, int]], couplings: Sequence[float]
) -> list[tuple[int, int]]:
    """Strongest-coupling nearest-neighbor bonds not already paired by the RG.

    Limited to ceil(#pairs / 2) - 1 bonds; ordered by descending coupling with
    ties broken by the lower bond index.
    """
    if len(couplings) != n - 1:
        raise ValueError(f"need {n - 1} couplings, got {len(couplings)}")
    paired = {tuple(sorted(p)) for p in rg_pairs}
    candidates = [
        (i, i + 1) for i in range(n - 1) if (i, i + 1) not in paired
    ]
    candidates.sort(key=lambda bond: (-couplings[bond[0]], bond[0]))
    limit = max(0, math.ceil(len(rg_pairs) / 2) - 1)
    return candidates[:limit]


def build_ualpha_gateset(
    n: int,
    tag: GateSetTag,
    rg=None,
    couplings: Sequence[float] | None = None,
) -> Circuit:
    """RXX.RYY.RZZ gate sets for the random-chain ansatz.

    rg may be an RgOutcome or a plain pair list; it is required for LONG and
    SHORT_VARIANT. SHORT_VARIANT additionally needs the bond couplings.
    """
    rg_pairs = getattr(rg, "pairs", rg)
    gates: list[Gate] = []
    slot = 0
    if tag is GateSetTag.SHORT:
        bonds = _brickwall_bonds(n)
    elif tag is GateSetTag.LONG:
        if rg_pairs is None:
            raise ValueError("LONG gate set requires the RG pairing")
        bonds = [tuple(p) for p in rg_pairs]
    elif tag is GateSetTag.SHORT_VARIANT:
        if rg_pairs is None:
            raise ValueError("SHORT_VARIANT requires the RG pairing")
        if couplings is None:
            raise ValueError("SHORT_VARIANT requires the bond couplings")
        bonds = short_variant_bonds(n, rg_pairs, couplings)
    else:
        raise ValueError(f"unknown gate-set tag {tag}")
    for a, b in bonds:
        gates.extend(_ualpha(a, b, slot))
        slot += 3
    return Circuit(n, tuple(gates), slot)


def initial_state_circuit(spec: AnsatzSpec) -> Circuit:
    """Fixed-gate (zero-parameter) preparation circuit for the initial state."""
    n = spec.n_qubits
    if spec.initial_state is InitialState.PRODUCT_ZERO:
        return Circuit(n, (), 0)
    if spec.initial_state is InitialState.SINGLET_LADDER:
        pairs = tuple((i, n - 1 - i) for i in range(n // 2))
    elif spec.initial_state is InitialState.SINGLET_NN:
        pairs = nn_pairs(n)
    else:  # SINGLET_RG
        pairs = spec.pairing
    return singlet_pair_circuit(n, pairs)


def assemble(spec: AnsatzSpec) -> tuple[Circuit, Circuit]:
    """(initial-state circuit, variational circuit) for an ansatz spec.

    The initial-state circuit carries no parameters; parameter indices cover
    only the variational part.
    """
    n = spec.n_qubits
    init = initial_state_circuit(spec)
    if spec.family is AnsatzFamily.IMPURITY_LAYERS:
        var = build_impurity_circuit(spec)
    elif spec.family is AnsatzFamily.LIGHTCONE:
        var = concat(n, [build_lightcone_layer(n) for _ in range(spec.n_layers)])
    elif spec.family is AnsatzFamily.U4_SEQUENCE:
        fragments = [
            build_u4_gateset(n, tag, spec.pairing)
            for _ in range(spec.n_layers)
            for tag in spec.sequence
        ]
        var = concat(n, fragments)
    else:  # UALPHA_SEQUENCE
        fragments = [
            build_ualpha_gateset(n, tag, spec.pairing, spec.couplings)
            for _ in range(spec.n_layers)
            for tag in spec.sequence
        ]
        var = concat(n, fragments)
    return init, var


def gates_touching(circuit: Circuit, qubit: int) -> int:
    """Number of two-qubit gates acting on the given qubit.

    For the impurity ansatz with central qubit c this equals the prospective
    circuit-cut count, 2 * |x_set|.
    """
    return sum(
        1 for g in circuit.gates if len(g.targets) == 2 and qubit in g.targets
    )
