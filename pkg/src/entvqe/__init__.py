"""State-vector VQE experiments with entanglement-informed ansatz families."""

__version__ = "0.1.0"

from .ansatz import AnsatzFamily, AnsatzSpec, GateSetTag, InitialState, assemble
from .entanglement import entanglement_report, entropy, match_count, reduced_density, spectrum
from .exact_solver import ExactReference, lowest_eigenpairs, project_onto_degenerate
from .models import (
    ImpurityModelParams,
    LadderModelParams,
    PauliSum,
    RandomChainParams,
    build_ladder,
    build_random_chain,
    build_tfim,
    build_xxz,
)
from .rg_flow import RgOutcome, run_rg, sample_couplings, singlet_length_stats
from .statevector import (
    Circuit,
    Gate,
    GateKind,
    StateVector,
    apply_circuit,
    apply_gate,
    apply_u4,
    expectation,
    prepare_singlet_pairs,
    zero_state,
)
from .vqe import VqeConfig, VqeResult, energy_and_gradient, layer_sweep, minimize, plateau_value

__all__ = [
    "__version__",
    "AnsatzFamily",
    "AnsatzSpec",
    "Circuit",
    "ExactReference",
    "Gate",
    "GateKind",
    "GateSetTag",
    "ImpurityModelParams",
    "InitialState",
    "LadderModelParams",
    "PauliSum",
    "RandomChainParams",
    "RgOutcome",
    "StateVector",
    "VqeConfig",
    "VqeResult",
    "apply_circuit",
    "apply_gate",
    "apply_u4",
    "assemble",
    "build_ladder",
    "build_random_chain",
    "build_tfim",
    "build_xxz",
    "energy_and_gradient",
    "entanglement_report",
    "entropy",
    "expectation",
    "layer_sweep",
    "lowest_eigenpairs",
    "match_count",
    "minimize",
    "plateau_value",
    "prepare_singlet_pairs",
    "project_onto_degenerate",
    "reduced_density",
    "run_rg",
    "sample_couplings",
    "singlet_length_stats",
    "spectrum",
    "zero_state",
]
