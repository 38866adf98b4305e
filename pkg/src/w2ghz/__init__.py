"""Simulation of converting a three-atom W state into a GHZ state by
interference and detection of cavity-emitted polarized photons."""

from .analysis import (
    CurvePoint,
    FidelityEstimates,
    SweepSpec,
    fidelity_surface,
    master_equation_estimates,
    master_equation_fidelity,
    pd_closed_form,
    pd_sweep,
    reference_noise_params,
)
from .atom_cavity import (
    AtomLevel,
    DerivedRates,
    SystemParams,
    collapse_operators,
    conditional_hamiltonian,
    effective_hamiltonian,
    full_hamiltonian,
)
from .detection import (
    ClickPattern,
    DetectionReport,
    OutcomeClass,
    classify_pattern,
    enumerate_outcomes,
    measure,
    povm_elements,
    success_probability_ideal,
)
from .dynamics import (
    EvolutionCoefficients,
    IntegratorConfig,
    compare_full_vs_effective,
    decay_coefficients,
    ideal_coefficients,
    lindblad_evolve,
    schrodinger_evolve,
)
from .hilbert import (
    DensityMatrix,
    HilbertSpace,
    Operator,
    StateVector,
    fidelity,
    partial_trace,
    propagator,
    tensor,
    trace_distance,
)
from .photonics import (
    DEFAULT_LAYOUT,
    JointAtomPhotonState,
    NetworkLayout,
    PolarizedPhotonMode,
    apply_hwp,
    apply_pbs_routing,
    emit_and_qwp,
    full_network,
)
from .protocol import (
    ProtocolResult,
    ProtocolRun,
    apply_hadamard_pulses,
    cavity_interaction,
    ghz_target,
    prepare_w_state,
    raman_mapping,
    run_protocol,
    sign_correction,
)

__version__ = "0.1.0"

__all__ = [
    "AtomLevel",
    "ClickPattern",
    "CurvePoint",
    "DensityMatrix",
    "DerivedRates",
    "DetectionReport",
    "DEFAULT_LAYOUT",
    "EvolutionCoefficients",
    "FidelityEstimates",
    "SweepSpec",
    "HilbertSpace",
    "IntegratorConfig",
    "JointAtomPhotonState",
    "NetworkLayout",
    "Operator",
    "OutcomeClass",
    "PolarizedPhotonMode",
    "ProtocolResult",
    "ProtocolRun",
    "StateVector",
    "SystemParams",
    "apply_hadamard_pulses",
    "apply_hwp",
    "apply_pbs_routing",
    "cavity_interaction",
    "classify_pattern",
    "collapse_operators",
    "compare_full_vs_effective",
    "conditional_hamiltonian",
    "decay_coefficients",
    "effective_hamiltonian",
    "emit_and_qwp",
    "enumerate_outcomes",
    "fidelity",
    "fidelity_surface",
    "full_hamiltonian",
    "full_network",
    "ghz_target",
    "ideal_coefficients",
    "lindblad_evolve",
    "master_equation_estimates",
    "master_equation_fidelity",
    "measure",
    "partial_trace",
    "pd_closed_form",
    "pd_sweep",
    "povm_elements",
    "prepare_w_state",
    "propagator",
    "raman_mapping",
    "reference_noise_params",
    "run_protocol",
    "schrodinger_evolve",
    "sign_correction",
    "success_probability_ideal",
    "tensor",
    "trace_distance",
]
