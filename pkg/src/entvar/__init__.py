"""Variational algorithms for bipartite entanglement analysis.

A dense statevector/density-matrix simulator, hardware-efficient ansaetze,
noise channels, ADAM and sequential-coordinate optimizers, three end-to-end
drivers (Schmidt decomposition, log-negativity estimation, entanglement
detection) and the exact classical oracles that verify them.
"""

from .algorithms import (
    AnsatzConfig,
    DetectionResult,
    SchmidtResult,
    detect_entanglement,
    estimate_log_negativity,
    schmidt_basis_circuit,
    schmidt_decompose,
)
from .channels import KrausChannel, amplitude_damping, apply_channel, depolarizing
from .circuits import (
    AmplitudeLadder,
    Ansatz,
    Circuit,
    Gate,
    apply,
    apply_density,
    benchmark_two_qubit_state,
    build_amplitude_ladder,
    build_max_entangled_circuit,
    build_reference_circuit,
    gate_matrix,
    hardware_efficient_ansatz,
    inverse,
    ladder_amplitudes,
    uniform_schmidt_state,
)
from .cost import CostSpec, error_metric, evaluate_cost, readout_schmidt_coefficients
from .optim import OptimConfig, OptimTrace, adam_maximize, param_shift_gradient, smo_maximize
from .states import (
    Bipartition,
    DensityMatrix,
    StateVector,
    fidelity_pure,
    max_entangled_state,
    measure_probabilities,
    overlap_with_pure,
    partial_trace,
    random_pure_state,
    sample_counts,
    tensor_product,
)

__version__ = "0.1.0"
