"""Dense linear algebra and quantum primitives on named multi-qubit registers."""

from .layout import MAX_QUBITS, RegisterLayout, single_register
from .ops import (
    BASIS_VECTORS,
    CNOT,
    H,
    I2,
    SWAP2,
    X,
    Y,
    Z,
    Povm,
    Unitary,
    apply,
    apply_matrix,
    apply_matrix_raw,
    apply_on_qubits,
    apply_vector_matrix,
    compose_on_qubits,
    basis_projectors,
    binary_entropy,
    conditional_entropy,
    controlled,
    dephase_register,
    effect_probability,
    fidelity,
    kron_le,
    measure,
    partial_trace,
    partial_trace_raw,
    povm_probabilities,
    psd_sqrt,
    purified_distance,
    reduce_density_raw,
    purified_distance_pure,
    reduced_outer,
    two_outcome_povm,
    von_neumann_entropy,
)
from .rng import (
    as_generator,
    haar_random_unitary,
    random_density_matrix,
    random_pure_state,
    random_unit_vector,
    stream,
)
from .state import (
    BB84_VECTORS,
    BELL_VECTOR,
    PHI1_VECTOR,
    PHI2_VECTOR,
    QuantumState,
    assemble,
    basis_state,
    bb84_basis,
    bb84_state,
    bell_state,
    mixed_state,
    move_register_content,
    pure_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
