"""Peripheral-space structure and infinite-time capacities of quantum channels."""

from .algebra import (
    Block,
    LinearSpan,
    OrthogonalProjection,
    PeripheralStructure,
    center_span,
    commutant_span,
    construct_basis,
    decompose_minimal,
    extract_structure,
    find_one_minimal,
    fixed_densities,
    fixed_point_span,
    reduce_projection,
    structure_from_dims,
)
from .capacity import (
    CapacityReport,
    GammaAllocation,
    additivity_compose,
    capacity_report,
    classical_capacity_inf,
    iid_rate_bounds,
    optimal_fidelity_bounds,
    qms_capacity,
    quantum_capacity_bounds,
)
from .channel import (
    ChannelSuperOp,
    KrausChannel,
    LindbladGenerator,
    choi_matrix,
    compose,
    identity_superop,
    kraus_to_superop,
    lindblad_to_superop,
    power,
    superop_exp,
    tensor,
    unitary_superop,
    validate_cptp,
)
from .codes import (
    CodePair,
    PeripheralAction,
    avg_classical_fidelity,
    build_classical_code,
    build_quantum_code,
    entanglement_fidelity,
    extract_peripheral_action,
)
from .errors import (
    AmbiguousSpectrumError,
    ConvergenceError,
    IllConditionedError,
    NumericalError,
    PeripheralError,
    ValidationError,
)
from .markov import ChainStructure, StochasticMatrix, bottom_scc_periods, classical_chain_capacity, embed_stochastic
from .spectral import PeripheralProjectionChannel, Spectrum, eig_decompose, peripheral_projection, qms_peripheral_generators
from .tolerances import Tolerances

__version__ = "0.1.0"
