"""Desk-scale simulator of auxiliary-qubit networks for Schrodinger dynamics.

The register holds a wavefunction discretized on a periodic grid of 2**k
points; every linear operator of interest (momentum, kinetic, potential,
Euler step, Fourier transform) can be wrapped into a network
I (x) I + U (x) |1><0| on the register plus one auxiliary qubit.  Sums of
operators compose by multiplying networks, products by splicing connectors
between them, and a whole time evolution is a chain of identical step
networks.  Everything is verified against dense linear-algebra references.
"""

from .errors import (
    ConfigError,
    DegenerateGrid,
    DimensionMismatch,
    GridMismatch,
    IndexOutOfRange,
    InvalidSpec,
    NonFiniteValue,
    NonHermitianInput,
    NonPositiveFrequency,
    NonPositiveMass,
    NonSquareInput,
    NumericalFailure,
    PacketWidthWarning,
    QcpuSimError,
    ResidualTimeError,
    ZeroResultWarning,
    ZeroVector,
)
from .numerics import (
    CyclicShift,
    Dense,
    Diagonal,
    SpectralDecomposition,
    Transposition,
    decompose_hermitian,
    densify,
    exact_evolution,
    fidelity,
    hermiticity_defect,
    operator_dim,
    require_hermitian,
    spectral_norm_upper_bound,
    tensor,
)
from .qcpu import (
    AUX_ANNIHILATE,
    AUX_CREATE,
    QcpuFactor,
    QcpuNetwork,
    apply_network,
    build_network,
    compose_product,
    compose_sum,
    connector,
    connector_dagger,
    dense_from_factors,
    factor_matrix,
    full_multiplication_form,
    network_from_dict,
    network_to_dict,
    project_aux,
    raising_block,
)
from .grid import (
    ComReduction,
    DecoupledProblem,
    GridSpec,
    TwoParticleWavefunction,
    Wavefunction,
    com_reduction,
    dft_operator,
    kinetic_eigenvalue,
    kinetic_exchange_payload,
    kinetic_operator,
    lift_one,
    momentum_eigenvalue,
    momentum_operator,
    plane_wave_mode,
    potential_operator,
    sample,
    signed_mode,
    signed_momentum,
    symmetrize,
    two_body_potential,
    wavefunction_header,
    wavefunction_records,
)
from .evolve import (
    EvolutionConfig,
    EvolutionReport,
    euler_step,
    evolve_euler,
    kinetic_network,
    norm_drift,
    potential_network,
    report_rows,
    report_summary,
    step_network,
    whole_network,
)
from .systems import (
    GaussianPacketSpec,
    PotentialSpec,
    SystemSpec,
    analytic_free_gaussian,
    constant_field_evolution,
    diagonal_phase_network,
    free_particle_network,
    gaussian_packet,
    harmonic_energies,
    harmonic_network,
    spectral_free_propagator,
    spectral_kinetic_matrix,
    spectral_momentum_values,
)
from .config import (
    EvolutionSettings,
    InitialStateSpec,
    OutputSpec,
    RunConfig,
    load_run_config,
    parse_run_config,
)

__version__ = "0.1.0"
