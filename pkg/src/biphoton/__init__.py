"""Two-photon bound states and scattering resonances of a waveguide-coupled emitter array."""

from .errors import (
    BiphotonError,
    ChiralNoGap,
    DegenerateOmega,
    DivergentAnsatz,
    EmptyRange,
    IoFailure,
    NoBoundState,
    NoConvergence,
    NotBoundCandidate,
    NotChiral,
    NotInGap,
    NotRealizable,
    NotResonanceCandidate,
    PoleAtK,
    PoleAtZ,
    SingularSystem,
    UnitarityViolation,
)
from .lattice import (
    ResidualReport,
    TruncatedHamiltonian,
    ansatz_image_residual,
    build_truncated_hamiltonian,
    eigenstate_residual,
)
from .model import (
    BandInterval,
    CouplingConfig,
    DosHistogram,
    GapRegion,
    band_label,
    continuum_bands,
    free_pair_energy,
    gap_region,
    pair_density_of_states,
    single_photon_energy,
    uncovered_windows,
    wrap_momentum,
)
from .quartic import (
    QuarticCoefficients,
    RootSet,
    StateClass,
    classify_roots,
    quartic_coefficients,
    solve_reciprocal_quartic,
    solve_zero_energy,
)
from .resonance import (
    PeakReport,
    ResonanceProfile,
    ResonanceSolution,
    candidate_windows,
    locate_peak,
    phase_winding,
    refined_peak,
    resonance_branches,
    resonance_scan,
    solve_resonance,
    track_branch_peak,
)
from .spectrum import (
    AnsatzImage,
    BoundSearch,
    BoundState,
    ansatz_image,
    bound_determinant,
    bound_dispersion,
    bound_wavefunction,
    chiral_bound,
    constraint_residual,
    find_bound_state,
    pair_energy_of_z,
    special_bound_k0,
    unit_edge_energies,
)
from .table import Column, ScanTable, emit_table, render_csv, render_json

__version__ = "0.1.0"
