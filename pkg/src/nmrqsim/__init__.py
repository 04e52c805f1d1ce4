"""Gate-level quantum simulation of liquid-state NMR spectra.

Pipeline: molecule -> rotating-frame spin Hamiltonian -> native-gate
Trotter circuits -> noisy density-matrix evolution -> correlation
functions -> spectra, with an exact dense oracle, a per-gate error
budget (effective decoherence rate), and a Lindblad equation-of-motion
cross-check.
"""

__version__ = "0.1.0"

from .circuit_builder import (
    Circuit,
    Gate,
    circuit_unitary,
    decompose_heisenberg,
    dump_circuit,
    gate_census,
    trotter_step,
)
from .exact_reference import dense_hamiltonian, exact_correlations, exact_spectrum
from .lindblad_eom import (
    EomEstimate,
    LindbladModel,
    broadening_estimate,
    integrate,
    master_rhs,
    model_from_budget,
    regression_correlation,
)
from .noise_budget import (
    ErrorBudget,
    budget_from_circuit,
    gamma_eff,
    ingest_calibration,
    linewidth_ppm,
    reduction_advice,
)
from .noisy_simulator import (
    CorrelationRecord,
    NoiseModel,
    apply_gate_with_noise,
    assemble_correlations,
    depolarizing_probability,
    run_all_sectors,
    run_sector,
)
from .spectrum_pipeline import Spectrum, spectrum_from_record, zero_pad
from .spin_system import (
    FrameConfig,
    HamiltonianTerms,
    MoleculeSpec,
    build_rotating_frame_terms,
    cis_3_chloroacrylic_acid,
    frame_for,
    larmor_frequency_hz,
    load_molecule,
    reduce_couplings,
    trichlorobenzene,
)

__all__ = [name for name in dir() if not name.startswith("_")]
