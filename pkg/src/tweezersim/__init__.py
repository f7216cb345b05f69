"""Seeded simulator of a single-atom optical-tweezer qubit experiment.

Subpackages:

* :mod:`tweezersim.states` -- exact linear algebra for small composite
  quantum systems (tensor products, partial trace, fidelity, beam splitter).
* :mod:`tweezersim.qubit` -- Rabi rotations, Ramsey / spin-echo coherence,
  trap transfer and transport sequences.
* :mod:`tweezersim.trap` -- blockaded occupancy telegraph, fluorescence
  counting, threshold discrimination, optical pumping, push-out readout.
* :mod:`tweezersim.emission` -- quantum-jump Monte Carlo of the pulsed
  single-photon emitter, master-equation cross-checks, detection thinning,
  coincidence histograms.
* :mod:`tweezersim.interference` -- two-photon interference with partial
  mode overlap and the photon-heralded two-atom entanglement filter.
* :mod:`tweezersim.harness` -- configuration, validation, experiment
  dispatch, deterministic CSV/JSON output.
"""

from .emission import (
    DetectionParams,
    EmissionRecord,
    EmitterParams,
    g2_histogram,
    pulse_photon_statistics,
    quantum_jump_trial,
    quantum_jump_trials,
    thin_detection,
    two_photon_probability,
)
from .harness import ExperimentConfig, RunReport, run, validate
from .interference import (
    HeraldConfig,
    HeraldOutcome,
    PhotonModePair,
    atom_photon_state,
    bell_decomposition,
    coincidence_vs_displacement,
    entanglement_rate,
    herald_filter,
    hom_coincidence_probability,
    singlet_state,
)
from .qubit import (
    DephasingModel,
    PulseSpec,
    TransportPlan,
    rabi_rotation,
    ramsey_contrast,
    ramsey_signal,
    spin_echo_signal,
    transfer_sequence,
    transport_echo,
)
from .rng import trial_rng
from .states import (
    DensityOperator,
    ModeOccupationBasis,
    StateVector,
    apply_unitary,
    basis_state,
    beam_splitter_unitary,
    fidelity,
    ket,
    partial_trace,
    tensor,
)
from .trap import (
    FluorescenceTrace,
    OccupancyProcess,
    ReadoutParams,
    classify_occupancy,
    fluorescence_trace,
    optical_pump,
    pushout_readout,
    simulate_occupancy,
    two_poisson_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "DensityOperator",
    "DephasingModel",
    "DetectionParams",
    "EmissionRecord",
    "EmitterParams",
    "ExperimentConfig",
    "FluorescenceTrace",
    "HeraldConfig",
    "HeraldOutcome",
    "ModeOccupationBasis",
    "OccupancyProcess",
    "PhotonModePair",
    "PulseSpec",
    "ReadoutParams",
    "RunReport",
    "StateVector",
    "TransportPlan",
    "apply_unitary",
    "atom_photon_state",
    "basis_state",
    "beam_splitter_unitary",
    "bell_decomposition",
    "classify_occupancy",
    "coincidence_vs_displacement",
    "entanglement_rate",
    "fidelity",
    "fluorescence_trace",
    "g2_histogram",
    "herald_filter",
    "hom_coincidence_probability",
    "ket",
    "optical_pump",
    "partial_trace",
    "pulse_photon_statistics",
    "pushout_readout",
    "quantum_jump_trial",
    "quantum_jump_trials",
    "rabi_rotation",
    "ramsey_contrast",
    "ramsey_signal",
    "run",
    "simulate_occupancy",
    "singlet_state",
    "spin_echo_signal",
    "tensor",
    "thin_detection",
    "transfer_sequence",
    "transport_echo",
    "trial_rng",
    "two_photon_probability",
    "two_poisson_threshold",
    "validate",
]
