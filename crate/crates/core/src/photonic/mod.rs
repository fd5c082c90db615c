//! Sparse Fock-space simulation of the polarization/path experiments.

pub mod element;
pub mod fock;
pub mod noise;
pub mod schemes;
pub mod source;

pub use element::{apply_element, single_photon_matrix, ElementSpec, OpticalCircuit, OpticalElement};
pub use fock::{FockState, ModeLabel, Pol};
pub use noise::{sample_counts, NoiseModel, TwoPathAmplitude, WaveplateJitter};
pub use schemes::{
    accepting_probability, build_cp_gate, run_entanglement_scheme, run_linear_combination, run_two_path,
    run_two_path_sources,
    BranchStates, ClassOutcome, DetectionPattern, PatternClass, PatternOutcome,
};
pub use source::{prepare_type1_source, prepare_type2_sagnac, type2_sagnac_branches, Branch};
