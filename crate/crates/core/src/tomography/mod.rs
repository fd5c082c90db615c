//! Quantum process tomography of two-qubit gates in the two-path setup.

pub mod chi;
pub mod dataset;
pub mod reconstruct;
pub mod resample;

pub use chi::{ideal_chi, pauli_labels, process_fidelity, ChiJson, ChiMatrix};
pub use dataset::{expected_dataset, generate_dataset, Record, TomographyDataset};
pub use reconstruct::{linear_inversion, mle_reconstruct, LinearInversion, MleOptions, MleResult};
pub use resample::{error_bars, ErrorBars};
