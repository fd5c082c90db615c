//! Gate experiments built on the two-path scheme: settings, truth tables,
//! fidelity bounds, filter/splitter and fringe scans.

pub mod basis;
pub mod engine;
pub mod experiments;
pub mod fringe;
pub mod report;
pub mod settings;
pub mod splitter;
pub mod truth_table;

pub use basis::{basis, BasisSet, ProductState};
pub use experiments::{run_experiment, Experiment, ExperimentResult};
pub use fringe::{fit_fringe, fringe_scan, theta_grid, FringePoint};
pub use report::{average_fidelity, fidelity_report, FidelityReport};
pub use settings::{cu_settings, ef_settings, EfVariant, GateSettings};
pub use splitter::{eigen_splitter_check, SplitterReport};
pub use truth_table::{classical_fidelity, ideal_truth_table, measure_truth_table, FidelityForm, Mode, TruthTable};
