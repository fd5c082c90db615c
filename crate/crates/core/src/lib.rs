//! Controlled operations by Hilbert-space extension: qudit-level construction,
//! a linear-optics simulator of the photonic realization, the gate experiments
//! built on it, process tomography and gate-count estimates.

pub mod error;
pub mod gates;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod photonic;
pub mod qudit;
pub mod resources;
pub mod tomography;

pub use error::{Error, Result};
pub use linalg::{CarrierState, Operator, C64};
