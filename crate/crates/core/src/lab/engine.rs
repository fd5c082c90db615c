//! Two-photon two-path simulation with waveplate imperfections.
//!
//! The red photons pass a preparation error then `A1`/`A2`, the blue photons a
//! preparation error then `B1`/`B2`; both are mixed on the output
//! beamsplitters and analyzed per slot.

use std::collections::BTreeMap;

use super::basis::Ket;
use super::settings::GateSettings;
use crate::error::Result;
use crate::gates;
use crate::linalg::{CarrierState, Operator, C64, EXACT_TOL};
use crate::photonic::noise::WaveplateJitter;
use crate::photonic::{
    run_two_path, run_two_path_sources, BranchStates, DetectionPattern, FockState, NoiseModel, OpticalElement,
    PatternClass, TwoPathAmplitude,
};

/// Factor taking a two-photon pattern amplitude to the relative amplitude
/// whose squared modulus, summed over the two patterns of a class, equals
/// `|⟨out|(A±B)|φ⟩|²`.
pub const RELATIVE_SCALE: f64 = 2.0;

/// Preparation rotation errors on modes `1r, 2r, 1b, 2b`.
pub type PrepErrors = [f64; 4];

/// Analyzer rotation errors on slots 1 and 2.
pub type AnalyzerErrors = [f64; 2];

fn is_plain_waveplate(op: &Operator) -> bool {
    op.is_unitary() && op.max_abs_diff(&Operator::qubits_identity(1)) > EXACT_TOL
}

/// Unitary non-identity settings are waveplates and pick up an angle error;
/// projectors are PBS-based and identities are empty paths, both left exact.
pub fn perturb_settings(settings: &GateSettings, jitter: &mut WaveplateJitter) -> GateSettings {
    let mut p = |op: &Operator| {
        if is_plain_waveplate(op) {
            jitter.perturb(op)
        } else {
            op.clone()
        }
    };
    GateSettings {
        a1: p(&settings.a1),
        a2: p(&settings.a2),
        b1: p(&settings.b1),
        b2: p(&settings.b2),
    }
}

pub fn draw_prep(jitter: &mut WaveplateJitter) -> PrepErrors {
    [jitter.draw(), jitter.draw(), jitter.draw(), jitter.draw()]
}

pub fn draw_analyzer(jitter: &mut WaveplateJitter) -> AnalyzerErrors {
    [jitter.draw(), jitter.draw()]
}

fn jones(port: &str, op: Operator) -> OpticalElement {
    OpticalElement::jones(port, op).expect("2x2")
}

/// Element lists for the red and blue branches.
pub fn branch_elements(settings: &GateSettings, prep: &PrepErrors) -> (Vec<OpticalElement>, Vec<OpticalElement>) {
    let mut red = Vec::new();
    let mut blue = Vec::new();
    for (i, (port, list)) in [("1r", 0), ("2r", 0), ("1b", 1), ("2b", 1)].into_iter().enumerate() {
        if prep[i] != 0.0 {
            let e = jones(port, gates::rotation(prep[i]));
            if list == 0 {
                red.push(e);
            } else {
                blue.push(e);
            }
        }
    }
    red.push(jones("1r", settings.a1.clone()));
    red.push(jones("2r", settings.a2.clone()));
    blue.push(jones("1b", settings.b1.clone()));
    blue.push(jones("2b", settings.b2.clone()));
    (red, blue)
}

/// Branch-resolved pattern states for input `phi`.
pub fn simulate(
    settings: &GateSettings,
    phi: &CarrierState,
    prep: &PrepErrors,
) -> Result<BTreeMap<DetectionPattern, BranchStates>> {
    let (red, blue) = branch_elements(settings, prep);
    run_two_path(phi, &red, &blue)
}

/// As [`simulate`] with explicit source halves (e.g. the Sagnac source).
pub fn simulate_sources(
    settings: &GateSettings,
    sources: &(FockState, FockState),
    prep: &[(String, Operator)],
) -> Result<BTreeMap<DetectionPattern, BranchStates>> {
    let mut red: Vec<OpticalElement> = Vec::new();
    let mut blue: Vec<OpticalElement> = Vec::new();
    for (port, op) in prep {
        let e = jones(port, op.clone());
        if port.ends_with('r') {
            red.push(e);
        } else {
            blue.push(e);
        }
    }
    let (r, b) = branch_elements(settings, &[0.0; 4]);
    red.extend(r);
    blue.extend(b);
    run_two_path_sources(&sources.0, &sources.1, &red, &blue)
}

fn project(state: &CarrierState, analyzer: &[Ket; 2]) -> C64 {
    let a = state.amplitudes();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += analyzer[0][i].conj() * analyzer[1][j].conj() * a[2 * i + j];
        }
    }
    acc
}

/// Rotate an analyzer ket by `delta`.
pub fn rotate_ket(k: &Ket, delta: f64) -> Ket {
    if delta == 0.0 {
        return *k;
    }
    let (s, co) = delta.sin_cos();
    [k[0] * co - k[1] * s, k[0] * s + k[1] * co]
}

/// Relative two-path amplitudes of the analyzer outcome, one per pattern in `class`.
pub fn class_amplitudes(
    patterns: &BTreeMap<DetectionPattern, BranchStates>,
    class: PatternClass,
    analyzer: &[Ket; 2],
    errors: &AnalyzerErrors,
) -> Vec<TwoPathAmplitude> {
    let kets = [rotate_ket(&analyzer[0], errors[0]), rotate_ket(&analyzer[1], errors[1])];
    patterns
        .iter()
        .filter(|(p, _)| p.class() == class)
        .map(|(_, s)| {
            TwoPathAmplitude::new(
                project(&s.red, &kets) * RELATIVE_SCALE,
                project(&s.blue, &kets) * RELATIVE_SCALE,
            )
        })
        .collect()
}

/// Summed relative weight: coherent when `noise` is `None`.
pub fn weight(amps: &[TwoPathAmplitude], noise: Option<&NoiseModel>) -> f64 {
    amps.iter()
        .map(|a| match noise {
            Some(n) => a.noisy_probability(n),
            None => a.coherent_probability(),
        })
        .sum()
}
