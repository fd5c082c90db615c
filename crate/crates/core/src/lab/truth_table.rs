//! Truth-table measurement and classical fidelity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::BasisSet;
use super::engine::{self, AnalyzerErrors, PrepErrors};
use super::settings::GateSettings;
use crate::error::{Error, Result};
use crate::io::fmt_sig12;
use crate::linalg::Operator;
use crate::photonic::noise::{poisson, WaveplateJitter};
use crate::photonic::{NoiseModel, PatternClass};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Mode {
    Exact,
    Sampled { noise: NoiseModel, seed: u64 },
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub input_basis: String,
    pub output_basis: String,
    pub class: PatternClass,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Relative weights `|⟨out|(A±B)|in⟩|²` (exact) or coincidence counts (sampled).
    pub weights: Vec<Vec<f64>>,
    /// Rows of `weights` normalized to 1; all-zero when nothing is transmitted.
    pub probabilities: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<Vec<u64>>>,
    pub mode: String,
    /// Expected counts for a unit-weight cell in sampled mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<f64>,
}

fn normalize_rows(weights: &[Vec<f64>]) -> Vec<Vec<f64>> {
    weights
        .iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter().map(|w| w / s).collect()
            } else {
                vec![0.0; row.len()]
            }
        })
        .collect()
}

impl TruthTable {
    fn build(
        in_basis: &BasisSet,
        out_basis: &BasisSet,
        class: PatternClass,
        weights: Vec<Vec<f64>>,
        counts: Option<Vec<Vec<u64>>>,
        mode: &str,
        integration: Option<f64>,
    ) -> Self {
        TruthTable {
            input_basis: in_basis.name.clone(),
            output_basis: out_basis.name.clone(),
            class,
            inputs: in_basis.labels(),
            outputs: out_basis.labels(),
            probabilities: normalize_rows(&weights),
            weights,
            counts,
            mode: mode.to_string(),
            integration,
        }
    }

    /// Transmitted weight per input row.
    pub fn row_totals(&self) -> Vec<f64> {
        self.weights.iter().map(|r| r.iter().sum()).collect()
    }

    /// CSV records: header `input,<outputs…>` then one row of probabilities
    /// per input.
    pub fn to_records(&self) -> Vec<Vec<String>> {
        let mut out = Vec::with_capacity(self.inputs.len() + 1);
        let mut header = vec!["input".to_string()];
        header.extend(self.outputs.iter().cloned());
        out.push(header);
        for (label, row) in self.inputs.iter().zip(&self.probabilities) {
            let mut r = vec![label.clone()];
            r.extend(row.iter().map(|&p| fmt_sig12(p)));
            out.push(r);
        }
        out
    }
}

/// `|⟨out|op|in⟩|²` for every basis pair.
pub fn ideal_truth_table(op: &Operator, in_basis: &BasisSet, out_basis: &BasisSet, class: PatternClass) -> Result<TruthTable> {
    let mut weights = Vec::with_capacity(in_basis.len());
    for s in &in_basis.states {
        let v = op.apply(&s.state())?;
        weights.push(
            out_basis
                .states
                .iter()
                .map(|o| o.state().inner(&v).norm_sqr())
                .collect(),
        );
    }
    Ok(TruthTable::build(in_basis, out_basis, class, weights, None, "ideal", None))
}

/// Runs every input of `in_basis` through the two-path setup and records the
/// `class` coincidences analyzed in `out_basis`.
///
/// Sampled mode draws, in order: gate-setting errors, preparation errors per
/// input row, analyzer errors per output column, then the Poisson counts.
pub fn measure_truth_table(
    settings: &GateSettings,
    in_basis: &BasisSet,
    out_basis: &BasisSet,
    class: PatternClass,
    mode: &Mode,
) -> Result<TruthTable> {
    let (noise, mut jitter) = match mode {
        Mode::Exact => (None, None),
        Mode::Sampled { noise, seed } => {
            noise.validate()?;
            (Some(*noise), Some(WaveplateJitter::new(noise.waveplate_angle_error_sigma, *seed)))
        }
    };
    let realized = match jitter.as_mut() {
        Some(j) => engine::perturb_settings(settings, j),
        None => settings.clone(),
    };
    let preps: Vec<PrepErrors> = in_basis
        .states
        .iter()
        .map(|_| jitter.as_mut().map(engine::draw_prep).unwrap_or([0.0; 4]))
        .collect();
    let analyzers: Vec<AnalyzerErrors> = out_basis
        .states
        .iter()
        .map(|_| jitter.as_mut().map(engine::draw_analyzer).unwrap_or([0.0; 2]))
        .collect();
    let mut expected = Vec::with_capacity(in_basis.len());
    for (s, prep) in in_basis.states.iter().zip(&preps) {
        let patterns = engine::simulate(&realized, &s.state(), prep)?;
        let row: Vec<f64> = out_basis
            .states
            .iter()
            .zip(&analyzers)
            .map(|(o, err)| {
                let amps = engine::class_amplitudes(&patterns, class, &o.kets, err);
                engine::weight(&amps, noise.as_ref())
            })
            .collect();
        expected.push(row);
    }
    match (noise, jitter) {
        (Some(n), Some(mut j)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(j.fork());
            let counts: Vec<Vec<u64>> = expected
                .iter()
                .map(|row| row.iter().map(|&w| poisson(n.poisson_counts * w, &mut rng)).collect())
                .collect();
            let weights = counts
                .iter()
                .map(|r| r.iter().map(|&k| k as f64).collect())
                .collect();
            Ok(TruthTable::build(
                in_basis,
                out_basis,
                class,
                weights,
                Some(counts),
                "sampled",
                Some(n.poisson_counts),
            ))
        }
        _ => Ok(TruthTable::build(in_basis, out_basis, class, expected, None, "exact", None)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FidelityForm {
    /// Mean over inputs of the probability landing on the ideal outputs.
    Gate,
    /// Correctly transmitted weight over all transmitted weight.
    Filter,
}

/// Filter form whenever the ideal table blocks some input entirely,
/// otherwise gate form.
pub fn fidelity_form(ideal: &TruthTable) -> FidelityForm {
    if ideal.row_totals().iter().any(|&t| t <= 1e-12) {
        FidelityForm::Filter
    } else {
        FidelityForm::Gate
    }
}

pub fn classical_fidelity(measured: &TruthTable, ideal: &TruthTable) -> Result<f64> {
    if measured.inputs != ideal.inputs || measured.outputs != ideal.outputs {
        return Err(Error::BasisMismatch(format!(
            "measured {}/{} vs ideal {}/{}",
            measured.input_basis, measured.output_basis, ideal.input_basis, ideal.output_basis
        )));
    }
    match fidelity_form(ideal) {
        FidelityForm::Gate => {
            let n = measured.inputs.len() as f64;
            Ok(measured
                .probabilities
                .iter()
                .zip(&ideal.probabilities)
                .map(|(m, i)| m.iter().zip(i).map(|(a, b)| a * b).sum::<f64>())
                .sum::<f64>()
                / n)
        }
        FidelityForm::Filter => {
            let mut good = 0.0;
            let mut total = 0.0;
            for (m, i) in measured.weights.iter().zip(&ideal.probabilities) {
                for (w, p) in m.iter().zip(i) {
                    total += w;
                    good += w * p;
                }
            }
            if total <= 0.0 {
                return Err(Error::Precondition("no transmitted pairs".into()));
            }
            Ok(good / total)
        }
    }
}
