//! The named gate experiments: settings, truth-table bases and analysis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::basis::{basis, BasisSet};
use super::report::{fidelity_report, FidelityReport};
use super::settings::{cu_settings, ef_settings, EfVariant, GateSettings};
use super::truth_table::{classical_fidelity, fidelity_form, ideal_truth_table, measure_truth_table, FidelityForm, Mode, TruthTable};
use crate::error::{Error, Result};
use crate::gates::{named_gate, NamedGate};
use crate::photonic::PatternClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Experiment {
    Cnot,
    Ch,
    Cz,
    CzPi2,
    CzPi4,
    Ef,
    Es,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Cnot,
        Experiment::Ch,
        Experiment::Cz,
        Experiment::CzPi2,
        Experiment::CzPi4,
        Experiment::Ef,
        Experiment::Es,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Cnot => "cnot",
            Experiment::Ch => "ch",
            Experiment::Cz => "cz",
            Experiment::CzPi2 => "cz-pi2",
            Experiment::CzPi4 => "cz-pi4",
            Experiment::Ef => "ef",
            Experiment::Es => "es",
        }
    }

    /// Target unitary of the controlled gates.
    pub fn target_gate(self) -> Option<NamedGate> {
        match self {
            Experiment::Cnot => Some(NamedGate::X),
            Experiment::Ch => Some(NamedGate::H),
            Experiment::Cz => Some(NamedGate::Z),
            Experiment::CzPi2 => Some(NamedGate::ZPhase(PI / 2.0)),
            Experiment::CzPi4 => Some(NamedGate::ZPhase(PI / 4.0)),
            Experiment::Ef | Experiment::Es => None,
        }
    }

    pub fn settings(self) -> GateSettings {
        match (self, self.target_gate()) {
            (_, Some(g)) => cu_settings(&named_gate(g)).expect("2x2 gate"),
            (Experiment::Ef, None) => ef_settings(EfVariant::Projector),
            _ => ef_settings(EfVariant::Unitary),
        }
    }

    /// Input basis, output basis and pattern class of each truth table.
    pub fn tables(self) -> Result<Vec<(BasisSet, BasisSet, PatternClass)>> {
        let sum = PatternClass::Sum;
        let pair = |a: &str, b: &str| -> Result<(BasisSet, BasisSet, PatternClass)> { Ok((basis(a)?, basis(b)?, sum)) };
        let same = |a: &str| pair(a, a);
        Ok(match self {
            Experiment::Cnot => vec![same("HV-HV")?, same("DA-DA")?],
            Experiment::Ch => vec![same("HV-JK")?, same("DA-MN")?],
            Experiment::Cz => vec![same("HV-DA")?, same("DA-HV")?],
            Experiment::CzPi2 => vec![same("HV-HV")?, pair("HV-DA", "HD,HA,VR,VL")?],
            Experiment::CzPi4 => vec![same("HV-HV")?, pair("HV-DA", "HD,HA,VT,VS")?],
            Experiment::Ef => vec![same("HV-HV")?],
            Experiment::Es => {
                let hv = basis("HV-HV")?;
                vec![
                    (hv.clone(), hv.clone(), PatternClass::Sum),
                    (hv.clone(), hv, PatternClass::Difference),
                ]
            }
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownGate(format!("unknown experiment `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub mode: String,
    pub tables: Vec<TruthTable>,
    pub ideal: Vec<TruthTable>,
    pub fidelities: Vec<f64>,
    pub forms: Vec<FidelityForm>,
    /// Mean of the table fidelities.
    pub mean_fidelity: f64,
    /// Process-fidelity bounds for the two-table controlled gates.
    pub report: Option<FidelityReport>,
}

/// Per-table seed in sampled mode.
fn table_mode(mode: &Mode, index: usize) -> Mode {
    match *mode {
        Mode::Exact => Mode::Exact,
        Mode::Sampled { noise, seed } => Mode::Sampled {
            noise,
            seed: seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        },
    }
}

pub fn run_experiment(exp: Experiment, mode: &Mode) -> Result<ExperimentResult> {
    let settings = exp.settings();
    let mut tables = Vec::new();
    let mut ideal = Vec::new();
    let mut fidelities = Vec::new();
    let mut forms = Vec::new();
    for (i, (inb, outb, class)) in exp.tables()?.into_iter().enumerate() {
        let op = match class {
            PatternClass::Sum => settings.sum_operator(),
            PatternClass::Difference => settings.difference_operator(),
        };
        let id = ideal_truth_table(&op, &inb, &outb, class)?;
        let t = measure_truth_table(&settings, &inb, &outb, class, &table_mode(mode, i))?;
        fidelities.push(classical_fidelity(&t, &id)?);
        forms.push(fidelity_form(&id));
        tables.push(t);
        ideal.push(id);
    }
    let report = match (exp.target_gate(), fidelities.as_slice()) {
        (Some(_), &[f1, f2]) => Some(fidelity_report(f1.clamp(0.0, 1.0), f2.clamp(0.0, 1.0), 4)?),
        _ => None,
    };
    Ok(ExperimentResult {
        name: exp.name().to_string(),
        mode: mode.label().to_string(),
        mean_fidelity: fidelities.iter().sum::<f64>() / fidelities.len() as f64,
        tables,
        ideal,
        fidelities,
        forms,
        report,
    })
}
