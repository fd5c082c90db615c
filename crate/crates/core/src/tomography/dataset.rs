//! Tomography datasets: 16 product preparations from `{H, V, D, R}` and 36
//! product projectors from `{H, V, D, A, R, L}`, all through the sum class.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_sig12;
use crate::lab::basis::ProductState;
use crate::lab::engine;
use crate::lab::GateSettings;
use crate::photonic::noise::{poisson, WaveplateJitter};
use crate::photonic::{NoiseModel, PatternClass};

pub const PREP_STATES: [char; 4] = ['H', 'V', 'D', 'R'];
pub const MEAS_STATES: [char; 6] = ['H', 'V', 'D', 'A', 'R', 'L'];

fn pairs(letters: &[char]) -> Vec<String> {
    letters
        .iter()
        .flat_map(|a| letters.iter().map(move |b| format!("{a}{b}")))
        .collect()
}

pub fn prep_labels() -> Vec<String> {
    pairs(&PREP_STATES)
}

pub fn meas_labels() -> Vec<String> {
    pairs(&MEAS_STATES)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub prep: String,
    pub meas: String,
    pub count: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyDataset {
    pub records: Vec<Record>,
    /// Expected counts for a unit-weight outcome.
    pub shots_per_setting: f64,
    /// `true` for Poisson counts, `false` for expectation values.
    pub sampled: bool,
    pub seed: Option<u64>,
}

fn build(
    settings: &GateSettings,
    noise: Option<&NoiseModel>,
    shots: f64,
    seed: Option<u64>,
) -> Result<TomographyDataset> {
    if !(shots > 0.0 && shots.is_finite()) {
        return Err(Error::OutOfRange(format!("shots_per_setting must be > 0, got {shots}")));
    }
    if let Some(n) = noise {
        n.validate()?;
    }
    let sigma = noise.map_or(0.0, |n| n.waveplate_angle_error_sigma);
    let mut jitter = WaveplateJitter::new(sigma, seed.unwrap_or(0));
    let realized = engine::perturb_settings(settings, &mut jitter);
    let preps: Vec<(ProductState, engine::PrepErrors)> = prep_labels()
        .iter()
        .map(|l| Ok((ProductState::parse(l)?, engine::draw_prep(&mut jitter))))
        .collect::<Result<_>>()?;
    let meas: Vec<(ProductState, engine::AnalyzerErrors)> = meas_labels()
        .iter()
        .map(|l| Ok((ProductState::parse(l)?, engine::draw_analyzer(&mut jitter))))
        .collect::<Result<_>>()?;
    let mut rng = seed.map(|_| ChaCha8Rng::seed_from_u64(jitter.fork()));
    let mut records = Vec::with_capacity(preps.len() * meas.len());
    for (p, perr) in &preps {
        let patterns = engine::simulate(&realized, &p.state(), perr)?;
        for (m, merr) in &meas {
            let amps = engine::class_amplitudes(&patterns, PatternClass::Sum, &m.kets, merr);
            let mean = shots * engine::weight(&amps, noise);
            let count = match rng.as_mut() {
                Some(r) => poisson(mean, r) as f64,
                None => mean,
            };
            records.push(Record {
                prep: p.label.clone(),
                meas: m.label.clone(),
                count,
            });
        }
    }
    Ok(TomographyDataset {
        records,
        shots_per_setting: shots,
        sampled: seed.is_some(),
        seed,
    })
}

/// Expected counts, no sampling. `noise` adds its phase/distinguishability
/// averaging; its waveplate errors are not drawn without a seed.
pub fn expected_dataset(settings: &GateSettings, noise: Option<&NoiseModel>, shots_per_setting: f64) -> Result<TomographyDataset> {
    let n = noise.map(|n| NoiseModel {
        waveplate_angle_error_sigma: 0.0,
        ..*n
    });
    build(settings, n.as_ref(), shots_per_setting, None)
}

/// Poisson counts with `shots_per_setting` expected for a unit-weight outcome.
pub fn generate_dataset(
    settings: &GateSettings,
    noise: &NoiseModel,
    shots_per_setting: f64,
    seed: u64,
) -> Result<TomographyDataset> {
    build(settings, Some(noise), shots_per_setting, Some(seed))
}

impl TomographyDataset {
    pub fn total(&self) -> f64 {
        self.records.iter().map(|r| r.count).sum()
    }

    /// Each count replaced by a Poisson draw around it.
    pub fn resampled<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        TomographyDataset {
            records: self
                .records
                .iter()
                .map(|r| Record {
                    count: poisson(r.count, rng) as f64,
                    ..r.clone()
                })
                .collect(),
            sampled: true,
            ..self.clone()
        }
    }

    /// CSV records `prep_label,meas_label,count`.
    pub fn to_records(&self) -> Vec<Vec<String>> {
        let mut out = vec![vec!["prep_label".to_string(), "meas_label".into(), "count".into()]];
        out.extend(
            self.records
                .iter()
                .map(|r| vec![r.prep.clone(), r.meas.clone(), fmt_sig12(r.count)]),
        );
        out
    }

    /// Parses rows of `prep_label,meas_label,count` (no header).
    pub fn from_rows(rows: &[Vec<String>], shots_per_setting: f64) -> Result<Self> {
        let prep_ok = prep_labels();
        let meas_ok = meas_labels();
        let mut records = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 fields", i + 1)));
            }
            let count: f64 = row[2]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad count `{}`", i + 1, row[2])))?;
            if !(count >= 0.0 && count.is_finite()) {
                return Err(Error::Parse(format!("row {}: negative count", i + 1)));
            }
            if !prep_ok.contains(&row[0]) || !meas_ok.contains(&row[1]) {
                return Err(Error::Parse(format!("row {}: unknown label", i + 1)));
            }
            records.push(Record {
                prep: row[0].clone(),
                meas: row[1].clone(),
                count,
            });
        }
        Ok(TomographyDataset {
            records,
            shots_per_setting,
            sampled: true,
            seed: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{named_gate, NamedGate};
    use crate::lab::cu_settings;

    #[test]
    fn sizes_and_determinism() {
        let s = cu_settings(&named_gate(NamedGate::X)).unwrap();
        let n = NoiseModel::calibrated();
        let a = generate_dataset(&s, &n, 2000.0, 1).unwrap();
        assert_eq!(a.records.len(), 576);
        assert_eq!(a, generate_dataset(&s, &n, 2000.0, 1).unwrap());
        assert_ne!(a, generate_dataset(&s, &n, 2000.0, 2).unwrap());
        assert!(a.records.iter().all(|r| r.count >= 0.0 && r.count.fract() == 0.0));
    }

    #[test]
    fn expected_counts_match_unitary() {
        let s = cu_settings(&named_gate(NamedGate::X)).unwrap();
        let d = expected_dataset(&s, None, 1000.0).unwrap();
        let r = d.records.iter().find(|r| r.prep == "VH" && r.meas == "VV").unwrap();
        assert!((r.count - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_zero_shots() {
        let s = cu_settings(&named_gate(NamedGate::X)).unwrap();
        assert!(expected_dataset(&s, None, 0.0).is_err());
    }

    #[test]
    fn rows_roundtrip() {
        let s = cu_settings(&named_gate(NamedGate::X)).unwrap();
        let d = generate_dataset(&s, &NoiseModel::ideal(100.0), 100.0, 4).unwrap();
        let rows: Vec<Vec<String>> = d.to_records().into_iter().skip(1).collect();
        let back = TomographyDataset::from_rows(&rows, 100.0).unwrap();
        assert_eq!(back.records, d.records);
    }
}
