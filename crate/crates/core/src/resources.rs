//! Extra-CNOT counts for adding a control to a circuit of `p` CNOTs and `q`
//! single-qubit gates on `n` targets: gate-by-gate decomposition versus the
//! Hilbert-space extension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_sig12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceProfile {
    pub n: u64,
    pub p: u64,
    pub q: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionalCost {
    /// `2p + q`
    pub min_extra_cnots: u64,
    /// `[3p + q, 6p + 2q]`
    pub decomposed_range: (u64, u64),
}

pub fn conventional_cost(profile: &ResourceProfile) -> ConventionalCost {
    let ResourceProfile { p, q, .. } = *profile;
    ConventionalCost {
        min_extra_cnots: 2 * p + q,
        decomposed_range: (3 * p + q, 6 * p + 2 * q),
    }
}

/// `4n`, whatever the circuit.
pub fn extension_cost(profile: &ResourceProfile) -> u64 {
    4 * profile.n
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PqModel {
    Explicit { p: u64, q: u64 },
    /// `p + q = 72 n³`. `p_fraction` is the CNOT share; `None` means an even split.
    Shor { p_fraction: Option<f64> },
}

impl PqModel {
    pub fn profile(&self, n: u64) -> Result<(ResourceProfile, bool)> {
        match *self {
            PqModel::Explicit { p, q } => Ok((ResourceProfile { n, p, q }, false)),
            PqModel::Shor { p_fraction } => {
                let total = 72 * n.pow(3);
                let (p, assumed) = match p_fraction {
                    None => (total / 2, true),
                    Some(f) if (0.0..=1.0).contains(&f) => ((f * total as f64).round() as u64, false),
                    Some(f) => return Err(Error::OutOfRange(format!("p fraction {f} not in [0, 1]"))),
                };
                Ok((ResourceProfile { n, p, q: total - p }, assumed))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: u64,
    pub p: u64,
    pub q: u64,
    pub conventional_min: u64,
    pub conventional_range: (u64, u64),
    pub extension: u64,
    /// `conventional_min / extension`; absent when the extension costs nothing.
    pub ratio: Option<f64>,
    /// The extension needs fewer extra CNOTs than the conventional minimum.
    pub extension_wins: bool,
    /// The p/q split was not supplied and an even split was assumed.
    pub assumed_split: bool,
}

pub fn compare_report(ns: &[u64], model: &PqModel) -> Result<Vec<ComparisonRow>> {
    if ns.is_empty() {
        return Err(Error::OutOfRange("empty n range".into()));
    }
    ns.iter()
        .map(|&n| {
            let (profile, assumed_split) = model.profile(n)?;
            let conv = conventional_cost(&profile);
            let ext = extension_cost(&profile);
            Ok(ComparisonRow {
                n,
                p: profile.p,
                q: profile.q,
                conventional_min: conv.min_extra_cnots,
                conventional_range: conv.decomposed_range,
                extension: ext,
                ratio: (ext > 0).then(|| conv.min_extra_cnots as f64 / ext as f64),
                extension_wins: ext < conv.min_extra_cnots,
                assumed_split,
            })
        })
        .collect()
}

pub fn report_records(rows: &[ComparisonRow]) -> Vec<Vec<String>> {
    let header = [
        "n",
        "p",
        "q",
        "conventional_min",
        "conventional_low",
        "conventional_high",
        "extension",
        "ratio",
        "extension_wins",
        "assumed_split",
    ];
    let mut out = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in rows {
        out.push(vec![
            r.n.to_string(),
            r.p.to_string(),
            r.q.to_string(),
            r.conventional_min.to_string(),
            r.conventional_range.0.to_string(),
            r.conventional_range.1.to_string(),
            r.extension.to_string(),
            r.ratio.map(fmt_sig12).unwrap_or_default(),
            r.extension_wins.to_string(),
            r.assumed_split.to_string(),
        ]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        let c = conventional_cost(&ResourceProfile { n: 1, p: 1, q: 2 });
        assert_eq!(c.min_extra_cnots, 4);
        assert_eq!(c.decomposed_range, (5, 10));
        let z = conventional_cost(&ResourceProfile { n: 1, p: 0, q: 0 });
        assert_eq!((z.min_extra_cnots, z.decomposed_range), (0, (0, 0)));
        assert_eq!(extension_cost(&ResourceProfile { n: 10, p: 3, q: 9 }), 40);
    }

    #[test]
    fn cnot_target_conventional_wins() {
        let rows = compare_report(&[2], &PqModel::Explicit { p: 1, q: 0 }).unwrap();
        assert_eq!(rows[0].extension, 8);
        assert_eq!(rows[0].conventional_min, 2);
        assert!(!rows[0].extension_wins);
    }

    #[test]
    fn shor_model() {
        let rows = compare_report(&[5, 10], &PqModel::Shor { p_fraction: None }).unwrap();
        assert_eq!(rows[0].p + rows[0].q, 9000);
        assert!(rows[0].ratio.unwrap() >= 450.0);
        assert!(rows[1].ratio.unwrap() > 1800.0);
        assert!(rows.iter().all(|r| r.assumed_split && r.extension_wins));
        let fixed = compare_report(&[10], &PqModel::Shor { p_fraction: Some(0.0) }).unwrap();
        assert!(!fixed[0].assumed_split);
        assert_eq!(fixed[0].conventional_min, 72_000);
    }

    #[test]
    fn empty_range() {
        assert!(compare_report(&[], &PqModel::Explicit { p: 0, q: 0 }).is_err());
    }
}
