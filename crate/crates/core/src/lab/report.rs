//! Process-fidelity bounds from two complementary truth tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub f1: f64,
    pub f2: f64,
    pub fp_lower: f64,
    pub fp_upper: f64,
    pub f_avg_lower: f64,
    pub f_avg_upper: f64,
    pub d: usize,
}

/// `(d·F_P + 1)/(d + 1)`
pub fn average_fidelity(fp: f64, d: usize) -> f64 {
    let d = d as f64;
    (d * fp + 1.0) / (d + 1.0)
}

/// `max(f1 + f2 − 1, 0) ≤ F_P ≤ min(f1, f2)`, mapped to average fidelity.
pub fn fidelity_report(f1: f64, f2: f64, d: usize) -> Result<FidelityReport> {
    for (name, f) in [("f1", f1), ("f2", f2)] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::OutOfRange(format!("{name} = {f} outside [0, 1]")));
        }
    }
    if d < 2 {
        return Err(Error::OutOfRange(format!("gate dimension {d}")));
    }
    let fp_lower = (f1 + f2 - 1.0).max(0.0);
    let fp_upper = f1.min(f2);
    Ok(FidelityReport {
        f1,
        f2,
        fp_lower,
        fp_upper,
        f_avg_lower: average_fidelity(fp_lower, d),
        f_avg_upper: average_fidelity(fp_upper, d),
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect() {
        let r = fidelity_report(1.0, 1.0, 4).unwrap();
        assert_eq!((r.fp_lower, r.fp_upper, r.f_avg_lower, r.f_avg_upper), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn bounds() {
        let r = fidelity_report(0.9, 0.95, 4).unwrap();
        assert!((r.fp_lower - 0.85).abs() < 1e-15);
        assert!((r.fp_upper - 0.9).abs() < 1e-15);
        assert!(fidelity_report(1.2, 0.9, 4).is_err());
        assert_eq!(fidelity_report(0.2, 0.3, 4).unwrap().fp_lower, 0.0);
    }

    #[test]
    fn average_from_tomography_value() {
        assert!((average_fidelity(0.9613, 4) - 0.96904).abs() < 1e-12);
    }
}
