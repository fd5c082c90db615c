//! Two-photon fringes versus the red/blue phase of the Sagnac source.
//!
//! The source `(|H⟩₁ᵣ|V⟩₂ᵣ + e^{iθ}|V⟩₁ᵦ|H⟩₂ᵦ)/√2` is converted to
//! `|+H⟩` on both branches, passed through the CNOT settings and the sum
//! class is analyzed in `|++⟩` and `|+−⟩`, giving `C(1 ± cos θ)/2`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::ket;
use super::engine;
use super::settings::cu_settings;
use super::truth_table::Mode;
use crate::error::Result;
use crate::gates::{named_gate, NamedGate};
use crate::io::fmt_sig12;
use crate::linalg::Operator;
use crate::photonic::noise::{poisson, WaveplateJitter};
use crate::photonic::{type2_sagnac_branches, PatternClass};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringePoint {
    pub theta: f64,
    pub rate_pp: f64,
    pub rate_pm: f64,
}

/// `points` evenly spaced angles covering `[0, 2π]` inclusive.
pub fn theta_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        n => (0..n).map(|k| 2.0 * PI * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Waveplates taking `H₁ᵣV₂ᵣ` and `V₁ᵦH₂ᵦ` to `|+⟩|H⟩` on each branch.
fn conversion() -> Vec<(String, Operator)> {
    let h = named_gate(NamedGate::H);
    let x = named_gate(NamedGate::X);
    vec![
        ("1r".into(), h.clone()),
        ("2r".into(), x.clone()),
        ("1b".into(), &h * &x),
    ]
}

/// Exact rates are relative weights (`C = 1/2`); sampled rates are
/// coincidence counts with `C ≈ poisson_counts/2`.
pub fn fringe_scan(theta_grid: &[f64], mode: &Mode) -> Result<Vec<FringePoint>> {
    let settings = cu_settings(&named_gate(NamedGate::X))?;
    let (noise, mut jitter) = match mode {
        Mode::Exact => (None, None),
        Mode::Sampled { noise, seed } => {
            noise.validate()?;
            (Some(*noise), Some(WaveplateJitter::new(noise.waveplate_angle_error_sigma, *seed)))
        }
    };
    let mut prep = conversion();
    let settings = match jitter.as_mut() {
        Some(j) => {
            for (_, op) in prep.iter_mut() {
                *op = j.perturb(op);
            }
            engine::perturb_settings(&settings, j)
        }
        None => settings,
    };
    let plus = ket('D')?;
    let minus = ket('A')?;
    let analyzers = [[plus, plus], [plus, minus]];
    let errors: Vec<engine::AnalyzerErrors> = analyzers
        .iter()
        .map(|_| jitter.as_mut().map(engine::draw_analyzer).unwrap_or([0.0; 2]))
        .collect();
    let mut rng = jitter.as_mut().map(|j| ChaCha8Rng::seed_from_u64(j.fork()));
    let mut out = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        let patterns = engine::simulate_sources(&settings, &type2_sagnac_branches(theta), &prep)?;
        let mut rates = [0.0; 2];
        for (k, (an, err)) in analyzers.iter().zip(&errors).enumerate() {
            let amps = engine::class_amplitudes(&patterns, PatternClass::Sum, an, err);
            let w = engine::weight(&amps, noise.as_ref());
            rates[k] = match (noise, rng.as_mut()) {
                (Some(n), Some(r)) => poisson(n.poisson_counts * w, r) as f64,
                _ => w,
            };
        }
        out.push(FringePoint {
            theta,
            rate_pp: rates[0],
            rate_pm: rates[1],
        });
    }
    Ok(out)
}

/// Least-squares amplitude `C` of `C(1 ± cos θ)/2` and the largest residual.
pub fn fit_fringe(points: &[FringePoint]) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for p in points {
        let (u, v) = ((1.0 + p.theta.cos()) / 2.0, (1.0 - p.theta.cos()) / 2.0);
        num += p.rate_pp * u + p.rate_pm * v;
        den += u * u + v * v;
    }
    let c = if den > 0.0 { num / den } else { 0.0 };
    let resid = points
        .iter()
        .flat_map(|p| {
            [
                (p.rate_pp - c * (1.0 + p.theta.cos()) / 2.0).abs(),
                (p.rate_pm - c * (1.0 - p.theta.cos()) / 2.0).abs(),
            ]
        })
        .fold(0.0, f64::max);
    (c, resid)
}

/// CSV records `theta,rate_pp,rate_pm`.
pub fn fringe_records(points: &[FringePoint]) -> Vec<Vec<String>> {
    let mut out = vec![vec!["theta".to_string(), "rate_pp".into(), "rate_pm".into()]];
    out.extend(
        points
            .iter()
            .map(|p| vec![fmt_sig12(p.theta), fmt_sig12(p.rate_pp), fmt_sig12(p.rate_pm)]),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonic::NoiseModel;

    #[test]
    fn endpoints() {
        let pts = fringe_scan(&[0.0, PI / 2.0], &Mode::Exact).unwrap();
        assert!((pts[0].rate_pp - 0.5).abs() < 1e-12);
        assert!(pts[0].rate_pm.abs() < 1e-12);
        assert!((pts[1].rate_pp - 0.25).abs() < 1e-12);
        assert!((pts[1].rate_pm - 0.25).abs() < 1e-12);
    }

    #[test]
    fn exact_fit() {
        let pts = fringe_scan(&theta_grid(100), &Mode::Exact).unwrap();
        let (c, r) = fit_fringe(&pts);
        assert!((c - 0.5).abs() < 1e-12);
        assert!(r < 1e-10);
    }

    #[test]
    fn sampled_fringe_is_close() {
        let mode = Mode::Sampled { noise: NoiseModel::ideal(20000.0), seed: 5 };
        let pts = fringe_scan(&theta_grid(20), &mode).unwrap();
        let (c, _) = fit_fringe(&pts);
        assert!((c - 10000.0).abs() < 300.0);
    }
}
