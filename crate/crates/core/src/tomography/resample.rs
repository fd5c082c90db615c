//! Poisson-resampled uncertainty of the MLE process fidelity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chi::{process_fidelity, ChiMatrix};
use super::dataset::TomographyDataset;
use super::reconstruct::{mle_reconstruct, MleOptions};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBars {
    pub mean: f64,
    pub std: f64,
    pub n_ok: usize,
    pub n_failed: usize,
}

/// Refits `n_resamples` Poisson resamplings of `data`. Resample `i` draws from
/// its own stream seeded by `seed` and `i`, so the result does not depend on
/// thread scheduling. Failed fits are skipped; more than 10% fails the call.
pub fn error_bars(data: &TomographyDataset, ideal: &ChiMatrix, n_resamples: usize, seed: u64) -> Result<ErrorBars> {
    if n_resamples < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 resamples, got {n_resamples}")));
    }
    let opts = MleOptions::default();
    let fits: Vec<Option<f64>> = (0..n_resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            let d = data.resampled(&mut rng);
            mle_reconstruct(&d, &opts)
                .ok()
                .and_then(|r| process_fidelity(&r.chi, ideal).ok())
        })
        .collect();
    let ok: Vec<f64> = fits.iter().flatten().copied().collect();
    let failed = n_resamples - ok.len();
    if failed * 10 > n_resamples || ok.len() < 2 {
        return Err(Error::ResampleFailures { failed, total: n_resamples });
    }
    let n = ok.len() as f64;
    let mean = ok.iter().sum::<f64>() / n;
    let var = ok.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(ErrorBars {
        mean,
        std: var.sqrt(),
        n_ok: ok.len(),
        n_failed: failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{cnot, named_gate, NamedGate};
    use crate::lab::cu_settings;
    use crate::photonic::NoiseModel;
    use crate::tomography::chi::ideal_chi;
    use crate::tomography::dataset::generate_dataset;

    #[test]
    fn deterministic() {
        let s = cu_settings(&named_gate(NamedGate::X)).unwrap();
        let d = generate_dataset(&s, &NoiseModel::ideal(200.0), 200.0, 1).unwrap();
        let ideal = ideal_chi(&cnot()).unwrap();
        let a = error_bars(&d, &ideal, 4, 7).unwrap();
        let b = error_bars(&d, &ideal, 4, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.std > 0.0);
        assert!(error_bars(&d, &ideal, 1, 7).is_err());
    }
}
