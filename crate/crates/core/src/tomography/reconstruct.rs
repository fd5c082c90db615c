//! χ reconstruction: linear inversion and Poisson maximum likelihood over
//! `X = T†T`.

use argmin::core::{CostFunction, Executor, Gradient, State, TerminationReason, TerminationStatus};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::chi::{pauli2, ChiMatrix, DIM};
use super::dataset::TomographyDataset;
use crate::error::{Error, Result};
use crate::lab::basis::ProductState;
use crate::linalg::{c, C64};

const N_PARAMS: usize = DIM * DIM;

/// Per-record vectors `v_i = conj(⟨m|P_i|p⟩)`, so that the expected count
/// is proportional to `v†χv`.
#[derive(Clone, Debug)]
pub struct Design {
    vs: Vec<DVector<C64>>,
    counts: Vec<f64>,
}

impl Design {
    pub fn new(data: &TomographyDataset) -> Result<Self> {
        let paulis: Vec<DMatrix<C64>> = (0..DIM).map(|k| pauli2(k).into_matrix()).collect();
        let mut vs = Vec::with_capacity(data.records.len());
        let mut counts = Vec::with_capacity(data.records.len());
        for r in &data.records {
            let p = ProductState::parse(&r.prep)?.state();
            let m = ProductState::parse(&r.meas)?.state();
            let (p, m) = (p.amplitudes(), m.amplitudes());
            let v = DVector::from_iterator(DIM, paulis.iter().map(|pk| m.dotc(&(pk * p)).conj()));
            vs.push(v);
            counts.push(r.count / data.shots_per_setting);
        }
        if vs.is_empty() {
            return Err(Error::RankDeficient { rank: 0, needed: N_PARAMS });
        }
        Ok(Design { vs, counts })
    }

    /// `v†Xv` for every record.
    pub fn predict(&self, x: &DMatrix<C64>) -> Vec<f64> {
        self.vs.iter().map(|v| v.dotc(&(x * v)).re).collect()
    }
}

/// Hermitian basis element `k` of the 256 used by linear inversion.
fn hermitian_basis(k: usize) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(DIM, DIM);
    let (i, j) = (k / DIM, k % DIM);
    match i.cmp(&j) {
        std::cmp::Ordering::Equal => m[(i, i)] = c(1.0, 0.0),
        std::cmp::Ordering::Less => {
            m[(i, j)] = c(1.0, 0.0);
            m[(j, i)] = c(1.0, 0.0);
        }
        std::cmp::Ordering::Greater => {
            m[(j, i)] = c(0.0, 1.0);
            m[(i, j)] = c(0.0, -1.0);
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct LinearInversion {
    pub chi: ChiMatrix,
    /// Trace of the unnormalized solution.
    pub raw_trace: f64,
    pub min_eigenvalue: f64,
    /// The unconstrained solution has an eigenvalue below `-1e-10`.
    pub psd_violation: bool,
    pub rank: usize,
}

pub fn linear_inversion(data: &TomographyDataset) -> Result<LinearInversion> {
    let design = Design::new(data)?;
    let basis: Vec<DMatrix<C64>> = (0..N_PARAMS).map(hermitian_basis).collect();
    let rows = design.vs.len();
    let mut a = DMatrix::<f64>::zeros(rows, N_PARAMS);
    for (s, v) in design.vs.iter().enumerate() {
        for (k, h) in basis.iter().enumerate() {
            a[(s, k)] = v.dotc(&(h * v)).re;
        }
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-10 * (rows.max(N_PARAMS) as f64);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < N_PARAMS {
        return Err(Error::RankDeficient { rank, needed: N_PARAMS });
    }
    let b = DVector::from_vec(design.counts.clone());
    let x = svd
        .solve(&b, tol)
        .map_err(|e| Error::Precondition(format!("least squares failed: {e}")))?;
    let mut m = DMatrix::<C64>::zeros(DIM, DIM);
    for (k, h) in basis.iter().enumerate() {
        m += h * c(x[k], 0.0);
    }
    let raw_trace = m.trace().re;
    let chi = ChiMatrix::normalized(m)?;
    let min_eigenvalue = chi.min_eigenvalue();
    Ok(LinearInversion {
        chi,
        raw_trace,
        min_eigenvalue,
        psd_violation: min_eigenvalue < -1e-10,
        rank,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iters: u64,
    /// Absolute change in the negative log-likelihood that ends the fit.
    pub cost_tolerance: f64,
    /// Weight of the identity mixed into the starting point.
    pub init_mixing: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            max_iters: 100_000,
            cost_tolerance: 1e-10,
            init_mixing: 1e-3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MleResult {
    pub chi: ChiMatrix,
    pub iterations: u64,
    pub cost: f64,
    pub gradient_norm: f64,
}

struct Likelihood<'a> {
    design: &'a Design,
}

fn unpack(t: &[f64]) -> DMatrix<C64> {
    DMatrix::from_fn(DIM, DIM, |i, j| {
        let k = i * DIM + j;
        c(t[k], t[N_PARAMS + k])
    })
}

fn pack(t: &DMatrix<C64>) -> Vec<f64> {
    let mut out = vec![0.0; 2 * N_PARAMS];
    for i in 0..DIM {
        for j in 0..DIM {
            out[i * DIM + j] = t[(i, j)].re;
            out[N_PARAMS + i * DIM + j] = t[(i, j)].im;
        }
    }
    out
}

const FLOOR: f64 = 1e-300;

impl Likelihood<'_> {
    fn mus(&self, t: &DMatrix<C64>) -> Vec<f64> {
        self.design
            .vs
            .iter()
            .map(|v| (t * v).norm_squared())
            .collect()
    }

    fn nll(&self, t: &[f64]) -> f64 {
        self.mus(&unpack(t))
            .iter()
            .zip(&self.design.counts)
            .map(|(&mu, &n)| mu - if n > 0.0 { n * mu.max(FLOOR).ln() } else { 0.0 })
            .sum()
    }

    fn grad(&self, t: &[f64]) -> Vec<f64> {
        let tm = unpack(t);
        let mus = self.mus(&tm);
        let mut g = DMatrix::<C64>::zeros(DIM, DIM);
        for ((v, &mu), &n) in self.design.vs.iter().zip(&mus).zip(&self.design.counts) {
            let w = 1.0 - if n > 0.0 { n / mu.max(FLOOR) } else { 0.0 };
            g += v * v.adjoint() * c(w, 0.0);
        }
        pack(&((&tm * g) * c(2.0, 0.0)))
    }
}

impl CostFunction for Likelihood<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.nll(p))
    }
}

impl Gradient for Likelihood<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        Ok(self.grad(p))
    }
}

/// `T` with `T†T = X` for PSD `X`.
fn psd_root(x: &DMatrix<C64>) -> DMatrix<C64> {
    let h = (x + x.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut t = DMatrix::<C64>::zeros(DIM, DIM);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        t += v * v.adjoint() * c(l.max(0.0).sqrt(), 0.0);
    }
    t
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Poisson maximum-likelihood χ, started from the PSD-clipped linear
/// inversion mixed with a little identity.
pub fn mle_reconstruct(data: &TomographyDataset, opts: &MleOptions) -> Result<MleResult> {
    let lin = linear_inversion(data)?;
    let design = Design::new(data)?;
    let scale = lin.raw_trace.abs().max(1e-6);
    let start = lin.chi.clip_to_psd()?.matrix() * c(1.0 - opts.init_mixing, 0.0)
        + DMatrix::<C64>::identity(DIM, DIM) * c(opts.init_mixing / DIM as f64, 0.0);
    let init = pack(&psd_root(&(start * c(scale, 0.0))));

    let problem = Likelihood { design: &design };
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), 10)
        .with_tolerance_cost(opts.cost_tolerance)
        .and_then(|s| s.with_tolerance_grad(0.0))
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let res = Executor::new(Likelihood { design: &design }, solver)
        .configure(|s| s.param(init.clone()).max_iters(opts.max_iters))
        .run();
    let (best, iterations, status) = match res {
        Ok(r) => {
            let st = r.state();
            let p = st.get_best_param().cloned().unwrap_or(init);
            (p, st.get_iter(), st.get_termination_status().clone())
        }
        Err(_) => {
            return Err(Error::NonConvergence {
                iterations: 0,
                gradient_norm: norm(&problem.grad(&init)),
            });
        }
    };
    let gradient_norm = norm(&problem.grad(&best));
    if matches!(status, TerminationStatus::Terminated(TerminationReason::MaxItersReached)) {
        return Err(Error::NonConvergence {
            iterations: iterations as usize,
            gradient_norm,
        });
    }
    let t = unpack(&best);
    let chi = ChiMatrix::normalized(t.adjoint() * &t)?;
    Ok(MleResult {
        chi,
        iterations,
        cost: problem.nll(&best),
        gradient_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{named_gate, NamedGate};
    use crate::lab::cu_settings;
    use crate::photonic::NoiseModel;
    use crate::tomography::chi::{ideal_chi, process_fidelity};
    use crate::tomography::dataset::{expected_dataset, generate_dataset};

    fn cnot_settings() -> crate::lab::GateSettings {
        cu_settings(&named_gate(NamedGate::X)).unwrap()
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let data = generate_dataset(&cnot_settings(), &NoiseModel::ideal(50.0), 50.0, 9).unwrap();
        let design = Design::new(&data).unwrap();
        let l = Likelihood { design: &design };
        let t: Vec<f64> = (0..2 * N_PARAMS).map(|k| ((k * 37 % 101) as f64 / 101.0) - 0.4).collect();
        let g = l.grad(&t);
        let h = 1e-6;
        for k in [0, 5, 77, 300, 511] {
            let mut tp = t.clone();
            tp[k] += h;
            let mut tm = t.clone();
            tm[k] -= h;
            let fd = (l.nll(&tp) - l.nll(&tm)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-5 * (1.0 + fd.abs()), "k={k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn linear_inversion_exact() {
        let data = expected_dataset(&cnot_settings(), None, 1000.0).unwrap();
        let li = linear_inversion(&data).unwrap();
        assert_eq!(li.rank, 256);
        let ideal = ideal_chi(&crate::gates::cnot()).unwrap();
        assert!((process_fidelity(&li.chi, &ideal).unwrap() - 1.0).abs() < 1e-9);
        assert!((li.raw_trace - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rank_deficient_subset() {
        let mut data = expected_dataset(&cnot_settings(), None, 1000.0).unwrap();
        data.records.retain(|r| r.prep.starts_with('H'));
        assert!(matches!(linear_inversion(&data), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn mle_on_expected_counts() {
        let data = expected_dataset(&cnot_settings(), None, 1000.0).unwrap();
        let r = mle_reconstruct(&data, &MleOptions::default()).unwrap();
        r.chi.check_invariants().unwrap();
        let ideal = ideal_chi(&crate::gates::cnot()).unwrap();
        assert!(process_fidelity(&r.chi, &ideal).unwrap() > 0.999);
    }

    #[test]
    fn mle_on_sampled_counts_is_physical() {
        let data = generate_dataset(&cnot_settings(), &NoiseModel::ideal(500.0), 500.0, 3).unwrap();
        let r = mle_reconstruct(&data, &MleOptions::default()).unwrap();
        r.chi.check_invariants().unwrap();
        let ideal = ideal_chi(&crate::gates::cnot()).unwrap();
        assert!(process_fidelity(&r.chi, &ideal).unwrap() > 0.95);
    }
}
