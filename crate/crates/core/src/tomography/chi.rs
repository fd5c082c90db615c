//! Process matrices in the two-qubit Pauli basis `II, IX, IY, IZ, XI, …, ZZ`
//! (index `4a + b` for `σ_a ⊗ σ_b`).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::pauli;
use crate::io::SCHEMA_VERSION;
use crate::linalg::{c, max_abs, Operator, C64, ZERO};

pub const DIM: usize = 16;

const NAMES: [&str; 4] = ["I", "X", "Y", "Z"];

pub fn pauli_labels() -> Vec<String> {
    (0..DIM).map(|k| format!("{}{}", NAMES[k / 4], NAMES[k % 4])).collect()
}

/// `σ_{k/4} ⊗ σ_{k%4}`
pub fn pauli2(k: usize) -> Operator {
    pauli(k / 4).kron(&pauli(k % 4))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix {
    matrix: DMatrix<C64>,
}

impl ChiMatrix {
    /// Wraps a 16×16 matrix as is.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.shape() != (DIM, DIM) {
            return Err(Error::DimensionMismatch(format!("chi must be 16x16, got {:?}", matrix.shape())));
        }
        Ok(ChiMatrix { matrix })
    }

    /// Divides by the trace.
    pub fn normalized(matrix: DMatrix<C64>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.abs() < 1e-300 {
            return Err(Error::NotNormalized(tr));
        }
        Self::from_matrix(matrix / c(tr, 0.0))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * c(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Hermitian, PSD and unit trace within `1e-10`.
    pub fn check_invariants(&self) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > 1e-10 {
            return Err(Error::Precondition(format!("chi not Hermitian (defect {h:e})")));
        }
        let m = self.min_eigenvalue();
        if m < -1e-10 {
            return Err(Error::Precondition(format!("chi not PSD (min eigenvalue {m:e})")));
        }
        let t = self.trace();
        if (t - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(t));
        }
        Ok(())
    }

    /// Zero out negative eigenvalues and renormalize.
    pub fn clip_to_psd(&self) -> Result<ChiMatrix> {
        let h = (&self.matrix + self.matrix.adjoint()) * c(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut out = DMatrix::<C64>::zeros(DIM, DIM);
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l > 0.0 {
                let v = eig.eigenvectors.column(k);
                out += v * v.adjoint() * c(l, 0.0);
            }
        }
        ChiMatrix::normalized(out)
    }

    /// `Σ χ_ij P_i ρ P_j†` applied to a two-qubit density matrix.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let ps: Vec<DMatrix<C64>> = (0..DIM).map(|k| pauli2(k).into_matrix()).collect();
        let mut out = DMatrix::<C64>::zeros(4, 4);
        for (i, p) in ps.iter().enumerate() {
            let left = p * rho;
            for (j, q) in ps.iter().enumerate() {
                let x = self.matrix[(i, j)];
                if x != ZERO {
                    out += &left * q.adjoint() * x;
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> ChiJson {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..DIM).map(|i| (0..DIM).map(|j| f(&self.matrix[(i, j)])).collect()).collect()
        };
        ChiJson {
            schema: SCHEMA_VERSION,
            basis: pauli_labels(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn from_json(j: &ChiJson) -> Result<Self> {
        let ok = |r: &Vec<Vec<f64>>| r.len() == DIM && r.iter().all(|x| x.len() == DIM);
        if !ok(&j.re) || !ok(&j.im) {
            return Err(Error::DimensionMismatch("chi JSON must be 16x16".into()));
        }
        Self::from_matrix(DMatrix::from_fn(DIM, DIM, |a, b| c(j.re[a][b], j.im[a][b])))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiJson {
    pub schema: u32,
    pub basis: Vec<String>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Rank-1 χ of the operation `op`: `χ_ij = c_i c̄_j` with `c_i = Tr(P_i op)/4`,
/// trace-normalized.
pub fn ideal_chi(op: &Operator) -> Result<ChiMatrix> {
    if op.dims_in() != [2, 2] || op.dims_out() != [2, 2] {
        return Err(Error::DimensionMismatch("ideal chi needs a two-qubit operator".into()));
    }
    let coeff: Vec<C64> = (0..DIM)
        .map(|k| (pauli2(k).matrix() * op.matrix()).trace() / c(4.0, 0.0))
        .collect();
    let v = nalgebra::DVector::from_vec(coeff);
    ChiMatrix::normalized(&v * v.adjoint())
}

/// `Tr(χ_a · χ_ideal)` for trace-one inputs.
pub fn process_fidelity(chi_a: &ChiMatrix, chi_ideal: &ChiMatrix) -> Result<f64> {
    for t in [chi_a.trace(), chi_ideal.trace()] {
        if (t - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized(t));
        }
    }
    Ok((chi_a.matrix() * chi_ideal.matrix()).trace().re)
}
