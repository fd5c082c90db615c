//! Dense operators and state vectors over mixed-radix carrier registers.
//!
//! Carriers are ordered big-endian: the first carrier in `dims` is the most
//! significant digit of the flat index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute max-norm tolerance for unitarity and leakage checks.
pub const EXACT_TOL: f64 = 1e-12;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn dim_of(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Flat index -> per-carrier digits.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Per-carrier digits -> flat index.
pub fn index_of(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// A dense complex matrix acting between two carrier registers. May be
/// non-unitary (projectors, filters, sums of unitaries).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dims_out: Vec<usize>,
    dims_in: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(dims_out: Vec<usize>, dims_in: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        if dims_out.iter().chain(&dims_in).any(|&d| d == 0) {
            return Err(Error::DimensionMismatch("carrier dimension 0".into()));
        }
        let (r, c) = matrix.shape();
        if r != dim_of(&dims_out) || c != dim_of(&dims_in) {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {r}x{c} but carrier dims {dims_out:?} <- {dims_in:?} need {}x{}",
                dim_of(&dims_out),
                dim_of(&dims_in)
            )));
        }
        Ok(Operator {
            dims_out,
            dims_in,
            matrix,
        })
    }

    pub fn square(dims: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        Self::new(dims.clone(), dims, matrix)
    }

    /// Square operator from row-major entries.
    pub fn from_rows(dims: Vec<usize>, rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged or non-square rows".into()));
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::square(dims, m)
    }

    /// Square real operator, row-major.
    pub fn from_real(dims: Vec<usize>, entries: &[f64]) -> Result<Self> {
        let n = dim_of(&dims);
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        Self::square(dims, DMatrix::from_fn(n, n, |i, j| c(entries[i * n + j], 0.0)))
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dim_of(&dims);
        Operator {
            dims_out: dims.clone(),
            dims_in: dims,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn qubits_identity(n: usize) -> Self {
        Self::identity(vec![2; n])
    }

    pub fn dims_in(&self) -> &[usize] {
        &self.dims_in
    }

    pub fn dims_out(&self) -> &[usize] {
        &self.dims_out
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn is_square(&self) -> bool {
        self.dims_in == self.dims_out
    }

    /// True when every carrier on both sides is two-dimensional.
    pub fn is_qubit_operator(&self) -> bool {
        self.is_square() && self.dims_in.iter().all(|&d| d == 2)
    }

    pub fn n_carriers(&self) -> usize {
        self.dims_in.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    /// max |(O†O - I)_ij|
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.matrix.ncols();
        let g = self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(n, n);
        max_abs(&g)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < EXACT_TOL
    }

    pub fn adjoint(&self) -> Self {
        Operator {
            dims_out: self.dims_in.clone(),
            dims_in: self.dims_out.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · rhs`
    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        if self.dims_in != rhs.dims_out {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {:?}<-{:?} with {:?}<-{:?}",
                self.dims_out, self.dims_in, rhs.dims_out, rhs.dims_in
            )));
        }
        Ok(Operator {
            dims_out: self.dims_out.clone(),
            dims_in: rhs.dims_in.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    pub fn kron(&self, rhs: &Operator) -> Self {
        let mut dims_out = self.dims_out.clone();
        dims_out.extend_from_slice(&rhs.dims_out);
        let mut dims_in = self.dims_in.clone();
        dims_in.extend_from_slice(&rhs.dims_in);
        Operator {
            dims_out,
            dims_in,
            matrix: self.matrix.kronecker(&rhs.matrix),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        Operator {
            dims_out: self.dims_out.clone(),
            dims_in: self.dims_in.clone(),
            matrix: &self.matrix * k,
        }
    }

    fn check_same_shape(&self, rhs: &Operator) -> Result<()> {
        if self.dims_in != rhs.dims_in || self.dims_out != rhs.dims_out {
            return Err(Error::DimensionMismatch(format!(
                "operators on {:?}<-{:?} and {:?}<-{:?}",
                self.dims_out, self.dims_in, rhs.dims_out, rhs.dims_in
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &Operator) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Operator {
            dims_out: self.dims_out.clone(),
            dims_in: self.dims_in.clone(),
            matrix: &self.matrix + &rhs.matrix,
        })
    }

    pub fn try_sub(&self, rhs: &Operator) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Operator {
            dims_out: self.dims_out.clone(),
            dims_in: self.dims_in.clone(),
            matrix: &self.matrix - &rhs.matrix,
        })
    }

    pub fn apply(&self, state: &CarrierState) -> Result<CarrierState> {
        if state.dims != self.dims_in {
            return Err(Error::DimensionMismatch(format!(
                "operator expects carriers {:?}, state has {:?}",
                self.dims_in, state.dims
            )));
        }
        Ok(CarrierState {
            dims: self.dims_out.clone(),
            amplitudes: &self.matrix * &state.amplitudes,
        })
    }

    /// Largest entrywise deviation; infinite when shapes differ.
    pub fn max_abs_diff(&self, rhs: &Operator) -> f64 {
        if self.matrix.shape() != rhs.matrix.shape() {
            return f64::INFINITY;
        }
        max_abs(&(&self.matrix - &rhs.matrix))
    }
}

impl Mul for &Operator {
    type Output = Operator;

    /// Panics on a shape mismatch; use [`Operator::compose`] for fallible composition.
    fn mul(self, rhs: &Operator) -> Operator {
        self.compose(rhs).expect("operator shapes must agree")
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        self.try_add(rhs).expect("operator shapes must agree")
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.try_sub(rhs).expect("operator shapes must agree")
    }
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A (possibly sub-normalized) pure state over a carrier register.
#[derive(Clone, Debug, PartialEq)]
pub struct CarrierState {
    dims: Vec<usize>,
    amplitudes: DVector<C64>,
}

impl CarrierState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != dim_of(&dims) {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for carriers {dims:?}",
                amplitudes.len()
            )));
        }
        Ok(CarrierState {
            dims,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    pub fn from_vector(dims: Vec<usize>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != dim_of(&dims) {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for carriers {dims:?}",
                amplitudes.len()
            )));
        }
        Ok(CarrierState { dims, amplitudes })
    }

    pub fn qubits(amplitudes: Vec<C64>) -> Result<Self> {
        let n = amplitudes.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "{n} amplitudes is not a qubit register"
            )));
        }
        Self::new(vec![2; n.trailing_zeros() as usize], amplitudes)
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dim_of(&dims);
        CarrierState {
            dims,
            amplitudes: DVector::zeros(n),
        }
    }

    /// Computational basis state with the given per-carrier levels.
    pub fn basis(dims: Vec<usize>, levels: &[usize]) -> Result<Self> {
        if levels.len() != dims.len() || levels.iter().zip(&dims).any(|(&l, &d)| l >= d) {
            return Err(Error::DimensionMismatch(format!(
                "levels {levels:?} do not fit carriers {dims:?}"
            )));
        }
        let mut s = Self::zeros(dims);
        let idx = index_of(levels, &s.dims);
        s.amplitudes[idx] = ONE;
        Ok(s)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, levels: &[usize]) -> C64 {
        self.amplitudes[index_of(levels, &self.dims)]
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Squared Euclidean norm.
    pub fn probability(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Unit-norm copy, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.amplitudes.norm();
        if n < 1e-300 {
            return None;
        }
        Some(CarrierState {
            dims: self.dims.clone(),
            amplitudes: &self.amplitudes / c(n, 0.0),
        })
    }

    pub fn scale(&self, k: C64) -> Self {
        CarrierState {
            dims: self.dims.clone(),
            amplitudes: &self.amplitudes * k,
        }
    }

    pub fn tensor(&self, rhs: &CarrierState) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        CarrierState {
            dims,
            amplitudes: self.amplitudes.kronecker(&rhs.amplitudes),
        }
    }

    /// ⟨self|rhs⟩
    pub fn inner(&self, rhs: &CarrierState) -> C64 {
        self.amplitudes.dotc(&rhs.amplitudes)
    }

    /// |⟨a|b⟩|² / (‖a‖²‖b‖²); insensitive to global phase and norm. Zero if
    /// either vector vanishes or the registers differ.
    pub fn fidelity(&self, rhs: &CarrierState) -> f64 {
        if self.dims != rhs.dims {
            return 0.0;
        }
        let na = self.probability();
        let nb = rhs.probability();
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        self.inner(rhs).norm_sqr() / (na * nb)
    }

    pub fn distance(&self, rhs: &CarrierState) -> f64 {
        if self.dims != rhs.dims {
            return f64::INFINITY;
        }
        (&self.amplitudes - &rhs.amplitudes).norm()
    }

    pub fn try_add(&self, rhs: &CarrierState) -> Result<Self> {
        if self.dims != rhs.dims {
            return Err(Error::DimensionMismatch("adding states on different registers".into()));
        }
        Ok(CarrierState {
            dims: self.dims.clone(),
            amplitudes: &self.amplitudes + &rhs.amplitudes,
        })
    }
}

/// Random draws used by tests, property checks and the acceptance harness.
pub mod random {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |_, _| {
            c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        })
    }

    /// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
    pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
        let qr = ginibre(n, rng).qr();
        let (mut q, r) = qr.unpack();
        for j in 0..n {
            let d = r[(j, j)];
            let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
            for i in 0..n {
                q[(i, j)] *= ph;
            }
        }
        q
    }

    pub fn haar_qubit_unitary<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Operator {
        Operator::square(vec![2; n_qubits], haar_unitary(1 << n_qubits, rng))
            .expect("dimensions agree")
    }

    /// Arbitrary complex matrix with entries ~ N(0,1)+iN(0,1), scaled by `1/sqrt(n)`.
    pub fn ginibre_operator<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Operator {
        let n = 1 << n_qubits;
        let m = ginibre(n, rng) / c((n as f64).sqrt(), 0.0);
        Operator::square(vec![2; n_qubits], m).expect("dimensions agree")
    }

    /// Normalized random pure state.
    pub fn state<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> CarrierState {
        let n = dim_of(&dims);
        let v = DVector::from_fn(n, |_, _| {
            c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        });
        let norm = v.norm();
        CarrierState::from_vector(dims, v / c(norm, 0.0)).expect("dimensions agree")
    }

    pub fn qubit_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> CarrierState {
        state(vec![2; n_qubits], rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn digit_roundtrip() {
        let dims = [2, 4, 3];
        for i in 0..24 {
            assert_eq!(index_of(&digits(i, &dims), &dims), i);
        }
        assert_eq!(digits(5, &dims), vec![0, 1, 2]);
    }

    #[test]
    fn shape_checked() {
        let m = DMatrix::<C64>::identity(3, 3);
        assert!(matches!(
            Operator::square(vec![2], m),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            assert!(random::haar_qubit_unitary(n, &mut rng).is_unitary());
        }
    }

    #[test]
    fn projector_not_unitary() {
        let p = Operator::from_real(vec![2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(!p.is_unitary());
    }

    #[test]
    fn fidelity_ignores_phase_and_norm() {
        let a = CarrierState::qubits(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let b = a.scale(c(0.0, 0.5));
        assert!((a.fidelity(&b) - 1.0).abs() < 1e-15);
    }
}
