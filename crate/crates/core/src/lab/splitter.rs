//! Eigen-splitter identities: for `W² = I`, the vectors `(I ± W)|φ⟩` are
//! eigenvectors of `W` with eigenvalues `±1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CarrierState, Operator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitterBranch {
    pub eigenvalue: f64,
    /// `‖(I ± W)φ‖² / 4`, the branch weight.
    pub weight: f64,
    /// `‖W v − λ v‖ / ‖v‖`; zero for a degenerate branch.
    pub residual: f64,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitterReport {
    pub plus: SplitterBranch,
    pub minus: SplitterBranch,
}

pub fn eigen_splitter_check(w: &Operator, phi: &CarrierState) -> Result<SplitterReport> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch("W must be square".into()));
    }
    let id = Operator::identity(w.dims_in().to_vec());
    let defect = (w * w).max_abs_diff(&id);
    if defect >= 1e-10 {
        return Err(Error::Precondition(format!("W² differs from I by {defect:e}")));
    }
    let branch = |sign: f64| -> Result<SplitterBranch> {
        let v = id.try_add(&w.scale(c(sign, 0.0)))?.apply(phi)?;
        let n2 = v.probability();
        let degenerate = n2 < 1e-24;
        let residual = if degenerate {
            0.0
        } else {
            w.apply(&v)?.distance(&v.scale(c(sign, 0.0))) / n2.sqrt()
        };
        Ok(SplitterBranch {
            eigenvalue: sign,
            weight: n2 / 4.0,
            residual,
            degenerate,
        })
    };
    Ok(SplitterReport {
        plus: branch(1.0)?,
        minus: branch(-1.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{named_gate, NamedGate};
    use crate::linalg::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zz() -> Operator {
        named_gate(NamedGate::Z).kron(&named_gate(NamedGate::Z))
    }

    #[test]
    fn zz_random() {
        let phi = random::qubit_state(2, &mut ChaCha8Rng::seed_from_u64(2));
        let r = eigen_splitter_check(&zz(), &phi).unwrap();
        assert!(r.plus.residual < 1e-12 && r.minus.residual < 1e-12);
        assert!((r.plus.weight + r.minus.weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xx_on_hh() {
        let xx = named_gate(NamedGate::X).kron(&named_gate(NamedGate::X));
        let hh = CarrierState::basis(vec![2, 2], &[0, 0]).unwrap();
        let r = eigen_splitter_check(&xx, &hh).unwrap();
        assert!(r.plus.residual < 1e-12);
        assert!((r.plus.weight - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_branch() {
        let hh = CarrierState::basis(vec![2, 2], &[0, 0]).unwrap();
        let r = eigen_splitter_check(&zz(), &hh).unwrap();
        assert!(r.minus.degenerate);
        assert_eq!(r.minus.weight, 0.0);
    }

    #[test]
    fn rejects_non_involution() {
        let h = CarrierState::basis(vec![2], &[0]).unwrap();
        assert!(matches!(
            eigen_splitter_check(&named_gate(NamedGate::ZPhase(0.3)), &h),
            Err(Error::Precondition(_))
        ));
    }
}
