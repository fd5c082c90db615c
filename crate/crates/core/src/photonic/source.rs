//! Photon-pair sources feeding the two-path schemes.
//!
//! Slot `k` (1-based) owns the ports `"{k}r"` and `"{k}b"`.

use std::f64::consts::FRAC_1_SQRT_2;

use super::fock::{FockState, Pol};
use crate::error::{Error, Result};
use crate::linalg::{c, digits, CarrierState, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Red,
    Blue,
}

impl Branch {
    pub fn suffix(self) -> &'static str {
        match self {
            Branch::Red => "r",
            Branch::Blue => "b",
        }
    }
}

pub fn slot_port(slot: usize, branch: Branch) -> String {
    format!("{slot}{}", branch.suffix())
}

/// Ports `1r, 1b, 2r, 2b, …` for `n` slots.
pub fn branch_ports(n: usize) -> Vec<String> {
    (1..=n)
        .flat_map(|k| [slot_port(k, Branch::Red), slot_port(k, Branch::Blue)])
        .collect()
}

fn check_phi(phi: &CarrierState) -> Result<usize> {
    if phi.dims().iter().any(|&d| d != 2) || phi.dims().is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "polarization register must be qubits, got dims {:?}",
            phi.dims()
        )));
    }
    let p = phi.probability();
    if (p - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(p));
    }
    Ok(phi.dims().len())
}

fn add_branch(state: &mut FockState, phi: &CarrierState, branch: Branch, weight: C64) -> Result<()> {
    let n = phi.dims().len();
    let ports: Vec<String> = (1..=n).map(|k| slot_port(k, branch)).collect();
    for (i, &a) in phi.amplitudes().iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let bits = digits(i, phi.dims());
        let modes: Vec<(&str, Pol)> = ports
            .iter()
            .zip(&bits)
            .map(|(p, &b)| (p.as_str(), Pol::from_bit(b)))
            .collect();
        state.add_product(&modes, a * weight)?;
    }
    Ok(())
}

/// `|φ⟩` carried entirely by one branch, weighted by `1/√2`. The two branch
/// states sum to [`prepare_branched_source`].
pub fn branch_source(phi: &CarrierState, branch: Branch) -> Result<FockState> {
    let n = check_phi(phi)?;
    let ports = branch_ports(n);
    let refs: Vec<&str> = ports.iter().map(String::as_str).collect();
    let mut s = FockState::over_ports(&refs, n)?;
    add_branch(&mut s, phi, branch, c(FRAC_1_SQRT_2, 0.0))?;
    Ok(s)
}

/// `(|φ⟩_r + |φ⟩_b)/√2` for an `n`-photon polarization state.
pub fn prepare_branched_source(phi: &CarrierState) -> Result<FockState> {
    branch_source(phi, Branch::Red)?.superpose(&branch_source(phi, Branch::Blue)?)
}

/// Type-I source followed by polarization preparation: two photons over
/// modes `{1r, 1b, 2r, 2b} × {H, V}`.
pub fn prepare_type1_source(phi: &CarrierState) -> Result<FockState> {
    if phi.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "type-I source prepares two photons, got dims {:?}",
            phi.dims()
        )));
    }
    prepare_branched_source(phi)
}

/// Type-II pair `(|HV⟩ + |VH⟩)/√2` after the PBS conversion to path
/// entanglement: `(|H⟩₁ᵣ|V⟩₂ᵣ + e^{iθ}|V⟩₁ᵦ|H⟩₂ᵦ)/√2`.
pub fn prepare_type2_sagnac(theta: f64) -> FockState {
    let (r, b) = type2_sagnac_branches(theta);
    r.superpose(&b).expect("same modes")
}

/// The red and blue halves of [`prepare_type2_sagnac`].
pub fn type2_sagnac_branches(theta: f64) -> (FockState, FockState) {
    let ports = branch_ports(2);
    let refs: Vec<&str> = ports.iter().map(String::as_str).collect();
    let h = FRAC_1_SQRT_2;
    let mut r = FockState::over_ports(&refs, 2).expect("two slots fit");
    r.add_product(&[("1r", Pol::H), ("2r", Pol::V)], c(h, 0.0))
        .expect("valid modes");
    let mut b = FockState::over_ports(&refs, 2).expect("two slots fit");
    b.add_product(&[("1b", Pol::V), ("2b", Pol::H)], C64::from_polar(h, theta))
        .expect("valid modes");
    (r, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use std::f64::consts::PI;

    #[test]
    fn type1_hh() {
        let phi = CarrierState::qubits(vec![ONE, ZERO, ZERO, ZERO]).unwrap();
        let s = prepare_type1_source(&phi).unwrap();
        assert_eq!(s.n_terms(), 2);
        let h = FRAC_1_SQRT_2;
        // modes: 1rH 1rV 1bH 1bV 2rH 2rV 2bH 2bV
        assert!((s.amplitude(&[1, 0, 0, 0, 1, 0, 0, 0]) - c(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(&[0, 0, 1, 0, 0, 0, 1, 0]) - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn type1_plus_h() {
        let h = c(FRAC_1_SQRT_2, 0.0);
        let phi = CarrierState::qubits(vec![h, ZERO, h, ZERO]).unwrap();
        let s = prepare_type1_source(&phi).unwrap();
        assert_eq!(s.n_terms(), 4);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        for (occ, _) in s.terms() {
            let red = occ[0] + occ[1] + occ[4] + occ[5];
            assert!(red == 0 || red == 2, "no mixed-branch terms");
        }
    }

    #[test]
    fn type1_rejects_unnormalized() {
        let phi = CarrierState::qubits(vec![ONE, ONE, ZERO, ZERO]).unwrap();
        assert!(matches!(prepare_type1_source(&phi), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn sagnac_phase() {
        for theta in [0.0, 0.7, PI] {
            let s = prepare_type2_sagnac(theta);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        }
        let s = prepare_type2_sagnac(PI);
        let b = s.amplitude(&[0, 0, 0, 1, 0, 0, 1, 0]);
        assert!((b - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }
}
