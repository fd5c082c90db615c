//! Branch operation settings `A1, A2` (red) and `B1, B2` (blue).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{self, named_gate, NamedGate};
use crate::linalg::Operator;

#[derive(Clone, Debug, PartialEq)]
pub struct GateSettings {
    pub a1: Operator,
    pub a2: Operator,
    pub b1: Operator,
    pub b2: Operator,
}

impl GateSettings {
    pub fn new(a1: Operator, a2: Operator, b1: Operator, b2: Operator) -> Result<Self> {
        for (name, op) in [("a1", &a1), ("a2", &a2), ("b1", &b1), ("b2", &b2)] {
            if op.dims_in() != [2] || op.dims_out() != [2] {
                return Err(Error::DimensionMismatch(format!("{name} must be 2x2")));
            }
        }
        Ok(GateSettings { a1, a2, b1, b2 })
    }

    /// `A = A1 ⊗ A2`
    pub fn a(&self) -> Operator {
        self.a1.kron(&self.a2)
    }

    /// `B = B1 ⊗ B2`
    pub fn b(&self) -> Operator {
        self.b1.kron(&self.b2)
    }

    /// `A + B`
    pub fn sum_operator(&self) -> Operator {
        &self.a() + &self.b()
    }

    /// `A − B`
    pub fn difference_operator(&self) -> Operator {
        &self.a() - &self.b()
    }

    pub fn as_array(&self) -> [&Operator; 4] {
        [&self.a1, &self.a2, &self.b1, &self.b2]
    }
}

/// `A1 = |H⟩⟨H|, A2 = I, B1 = |V⟩⟨V|, B2 = u`: the sum class applies `u` to
/// the target when the control is V.
pub fn cu_settings(u: &Operator) -> Result<GateSettings> {
    GateSettings::new(
        gates::proj_h(),
        Operator::qubits_identity(1),
        gates::proj_v(),
        u.clone(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EfVariant {
    /// `A1 = A2 = |H⟩⟨H|, B1 = B2 = |V⟩⟨V|`: entanglement filter.
    Projector,
    /// `A1 = A2 = I, B1 = B2 = Z`: entanglement splitter.
    Unitary,
}

pub fn ef_settings(variant: EfVariant) -> GateSettings {
    let (a, b) = match variant {
        EfVariant::Projector => (gates::proj_h(), gates::proj_v()),
        EfVariant::Unitary => (Operator::qubits_identity(1), named_gate(NamedGate::Z)),
    };
    GateSettings {
        a1: a.clone(),
        a2: a,
        b1: b.clone(),
        b2: b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cnot_from_settings() {
        let s = cu_settings(&named_gate(NamedGate::X)).unwrap();
        assert!(s.sum_operator().max_abs_diff(&gates::cnot()) < 1e-15);
    }

    #[test]
    fn identity_from_settings() {
        let s = cu_settings(&Operator::qubits_identity(1)).unwrap();
        assert!(s.sum_operator().max_abs_diff(&Operator::qubits_identity(2)) < 1e-15);
    }

    #[test]
    fn cphase_pi4() {
        let s = cu_settings(&named_gate(NamedGate::ZPhase(PI / 4.0))).unwrap();
        let m = s.sum_operator();
        assert!((m.entry(3, 3) - crate::linalg::C64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        assert!(m.is_unitary());
    }

    #[test]
    fn filter_and_splitter_agree_up_to_scale() {
        let p = ef_settings(EfVariant::Projector).sum_operator();
        let u = ef_settings(EfVariant::Unitary).sum_operator();
        assert!(u.max_abs_diff(&p.scale(crate::linalg::c(2.0, 0.0))) < 1e-15);
    }

    #[test]
    fn rejects_wrong_shape() {
        let id2 = Operator::qubits_identity(2);
        assert!(cu_settings(&id2).is_err());
    }
}
