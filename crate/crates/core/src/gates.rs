//! Standard single- and two-qubit matrices. Polarization encoding throughout:
//! `|H⟩ ↦ |0⟩`, `|V⟩ ↦ |1⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c, Operator, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedGate {
    I,
    X,
    Y,
    Z,
    H,
    /// `diag(1, e^{iφ})`
    ZPhase(f64),
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedGate::I => write!(f, "I"),
            NamedGate::X => write!(f, "X"),
            NamedGate::Y => write!(f, "Y"),
            NamedGate::Z => write!(f, "Z"),
            NamedGate::H => write!(f, "H"),
            NamedGate::ZPhase(phi) => write!(f, "Zphase({phi})"),
        }
    }
}

impl FromStr for NamedGate {
    type Err = Error;

    /// Accepts `I`, `X`, `Y`, `Z`, `H`, `Zpi2`, `Zpi4` and `Zphase(<radians>)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "I" => return Ok(NamedGate::I),
            "X" => return Ok(NamedGate::X),
            "Y" => return Ok(NamedGate::Y),
            "Z" => return Ok(NamedGate::Z),
            "H" => return Ok(NamedGate::H),
            "Zpi2" => return Ok(NamedGate::ZPhase(PI / 2.0)),
            "Zpi4" => return Ok(NamedGate::ZPhase(PI / 4.0)),
            _ => {}
        }
        let inner = t
            .strip_prefix("Zphase(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::UnknownGate(t.to_string()))?;
        inner
            .trim()
            .parse::<f64>()
            .map(NamedGate::ZPhase)
            .map_err(|_| Error::UnknownGate(t.to_string()))
    }
}

fn op2(m: [C64; 4]) -> Operator {
    Operator::from_rows(vec![2], &[vec![m[0], m[1]], vec![m[2], m[3]]]).expect("2x2")
}

pub fn named_gate(gate: NamedGate) -> Operator {
    let h = FRAC_1_SQRT_2;
    match gate {
        NamedGate::I => Operator::qubits_identity(1),
        NamedGate::X => op2([ZERO, ONE, ONE, ZERO]),
        NamedGate::Y => op2([ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
        NamedGate::Z => op2([ONE, ZERO, ZERO, -ONE]),
        NamedGate::H => op2([c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        NamedGate::ZPhase(phi) => op2([ONE, ZERO, ZERO, C64::from_polar(1.0, phi)]),
    }
}

/// Parse and build in one step.
pub fn gate_by_name(name: &str) -> Result<Operator> {
    Ok(named_gate(name.parse()?))
}

pub fn projector(ket: [C64; 2]) -> Operator {
    op2([
        ket[0] * ket[0].conj(),
        ket[0] * ket[1].conj(),
        ket[1] * ket[0].conj(),
        ket[1] * ket[1].conj(),
    ])
}

/// `|H⟩⟨H|`
pub fn proj_h() -> Operator {
    projector([ONE, ZERO])
}

/// `|V⟩⟨V|`
pub fn proj_v() -> Operator {
    projector([ZERO, ONE])
}

/// Pauli matrix by index 0..4 = I, X, Y, Z.
pub fn pauli(index: usize) -> Operator {
    match index {
        0 => named_gate(NamedGate::I),
        1 => named_gate(NamedGate::X),
        2 => named_gate(NamedGate::Y),
        3 => named_gate(NamedGate::Z),
        _ => panic!("pauli index {index} out of range"),
    }
}

/// Real polarization rotation by `theta` (counter-clockwise from H).
pub fn rotation(theta: f64) -> Operator {
    let (s, co) = theta.sin_cos();
    op2([c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
}

/// Half-wave plate with fast axis at `theta` from H: `R(θ)·diag(1,−1)·R(−θ)`.
pub fn hwp(theta: f64) -> Operator {
    let (s2, c2) = (2.0 * theta).sin_cos();
    op2([c(c2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-c2, 0.0)])
}

/// Quarter-wave plate with fast axis at `theta` from H: `R(θ)·diag(1,i)·R(−θ)`.
pub fn qwp(theta: f64) -> Operator {
    let r = rotation(theta);
    let d = op2([ONE, ZERO, ZERO, c(0.0, 1.0)]);
    &(&r * &d) * &r.adjoint()
}

/// Linear polarizer transmitting the polarization at `theta` from H.
pub fn polarizer(theta: f64) -> Operator {
    let (s, co) = theta.sin_cos();
    projector([c(co, 0.0), c(s, 0.0)])
}

pub fn cnot() -> Operator {
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
    ];
    Operator::from_real(vec![2, 2], &m).expect("4x4")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CarrierState;

    #[test]
    fn zphase_pi_is_z() {
        let d = named_gate(NamedGate::ZPhase(PI)).max_abs_diff(&named_gate(NamedGate::Z));
        assert!(d < 1e-15);
    }

    #[test]
    fn hadamard_squared() {
        let h = named_gate(NamedGate::H);
        assert!((&h * &h).max_abs_diff(&Operator::qubits_identity(1)) < 1e-15);
    }

    #[test]
    fn x_flips_h_to_v() {
        let hket = CarrierState::qubits(vec![ONE, ZERO]).unwrap();
        let out = named_gate(NamedGate::X).apply(&hket).unwrap();
        assert_eq!(out, CarrierState::qubits(vec![ZERO, ONE]).unwrap());
    }

    #[test]
    fn parse_names() {
        assert_eq!("X".parse::<NamedGate>().unwrap(), NamedGate::X);
        assert_eq!("Zphase(0.5)".parse::<NamedGate>().unwrap(), NamedGate::ZPhase(0.5));
        assert!(matches!("Q".parse::<NamedGate>(), Err(Error::UnknownGate(_))));
    }

    #[test]
    fn waveplates() {
        assert!(hwp(PI / 4.0).max_abs_diff(&named_gate(NamedGate::X)) < 1e-15);
        assert!(hwp(0.0).max_abs_diff(&named_gate(NamedGate::Z)) < 1e-15);
        assert!(hwp(PI / 8.0).max_abs_diff(&named_gate(NamedGate::H)) < 1e-15);
        assert!(qwp(0.3).is_unitary());
        // QWP at 0 is Zphase(π/2).
        assert!(qwp(0.0).max_abs_diff(&named_gate(NamedGate::ZPhase(PI / 2.0))) < 1e-15);
    }
}
